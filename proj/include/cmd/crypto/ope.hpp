// Order-preserving encryption of byte strings up to 16 bytes. The string
// embeds injectively into [0, 257^16) as base-257 digits (byte+1, absent
// positions 0), which keeps byte-lexicographic order including prefixes.
// That domain maps into [0, 2^192) by recursive binary range splitting:
// each node halves the range and splits the domain with a PRF-seeded
// binomial draw (the usual normal approximation of the hypergeometric),
// so the map is deterministic, strictly increasing, and invertible by
// walking the same tree.
#pragma once

#include <string>
#include <string_view>

#include "cmd/crypto/primitives.hpp"

namespace cmd::crypto {

class OpeCipher {
public:
    explicit OpeCipher(const Key128& key) : key_(key) {}

    std::string encrypt(std::string_view m) const;    // 24-byte big-endian value
    std::string decrypt(std::string_view ct24) const; // throws DecryptFailure

    // Text form: 32 characters from the Base64 set with digits in ASCII
    // order, so text comparisons equal ciphertext comparisons.
    std::string mask_text(std::string_view m) const;
    std::string unmask_text(std::string_view text) const;

private:
    Key128 key_;
};

} // namespace cmd::crypto
