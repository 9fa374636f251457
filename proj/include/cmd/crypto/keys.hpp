#pragma once

#include <string_view>

#include "cmd/crypto/paillier.hpp"
#include "cmd/crypto/primitives.hpp"

namespace cmd::crypto {

// Everything masking needs, derived deterministically from one password
// and a per-table salt.
struct MaskKeySet {
    Key128 det_key{}, ope_key{}, rnd_key{};
    PaillierKeyPair hom;
    Salt128 kdf_salt{};
};

MaskKeySet derive_keys(std::string_view password, const Salt128& salt);

std::string to_hex(std::string_view bytes);
std::string from_hex(std::string_view hex); // throws ParseError

} // namespace cmd::crypto
