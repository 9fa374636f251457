// Deterministic, injective encryption of byte strings. Input is PKCS#7
// padded to 16-byte blocks; a single padded block is one AES block, longer
// inputs use a synthetic-IV mode (PRF-derived IV + CTR body) so equal
// plaintexts still give equal ciphertexts and decryption authenticates.
#pragma once

#include <string>
#include <string_view>

#include "cmd/crypto/primitives.hpp"

namespace cmd::crypto {

std::string det_encrypt(const Key128& key, std::string_view m);
std::string det_decrypt(const Key128& key, std::string_view ct); // throws DecryptFailure

// Ciphertext as text: each 16-byte block Base64-encoded to 24 characters.
std::string det_mask_text(const Key128& key, std::string_view m);
std::string det_unmask_text(const Key128& key, std::string_view text);

} // namespace cmd::crypto
