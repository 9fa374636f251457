#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace cmd::crypto {

using Key128 = std::array<std::uint8_t, 16>;
using Salt128 = std::array<std::uint8_t, 16>;

std::string random_bytes(std::size_t n);
Salt128 random_salt();

std::array<std::uint8_t, 32> hmac_sha256(std::string_view key, std::string_view data);

// Single-block AES-128 (no padding, no chaining).
void aes128_block(const Key128& key, const std::uint8_t in[16], std::uint8_t out[16],
                  bool encrypt);

// AES-128-CTR keystream applied in place; iv is the initial counter block.
void aes128_ctr(const Key128& key, const std::uint8_t iv[16], std::string& data);

// AES-128-GCM; blob layout nonce(12) || ciphertext || tag(16).
std::string gcm_seal(const Key128& key, std::string_view plaintext);
std::string gcm_open(const Key128& key, std::string_view blob); // throws AuthFailure

// Memory-hard password KDF (scrypt, N=2^14, r=8, p=1).
std::string scrypt_derive(std::string_view password, const Salt128& salt, std::size_t out_len);

} // namespace cmd::crypto
