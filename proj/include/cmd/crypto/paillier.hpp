// Paillier additive homomorphic encryption: 2048-bit modulus, g = n+1.
// Ciphertexts are fixed 512-byte big-endian values so they can ride in
// string cells; multiplying two ciphertexts adds the plaintexts.
#pragma once

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace cmd::crypto {

struct PaillierPublicKey {
    mpz_class n, n2;

    bool operator==(const PaillierPublicKey& o) const { return n == o.n && n2 == o.n2; }
};

struct PaillierKeyPair {
    PaillierPublicKey pub;
    mpz_class lambda, mu; // private part

    bool operator==(const PaillierKeyPair& o) const {
        return pub == o.pub && lambda == o.lambda && mu == o.mu;
    }
};

// Deterministic keypair from a seed, so a password re-derives the same key.
PaillierKeyPair paillier_generate(const std::array<std::uint8_t, 32>& seed);

// Plaintexts are non-negative integers below 2^64; sums must stay below
// the modulus, which the caller guarantees (documented, not detected).
std::string hom_encrypt(const PaillierPublicKey& pk, std::uint64_t m);
std::string hom_add(const PaillierPublicKey& pk, std::string_view c1, std::string_view c2);
mpz_class hom_decrypt(const PaillierKeyPair& kp, std::string_view ct);

constexpr std::size_t kHomCtBytes = 512;

} // namespace cmd::crypto
