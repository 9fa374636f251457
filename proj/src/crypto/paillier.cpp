#include "cmd/crypto/paillier.hpp"

#include "cmd/crypto/primitives.hpp"
#include "cmd/error.hpp"

namespace cmd::crypto {

namespace {

std::string fixed_be(const mpz_class& v, std::size_t width) {
    std::string out(width, '\0');
    const std::size_t bits = v == 0 ? 0 : mpz_sizeinbase(v.get_mpz_t(), 2);
    const std::size_t bytes = (bits + 7) / 8;
    if (bytes > width)
        throw Error("big integer wider than its fixed encoding");
    if (bytes > 0) {
        std::size_t count = 0;
        mpz_export(out.data() + (width - bytes), &count, 1, 1, 1, 0, v.get_mpz_t());
    }
    return out;
}

mpz_class from_be(std::string_view bytes) {
    mpz_class v;
    mpz_import(v.get_mpz_t(), bytes.size(), 1, 1, 1, 0, bytes.data());
    return v;
}

mpz_class parse_ct(const PaillierPublicKey& pk, std::string_view ct) {
    if (ct.size() != kHomCtBytes)
        throw InvalidValue("homomorphic ciphertext has wrong length");
    mpz_class c = from_be(ct);
    if (c >= pk.n2)
        throw InvalidValue("homomorphic ciphertext out of range");
    return c;
}

mpz_class seeded_prime(gmp_randstate_t rs, unsigned bits) {
    mpz_class p;
    mpz_urandomb(p.get_mpz_t(), rs, bits);
    // Top two bits set, so the product of two primes has full width.
    mpz_setbit(p.get_mpz_t(), bits - 1);
    mpz_setbit(p.get_mpz_t(), bits - 2);
    mpz_nextprime(p.get_mpz_t(), p.get_mpz_t());
    return p;
}

} // namespace

PaillierKeyPair paillier_generate(const std::array<std::uint8_t, 32>& seed) {
    gmp_randstate_t rs;
    gmp_randinit_default(rs);
    mpz_class s;
    mpz_import(s.get_mpz_t(), seed.size(), 1, 1, 1, 0, seed.data());
    gmp_randseed(rs, s.get_mpz_t());

    const mpz_class p = seeded_prime(rs, 1024);
    mpz_class q = seeded_prime(rs, 1024);
    while (q == p)
        q = seeded_prime(rs, 1024);
    gmp_randclear(rs);

    PaillierKeyPair kp;
    kp.pub.n = p * q;
    kp.pub.n2 = kp.pub.n * kp.pub.n;
    const mpz_class pm1 = p - 1, qm1 = q - 1;
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), pm1.get_mpz_t(), qm1.get_mpz_t());
    kp.lambda = pm1 * qm1 / g;
    if (mpz_invert(kp.mu.get_mpz_t(), kp.lambda.get_mpz_t(), kp.pub.n.get_mpz_t()) == 0)
        throw Error("lambda not invertible");
    return kp;
}

std::string hom_encrypt(const PaillierPublicKey& pk, std::uint64_t m) {
    mpz_class r;
    do {
        r = from_be(random_bytes(kHomCtBytes / 2)) % (pk.n - 1) + 1;
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), r.get_mpz_t(), pk.n.get_mpz_t());
        if (g == 1)
            break;
    } while (true);

    // g = n+1 makes g^m = 1 + m*n (mod n^2).
    mpz_class c;
    mpz_powm(c.get_mpz_t(), r.get_mpz_t(), pk.n.get_mpz_t(), pk.n2.get_mpz_t());
    mpz_class mn = mpz_class(1) + mpz_class(static_cast<unsigned long>(m)) * pk.n;
    c = (c * mn) % pk.n2;
    return fixed_be(c, kHomCtBytes);
}

std::string hom_add(const PaillierPublicKey& pk, std::string_view c1, std::string_view c2) {
    const mpz_class a = parse_ct(pk, c1), b = parse_ct(pk, c2);
    return fixed_be((a * b) % pk.n2, kHomCtBytes);
}

mpz_class hom_decrypt(const PaillierKeyPair& kp, std::string_view ct) {
    const mpz_class c = parse_ct(kp.pub, ct);
    mpz_class u;
    mpz_powm(u.get_mpz_t(), c.get_mpz_t(), kp.lambda.get_mpz_t(), kp.pub.n2.get_mpz_t());
    const mpz_class l = (u - 1) / kp.pub.n;
    return (l * kp.mu) % kp.pub.n;
}

} // namespace cmd::crypto
