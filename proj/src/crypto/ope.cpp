#include "cmd/crypto/ope.hpp"

#include <gmpxx.h>

#include <cmath>
#include <cstdint>

#include "cmd/crypto/base64.hpp"
#include "cmd/error.hpp"

namespace cmd::crypto {

namespace {

constexpr std::size_t kMaxPlain = 16;
constexpr std::size_t kCtBytes = 24;

const mpz_class& domain_size() {
    static const mpz_class d = [] {
        mpz_class v;
        mpz_ui_pow_ui(v.get_mpz_t(), 257, kMaxPlain);
        return v;
    }();
    return d;
}

const mpz_class& range_size() {
    static const mpz_class r = [] {
        mpz_class v;
        mpz_ui_pow_ui(v.get_mpz_t(), 2, 8 * kCtBytes);
        return v;
    }();
    return r;
}

mpz_class embed(std::string_view m) {
    if (m.size() > kMaxPlain)
        throw InputTooLong("order-preserving masking is limited to 16-byte keys");
    mpz_class v = 0;
    for (std::size_t i = 0; i < kMaxPlain; ++i) {
        v *= 257;
        if (i < m.size())
            v += static_cast<unsigned>(static_cast<std::uint8_t>(m[i])) + 1;
    }
    return v;
}

std::string unembed(mpz_class v) {
    // Digits are 0..256, so they must not pass through char.
    unsigned digits[kMaxPlain];
    for (std::size_t i = 0; i < kMaxPlain; ++i) {
        const unsigned long d = mpz_fdiv_q_ui(v.get_mpz_t(), v.get_mpz_t(), 257);
        digits[kMaxPlain - 1 - i] = static_cast<unsigned>(d);
    }
    std::string out;
    bool ended = false;
    for (unsigned d : digits) {
        if (d == 0) {
            ended = true;
            continue;
        }
        if (ended)
            throw DecryptFailure("ciphertext decodes outside the key domain");
        out += static_cast<char>(d - 1);
    }
    return out;
}

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

double unit_open(std::uint64_t x) {
    // (0,1) from the top 53 bits.
    return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t be64(const std::uint8_t* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v = (v << 8) | p[i];
    return v;
}

// One tree node: domain [d_lo, d_lo+dsz) mapping into range [r_lo, r_lo+rsz).
struct Node {
    mpz_class d_lo, dsz, r_lo, rsz;

    std::array<std::uint8_t, 32> prf(std::string_view key) const {
        return hmac_sha256(key, fixed_be(r_lo, 32) + fixed_be(rsz, 32));
    }

    // Domain points falling into the lower half of the range: binomial
    // draw with exact integer mean and a PRF-seeded normal tail.
    mpz_class split(const std::array<std::uint8_t, 32>& bytes, const mpz_class& rl,
                    const mpz_class& rr) const {
        mpz_class s = (dsz * rl) / rsz;
        const double p = mpz_get_d(rl.get_mpz_t()) / mpz_get_d(rsz.get_mpz_t());
        const double sigma = std::sqrt(mpz_get_d(dsz.get_mpz_t()) * p * (1.0 - p));
        const double u1 = unit_open(be64(bytes.data()));
        const double u2 = unit_open(be64(bytes.data() + 8));
        const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
        mpz_class jitter;
        mpz_set_d(jitter.get_mpz_t(), std::nearbyint(z * sigma));
        s += jitter;

        mpz_class lo = dsz - rr;
        if (lo < 0)
            lo = 0;
        const mpz_class& hi = dsz < rl ? dsz : rl;
        if (s < lo)
            s = lo;
        if (s > hi)
            s = hi;
        return s;
    }

    void go_left(const mpz_class& s, const mpz_class& rl) {
        dsz = s;
        rsz = rl;
    }

    void go_right(const mpz_class& s, const mpz_class& rl, const mpz_class& rr) {
        d_lo += s;
        dsz -= s;
        r_lo += rl;
        rsz = rr;
    }
};

} // namespace

std::string OpeCipher::encrypt(std::string_view m) const {
    const std::string_view key(reinterpret_cast<const char*>(key_.data()), key_.size());
    const mpz_class mv = embed(m);
    Node n{0, domain_size(), 0, range_size()};

    while (true) {
        if (n.dsz == n.rsz)
            return fixed_be(n.r_lo + (mv - n.d_lo), kCtBytes);
        const auto bytes = n.prf(key);
        if (n.dsz == 1) {
            const mpz_class off =
                from_be(std::string_view(reinterpret_cast<const char*>(bytes.data()),
                                         bytes.size())) %
                n.rsz;
            return fixed_be(n.r_lo + off, kCtBytes);
        }
        const mpz_class rl = n.rsz / 2, rr = n.rsz - rl;
        const mpz_class s = n.split(bytes, rl, rr);
        if (mv - n.d_lo < s)
            n.go_left(s, rl);
        else
            n.go_right(s, rl, rr);
    }
}

std::string OpeCipher::decrypt(std::string_view ct24) const {
    if (ct24.size() != kCtBytes)
        throw DecryptFailure("order-preserving ciphertext has wrong length");
    const std::string_view key(reinterpret_cast<const char*>(key_.data()), key_.size());
    const mpz_class c = from_be(ct24);
    Node n{0, domain_size(), 0, range_size()};

    while (true) {
        if (n.dsz == 0)
            throw DecryptFailure("ciphertext is not in the image of the key domain");
        if (n.dsz == n.rsz)
            return unembed(n.d_lo + (c - n.r_lo));
        if (n.dsz == 1)
            return unembed(n.d_lo);
        const auto bytes = n.prf(key);
        const mpz_class rl = n.rsz / 2, rr = n.rsz - rl;
        const mpz_class s = n.split(bytes, rl, rr);
        if (c - n.r_lo < rl)
            n.go_left(s, rl);
        else
            n.go_right(s, rl, rr);
    }
}

std::string OpeCipher::mask_text(std::string_view m) const {
    return sortable_encode(encrypt(m));
}

std::string OpeCipher::unmask_text(std::string_view text) const {
    if (text.size() != 32)
        throw DecryptFailure("masked key has wrong length");
    try {
        return decrypt(sortable_decode(text));
    } catch (const ParseError& e) {
        throw DecryptFailure(e.what());
    }
}

} // namespace cmd::crypto
