#include "cmd/crypto/keys.hpp"

#include <cstring>

#include "cmd/error.hpp"

namespace cmd::crypto {

MaskKeySet derive_keys(std::string_view password, const Salt128& salt) {
    // One scrypt call, sliced: det | ope | rnd | Paillier seed.
    const std::string okm = scrypt_derive(password, salt, 80);
    MaskKeySet ks;
    std::memcpy(ks.det_key.data(), okm.data(), 16);
    std::memcpy(ks.ope_key.data(), okm.data() + 16, 16);
    std::memcpy(ks.rnd_key.data(), okm.data() + 32, 16);
    std::array<std::uint8_t, 32> seed;
    std::memcpy(seed.data(), okm.data() + 48, 32);
    ks.hom = paillier_generate(seed);
    ks.kdf_salt = salt;
    return ks;
}

std::string to_hex(std::string_view bytes) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (char c : bytes) {
        out += digits[(static_cast<std::uint8_t>(c) >> 4) & 0xf];
        out += digits[static_cast<std::uint8_t>(c) & 0xf];
    }
    return out;
}

std::string from_hex(std::string_view hex) {
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9')
            return c - '0';
        if (c >= 'a' && c <= 'f')
            return c - 'a' + 10;
        if (c >= 'A' && c <= 'F')
            return c - 'A' + 10;
        return -1;
    };
    if (hex.size() % 2 != 0)
        throw ParseError("hex string has odd length");
    std::string out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        const int hi = nibble(hex[i]), lo = nibble(hex[i + 1]);
        if (hi < 0 || lo < 0)
            throw ParseError("invalid hex digit");
        out += static_cast<char>((hi << 4) | lo);
    }
    return out;
}

} // namespace cmd::crypto
