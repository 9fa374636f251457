#include "cmd/crypto/base64.hpp"

#include <array>
#include <cstdint>

#include "cmd/error.hpp"

namespace cmd::crypto {

namespace {

constexpr char kStd[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
constexpr char kSorted[] = "+/0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz";

std::array<std::int8_t, 256> inverse(const char* alphabet) {
    std::array<std::int8_t, 256> inv;
    inv.fill(-1);
    for (int i = 0; i < 64; ++i)
        inv[static_cast<unsigned char>(alphabet[i])] = static_cast<std::int8_t>(i);
    return inv;
}

const auto kStdInv = inverse(kStd);
const auto kSortedInv = inverse(kSorted);

std::string encode_with(std::string_view bytes, const char* alphabet, bool pad) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 3 <= bytes.size(); i += 3) {
        const std::uint32_t v = (static_cast<std::uint8_t>(bytes[i]) << 16) |
                                (static_cast<std::uint8_t>(bytes[i + 1]) << 8) |
                                static_cast<std::uint8_t>(bytes[i + 2]);
        out += alphabet[(v >> 18) & 63];
        out += alphabet[(v >> 12) & 63];
        out += alphabet[(v >> 6) & 63];
        out += alphabet[v & 63];
    }
    const std::size_t rem = bytes.size() - i;
    if (rem == 1) {
        const std::uint32_t v = static_cast<std::uint8_t>(bytes[i]) << 16;
        out += alphabet[(v >> 18) & 63];
        out += alphabet[(v >> 12) & 63];
        if (pad)
            out += "==";
    } else if (rem == 2) {
        const std::uint32_t v = (static_cast<std::uint8_t>(bytes[i]) << 16) |
                                (static_cast<std::uint8_t>(bytes[i + 1]) << 8);
        out += alphabet[(v >> 18) & 63];
        out += alphabet[(v >> 12) & 63];
        out += alphabet[(v >> 6) & 63];
        if (pad)
            out += '=';
    }
    return out;
}

} // namespace

std::string b64_encode(std::string_view bytes) { return encode_with(bytes, kStd, true); }

std::string b64_decode(std::string_view text) {
    if (text.size() % 4 != 0)
        throw ParseError("Base64 length not a multiple of 4");
    std::string out;
    out.reserve(text.size() / 4 * 3);
    for (std::size_t i = 0; i < text.size(); i += 4) {
        int pads = 0;
        std::uint32_t v = 0;
        for (int k = 0; k < 4; ++k) {
            const char c = text[i + k];
            if (c == '=') {
                if (i + 4 != text.size() || k < 2)
                    throw ParseError("misplaced Base64 padding");
                ++pads;
                v <<= 6;
                continue;
            }
            if (pads > 0 || kStdInv[static_cast<unsigned char>(c)] < 0)
                throw ParseError("invalid Base64 character");
            v = (v << 6) | static_cast<std::uint32_t>(kStdInv[static_cast<unsigned char>(c)]);
        }
        out += static_cast<char>((v >> 16) & 0xff);
        if (pads < 2)
            out += static_cast<char>((v >> 8) & 0xff);
        if (pads < 1)
            out += static_cast<char>(v & 0xff);
    }
    return out;
}

std::string sortable_encode(std::string_view bytes) {
    if (bytes.size() % 3 != 0)
        throw ParseError("sortable encoding needs a multiple of 3 bytes");
    return encode_with(bytes, kSorted, false);
}

std::string sortable_decode(std::string_view text) {
    if (text.size() % 4 != 0)
        throw ParseError("sortable text length not a multiple of 4");
    std::string out;
    out.reserve(text.size() / 4 * 3);
    for (std::size_t i = 0; i < text.size(); i += 4) {
        std::uint32_t v = 0;
        for (int k = 0; k < 4; ++k) {
            const std::int8_t d = kSortedInv[static_cast<unsigned char>(text[i + k])];
            if (d < 0)
                throw ParseError("invalid sortable-text character");
            v = (v << 6) | static_cast<std::uint32_t>(d);
        }
        out += static_cast<char>((v >> 16) & 0xff);
        out += static_cast<char>((v >> 8) & 0xff);
        out += static_cast<char>(v & 0xff);
    }
    return out;
}

} // namespace cmd::crypto
