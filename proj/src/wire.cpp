#include "cmd/wire.hpp"

#include <array>

namespace cmd::wire {

void put_varint(std::string& out, std::uint64_t v) {
    while (v >= 0x80) {
        out += static_cast<char>((v & 0x7f) | 0x80);
        v >>= 7;
    }
    out += static_cast<char>(v);
}

bool get_varint(std::string_view buf, std::size_t& pos, std::uint64_t& v) {
    v = 0;
    for (unsigned shift = 0; shift < 64; shift += 7) {
        if (pos >= buf.size())
            return false;
        const auto byte = static_cast<std::uint8_t>(buf[pos++]);
        v |= static_cast<std::uint64_t>(byte & 0x7f) << shift;
        if (!(byte & 0x80))
            return shift < 63 || byte <= 1;
    }
    return false;
}

void put_u64be(std::string& out, std::uint64_t v) {
    for (int i = 7; i >= 0; --i)
        out += static_cast<char>((v >> (8 * i)) & 0xff);
}

bool get_u64be(std::string_view buf, std::size_t& pos, std::uint64_t& v) {
    if (pos > buf.size() || buf.size() - pos < 8)
        return false;
    v = 0;
    for (int i = 0; i < 8; ++i)
        v = (v << 8) | static_cast<std::uint8_t>(buf[pos++]);
    return true;
}

void put_u32be(std::string& out, std::uint32_t v) {
    for (int i = 3; i >= 0; --i)
        out += static_cast<char>((v >> (8 * i)) & 0xff);
}

bool get_u32be(std::string_view buf, std::size_t& pos, std::uint32_t& v) {
    if (pos > buf.size() || buf.size() - pos < 4)
        return false;
    v = 0;
    for (int i = 0; i < 4; ++i)
        v = (v << 8) | static_cast<std::uint8_t>(buf[pos++]);
    return true;
}

void put_lstring(std::string& out, std::string_view s) {
    put_varint(out, s.size());
    out.append(s);
}

bool get_lstring(std::string_view buf, std::size_t& pos, std::string& s) {
    std::uint64_t len;
    if (!get_varint(buf, pos, len))
        return false;
    if (len > buf.size() - pos)
        return false;
    s.assign(buf.substr(pos, len));
    pos += len;
    return true;
}

namespace {

std::array<std::uint32_t, 256> make_crc_table() {
    std::array<std::uint32_t, 256> table{};
    for (std::uint32_t i = 0; i < 256; ++i) {
        std::uint32_t c = i;
        for (int k = 0; k < 8; ++k)
            c = (c >> 1) ^ ((c & 1) ? 0x82f63b78u : 0u);
        table[i] = c;
    }
    return table;
}

const std::array<std::uint32_t, 256> kCrcTable = make_crc_table();

} // namespace

std::uint32_t crc32c(std::string_view data) {
    std::uint32_t c = 0xffffffffu;
    for (char ch : data)
        c = kCrcTable[(c ^ static_cast<std::uint8_t>(ch)) & 0xff] ^ (c >> 8);
    return c ^ 0xffffffffu;
}

} // namespace cmd::wire
