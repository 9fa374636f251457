#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace cmd::wire {

// Unsigned LEB128.
void put_varint(std::string& out, std::uint64_t v);

// Decodes at `pos`, advancing it; returns false on truncation or a
// value wider than 64 bits.
bool get_varint(std::string_view buf, std::size_t& pos, std::uint64_t& v);

void put_u64be(std::string& out, std::uint64_t v);
bool get_u64be(std::string_view buf, std::size_t& pos, std::uint64_t& v);

void put_u32be(std::string& out, std::uint32_t v);
bool get_u32be(std::string_view buf, std::size_t& pos, std::uint32_t& v);

void put_lstring(std::string& out, std::string_view s);
bool get_lstring(std::string_view buf, std::size_t& pos, std::string& s);

// CRC-32C (Castagnoli); crc32c("123456789") == 0xE3069283.
std::uint32_t crc32c(std::string_view data);

} // namespace cmd::wire
