#include <cstdint>
#include <limits>
#include <random>
#include <string>

#include "doctest.h"

#include "cmd/wire.hpp"

using namespace cmd;

TEST_CASE("varints roundtrip boundary and random values") {
    const std::uint64_t fixed[] = {0,
                                   1,
                                   127,
                                   128,
                                   300,
                                   16383,
                                   16384,
                                   (1ull << 32) - 1,
                                   1ull << 32,
                                   std::numeric_limits<std::uint64_t>::max()};
    for (std::uint64_t v : fixed) {
        std::string buf;
        wire::put_varint(buf, v);
        std::size_t pos = 0;
        std::uint64_t back = 0;
        CHECK(wire::get_varint(buf, pos, back));
        CHECK(back == v);
        CHECK(pos == buf.size());
    }
    std::mt19937_64 rng(40);
    for (int i = 0; i < 2000; ++i) {
        const std::uint64_t v = rng() >> (rng() % 64);
        std::string buf;
        wire::put_varint(buf, v);
        std::size_t pos = 0;
        std::uint64_t back = 0;
        CHECK(wire::get_varint(buf, pos, back));
        CHECK(back == v);
    }
}

TEST_CASE("varint decoding rejects truncation and overflow") {
    std::string buf;
    wire::put_varint(buf, 300); // two bytes
    std::size_t pos = 0;
    std::uint64_t v = 0;
    CHECK_FALSE(wire::get_varint(std::string_view(buf).substr(0, 1), pos, v));

    pos = 0;
    CHECK_FALSE(wire::get_varint("", pos, v));

    // Ten continuation bytes push past 64 bits.
    std::string wide(9, char(0xff));
    wide += char(0x02);
    pos = 0;
    CHECK_FALSE(wire::get_varint(wide, pos, v));
}

TEST_CASE("fixed-width integers are big-endian and roundtrip") {
    std::string buf;
    wire::put_u64be(buf, 0x0102030405060708ull);
    CHECK(buf == std::string("\x01\x02\x03\x04\x05\x06\x07\x08", 8));
    std::size_t pos = 0;
    std::uint64_t v64 = 0;
    CHECK(wire::get_u64be(buf, pos, v64));
    CHECK(v64 == 0x0102030405060708ull);
    pos = 1; // short read from a mid-buffer offset
    CHECK_FALSE(wire::get_u64be(buf, pos, v64));

    buf.clear();
    wire::put_u32be(buf, 0xdeadbeef);
    CHECK(buf == std::string("\xde\xad\xbe\xef", 4));
    pos = 0;
    std::uint32_t v32 = 0;
    CHECK(wire::get_u32be(buf, pos, v32));
    CHECK(v32 == 0xdeadbeef);
    pos = 2;
    CHECK_FALSE(wire::get_u32be(buf, pos, v32));
}

TEST_CASE("length-prefixed strings carry arbitrary bytes") {
    std::mt19937_64 rng(41);
    for (int i = 0; i < 500; ++i) {
        std::string s(rng() % 60, '\0');
        for (auto& c : s)
            c = char(rng() & 0xff);
        std::string buf;
        wire::put_lstring(buf, s);
        std::size_t pos = 0;
        std::string back;
        CHECK(wire::get_lstring(buf, pos, back));
        CHECK(back == s);
        CHECK(pos == buf.size());

        if (!buf.empty()) {
            pos = 0;
            CHECK_FALSE(
                wire::get_lstring(std::string_view(buf).substr(0, buf.size() - 1), pos, back));
        }
    }
}

TEST_CASE("crc32c matches the published check value") {
    CHECK(wire::crc32c("123456789") == 0xE3069283u);
    CHECK(wire::crc32c("") == 0u);
    CHECK(wire::crc32c("123456789") != wire::crc32c("123456788"));
}
