#include <random>
#include <sstream>
#include <string>

#include "doctest.h"

#include "cmd/triple_text.hpp"

using namespace cmd;

TEST_CASE("field escaping covers tab, newline and backslash") {
    CHECK(escape_field("a\tb\nc\\d") == "a\\tb\\nc\\\\d");
    CHECK(unescape_field("a\\tb\\nc\\\\d") == "a\tb\nc\\d");
    CHECK(escape_field("plain") == "plain");
    CHECK_THROWS_AS(unescape_field("dangling\\"), ParseError);
    CHECK_THROWS_AS(unescape_field("bad\\q"), ParseError);
}

TEST_CASE("random byte strings survive the escape roundtrip") {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 2000; ++i) {
        std::string s;
        const std::size_t len = rng() % 20;
        for (std::size_t j = 0; j < len; ++j) s.push_back(char("a\t\n\\xyz"[rng() % 7]));
        CHECK(unescape_field(escape_field(s)) == s);
    }
}

TEST_CASE("triple text roundtrips arrays with hostile keys") {
    AssociativeArray a = AssociativeArray::from_triples({
        {"r\t1", "c|x", Value::num(2.5)},
        {"r\n2", "c\\y", Value::str("he\tllo")},
        {"r3", "c", Value::num(-1)},
    });
    CHECK(from_triple_text(to_triple_text(a)) == a);
}

TEST_CASE("triple lines come out sorted by row then column") {
    AssociativeArray a = AssociativeArray::from_triples({
        {"b", "z", Value::num(1)},
        {"a", "z", Value::num(1)},
        {"a", "b", Value::num(1)},
    });
    CHECK(to_triple_text(a) == "a\tb\tn:1\na\tz\tn:1\nb\tz\tn:1\n");
}

TEST_CASE("duplicate coordinates in hand-written input collapse additively") {
    AssociativeArray a = from_triple_text("r\tc\tn:1\nr\tc\tn:2\n");
    CHECK(a.at("r", "c")->num_value() == 3.0);
}

TEST_CASE("malformed lines are rejected with their line number") {
    auto message_of = [](const std::string& text) {
        try {
            from_triple_text(text);
        } catch (const ParseError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message_of("r\tc\tn:1\nr\tc\n").find("line 2") != std::string::npos);
    CHECK(message_of("r\tc\tq:1\n").find("line 1") != std::string::npos);
    CHECK_THROWS_AS(from_triple_text("a\tb\tc\td\n"), ParseError);
    CHECK_THROWS_AS(from_triple_text("r\tc\tn:zz\n"), ParseError);
}

TEST_CASE("empty input gives the empty array") {
    CHECK(from_triple_text("").empty());
    CHECK(to_triple_text(AssociativeArray{}) == "");
}
