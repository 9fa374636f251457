// Tab-separated triple text: one entry per line, `row TAB col TAB value`,
// lines sorted by (row, col). Tabs, newlines and backslashes inside keys
// and string values are escaped as \t, \n, \\.
#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "cmd/assoc_array.hpp"

namespace cmd {

std::string escape_field(std::string_view raw);
std::string unescape_field(std::string_view text); // throws ParseError

void write_triples(std::ostream& out, const AssociativeArray& a);
AssociativeArray read_triples(std::istream& in);

std::string to_triple_text(const AssociativeArray& a);
AssociativeArray from_triple_text(std::string_view text);

} // namespace cmd
