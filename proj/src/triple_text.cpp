#include "cmd/triple_text.hpp"

#include <istream>
#include <ostream>
#include <sstream>

namespace cmd {

std::string escape_field(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        switch (c) {
        case '\t':
            out += "\\t";
            break;
        case '\n':
            out += "\\n";
            break;
        case '\\':
            out += "\\\\";
            break;
        default:
            out += c;
        }
    }
    return out;
}

std::string unescape_field(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '\\') {
            out += text[i];
            continue;
        }
        if (++i == text.size())
            throw ParseError("dangling escape");
        switch (text[i]) {
        case 't':
            out += '\t';
            break;
        case 'n':
            out += '\n';
            break;
        case '\\':
            out += '\\';
            break;
        default:
            throw ParseError(std::string("unknown escape \\") + text[i]);
        }
    }
    return out;
}

void write_triples(std::ostream& out, const AssociativeArray& a) {
    // to_triples walks the canonical form, so lines come out sorted.
    for (const auto& t : a.to_triples()) {
        out << escape_field(t.row) << '\t' << escape_field(t.col) << '\t';
        if (t.val.is_num())
            out << "n:" << format_double(t.val.num_value());
        else
            out << "s:" << escape_field(t.val.str_value());
        out << '\n';
    }
}

AssociativeArray read_triples(std::istream& in) {
    std::vector<Triple> triples;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto bad = [lineno](const std::string& why) {
            return ParseError("line " + std::to_string(lineno) + ": " + why);
        };
        const auto t1 = line.find('\t');
        const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
        if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos)
            throw bad("expected exactly three tab-separated fields");
        std::string row, col;
        Value val = Value::num(1.0);
        try {
            row = unescape_field(std::string_view(line).substr(0, t1));
            col = unescape_field(std::string_view(line).substr(t1 + 1, t2 - t1 - 1));
            const auto vtext = std::string_view(line).substr(t2 + 1);
            if (vtext.size() < 2 || vtext[1] != ':')
                throw ParseError("value field lacks a type tag");
            if (vtext[0] == 'n')
                val = Value::num(parse_double(vtext.substr(2)));
            else if (vtext[0] == 's')
                val = Value::str(unescape_field(vtext.substr(2)));
            else
                throw ParseError("unknown value tag");
        } catch (const Error& e) {
            throw bad(e.what());
        }
        triples.push_back({std::move(row), std::move(col), std::move(val)});
    }
    // Duplicate coordinates in hand-written input collapse additively.
    return AssociativeArray::from_triples(std::move(triples), CollisionRule::Sum);
}

std::string to_triple_text(const AssociativeArray& a) {
    std::ostringstream out;
    write_triples(out, a);
    return out.str();
}

AssociativeArray from_triple_text(std::string_view text) {
    std::istringstream in{std::string(text)};
    return read_triples(in);
}

} // namespace cmd
