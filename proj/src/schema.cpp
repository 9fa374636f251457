#include "cmd/schema.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <set>

namespace cmd {

namespace {

// RFC 4180 records: quoted fields may contain commas, newlines and "" for
// a literal quote. Returns false at end of input.
bool read_record(std::istream& in, std::vector<std::string>& fields) {
    fields.clear();
    int c = in.get();
    if (c == std::istream::traits_type::eof())
        return false;
    std::string field;
    bool quoted = false;
    for (;; c = in.get()) {
        if (c == std::istream::traits_type::eof()) {
            if (quoted)
                throw ParseError("unterminated quoted field");
            break;
        }
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    field += '"';
                    in.get();
                } else {
                    quoted = false;
                }
            } else {
                field += static_cast<char>(c);
            }
            continue;
        }
        if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\n') {
            break;
        } else if (c == '\r' && in.peek() == '\n') {
            in.get();
            break;
        } else {
            field += static_cast<char>(c);
        }
    }
    fields.push_back(std::move(field));
    return true;
}

} // namespace

DenseTable parse_dense_csv(std::istream& in, bool has_header) {
    DenseTable t;
    std::vector<std::string> fields;
    std::size_t width = 0;
    std::size_t recno = 0;

    if (has_header) {
        if (!read_record(in, fields) || fields.size() < 2)
            throw ParseError("header must name an id column and at least one data column");
        width = fields.size();
        t.columns.assign(fields.begin() + 1, fields.end());
        ++recno;
    }

    std::set<std::string> seen;
    while (read_record(in, fields)) {
        ++recno;
        if (fields.size() == 1 && fields[0].empty())
            continue; // trailing blank line
        if (width == 0) {
            if (fields.size() < 2)
                throw ParseError("records need an id field and at least one data field");
            width = fields.size();
            for (std::size_t i = 1; i < width; ++i)
                t.columns.push_back("col" + std::to_string(i));
        }
        if (fields.size() != width)
            throw RaggedRow("record " + std::to_string(recno) + " has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(width));
        if (fields[0].empty())
            throw InvalidValue("record " + std::to_string(recno) + " has an empty row id");
        if (!seen.insert(fields[0]).second)
            throw DuplicateRowId("row id '" + fields[0] + "' appears twice");
        t.row_ids.push_back(std::move(fields[0]));
        t.cells.emplace_back(std::make_move_iterator(fields.begin() + 1),
                             std::make_move_iterator(fields.end()));
    }
    return t;
}

AssociativeArray explode(const DenseTable& table, const ExplodeConfig& cfg) {
    auto clean = [&cfg](const std::string& s, const char* what) -> const std::string& {
        if (s.find(cfg.delimiter) != std::string::npos)
            throw DelimiterClash(std::string(what) + " '" + s + "' contains the delimiter '" +
                                 cfg.delimiter + "'");
        return s;
    };
    for (const auto& name : table.columns)
        clean(name, "column name");

    std::vector<Triple> triples;
    for (std::size_t r = 0; r < table.row_ids.size(); ++r) {
        if (table.cells[r].size() != table.columns.size())
            throw RaggedRow("row '" + table.row_ids[r] + "' width mismatch");
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            const std::string& v = table.cells[r][c];
            if (v.empty())
                continue;
            triples.push_back({table.row_ids[r],
                               table.columns[c] + cfg.delimiter + clean(v, "cell value"),
                               Value::num(1.0)});
        }
    }
    // A pair observed through several columns is still just present.
    return AssociativeArray::from_triples(std::move(triples), CollisionRule::LastWins);
}

DenseTable unexplode(const AssociativeArray& a, const ExplodeConfig& cfg) {
    // col key -> (name, value), validated to contain exactly one delimiter.
    std::vector<std::pair<std::string, std::string>> split(a.col_keys().size());
    std::set<std::string> names;
    for (std::size_t i = 0; i < a.col_keys().size(); ++i) {
        const std::string& key = a.col_keys()[i];
        const auto p = key.find(cfg.delimiter);
        if (p == std::string::npos || p == 0 || p + 1 == key.size() ||
            key.find(cfg.delimiter, p + 1) != std::string::npos)
            throw MalformedColumn("column key '" + key + "' is not name" +
                                  std::string(1, cfg.delimiter) + "value");
        split[i] = {key.substr(0, p), key.substr(p + 1)};
        names.insert(split[i].first);
    }

    DenseTable t;
    t.columns.assign(names.begin(), names.end());
    std::map<std::string, std::size_t> name_pos;
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        name_pos[t.columns[i]] = i;

    t.row_ids = a.row_keys();
    t.cells.assign(t.row_ids.size(), std::vector<std::string>(t.columns.size()));
    for (std::size_t r = 0; r < t.row_ids.size(); ++r)
        for (std::size_t e = a.row_ptr()[r]; e < a.row_ptr()[r + 1]; ++e) {
            const auto& [name, value] = split[a.entry_cols()[e]];
            auto& cell = t.cells[r][name_pos[name]];
            if (!cell.empty())
                throw MultiValueCell("row '" + t.row_ids[r] + "' holds both '" + cell +
                                     "' and '" + value + "' under '" + name + "'");
            cell = value;
        }
    return t;
}

} // namespace cmd
