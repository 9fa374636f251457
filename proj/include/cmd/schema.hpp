// Dense-table <-> sparse-array conversion. A dense table row
// (id, name1=v1, name2=v2, ...) explodes into array entries
// (id, "name1|v1") = 1, (id, "name2|v2") = 1: cell values move into the
// column key and every stored value is a structural 1, so equality joins
// become key matching.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cmd/assoc_array.hpp"

namespace cmd {

struct DenseTable {
    std::vector<std::string> columns;             // need not be unique
    std::vector<std::string> row_ids;             // unique, non-empty
    std::vector<std::vector<std::string>> cells;  // rows x columns; "" = absent

    bool operator==(const DenseTable&) const = default;
};

struct ExplodeConfig {
    char delimiter = '|';
};

// First field of each record is the row id; the header's id label is
// presentation only and is discarded.
DenseTable parse_dense_csv(std::istream& in, bool has_header = true);

AssociativeArray explode(const DenseTable& table, const ExplodeConfig& cfg = {});

// Rows and columns come back sorted; rows whose cells were all empty are
// not representable in the array and do not come back.
DenseTable unexplode(const AssociativeArray& a, const ExplodeConfig& cfg = {});

} // namespace cmd
