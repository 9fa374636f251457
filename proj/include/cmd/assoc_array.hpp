#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cmd/error.hpp"
#include "cmd/value.hpp"

namespace cmd {

struct Triple {
    std::string row;
    std::string col;
    Value val;

    bool operator==(const Triple& o) const = default;
};

// Duplicate (row, col) resolution at construction. Sum adds numeric
// duplicates and keeps the last string; LastWins keeps the last of either.
enum class CollisionRule { Sum, LastWins };

enum class CombineOp { Add, Sub, Min, Max };

// Row/column selector. Range is inclusive at both ends.
class KeySpec {
  public:
    enum class Kind { All, Exact, Prefix, Range };

    static KeySpec all() { return KeySpec(Kind::All); }
    static KeySpec exact(std::vector<std::string> keys);
    static KeySpec prefix(std::string p);
    static KeySpec range(std::string lo, std::string hi);

    Kind kind() const { return kind_; }
    const std::vector<std::string>& keys() const { return keys_; }
    const std::string& lo() const { return lo_; }
    const std::string& hi() const { return hi_; }

    bool matches(std::string_view key) const;

  private:
    explicit KeySpec(Kind k) : kind_(k) {}
    Kind kind_;
    std::vector<std::string> keys_; // Exact (sorted, deduplicated)
    std::string lo_, hi_;           // Range endpoints, Prefix in lo_
};

// Immutable sparse map from (row key, col key) to Value. Keys are byte
// strings ordered by raw-byte comparison; key sets contain no phantom
// entries and no stored zero/empty values.
class AssociativeArray {
  public:
    AssociativeArray() : row_ptr_(1, 0) {}

    static AssociativeArray from_triples(std::vector<Triple> triples,
                                         CollisionRule rule = CollisionRule::Sum);
    std::vector<Triple> to_triples() const;

    const std::vector<std::string>& row_keys() const { return rows_; }
    const std::vector<std::string>& col_keys() const { return cols_; }
    std::size_t nnz() const { return vals_.size(); }
    bool empty() const { return vals_.empty(); }

    std::optional<Value> at(std::string_view row, std::string_view col) const;

    // Structural access for kernels and tests. Entries of row i live in
    // [row_ptr()[i], row_ptr()[i+1]) with strictly increasing col ids.
    const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
    const std::vector<std::uint32_t>& entry_cols() const { return col_idx_; }
    const std::vector<Value>& entry_vals() const { return vals_; }

    bool operator==(const AssociativeArray& o) const = default;

    // Throws on any broken representation invariant; used by tests.
    void check_invariants() const;

  private:
    friend AssociativeArray select(const AssociativeArray&, const KeySpec&, const KeySpec&);
    friend AssociativeArray combine(const AssociativeArray&, const AssociativeArray&, CombineOp);
    friend AssociativeArray multiply(const AssociativeArray&, const AssociativeArray&);
    friend AssociativeArray transpose(const AssociativeArray&);
    friend AssociativeArray threshold(const AssociativeArray&, double);

    // Builds the canonical form from per-entry (row id, col id, value)
    // tuples that are sorted by (row, col) and free of duplicates; drops
    // unused keys and zero values.
    static AssociativeArray from_indexed(std::vector<std::string> rows,
                                         std::vector<std::string> cols,
                                         std::vector<std::uint32_t> entry_rows,
                                         std::vector<std::uint32_t> entry_cols,
                                         std::vector<Value> entry_vals);

    std::vector<std::string> rows_;
    std::vector<std::string> cols_;
    std::vector<std::size_t> row_ptr_;
    std::vector<std::uint32_t> col_idx_;
    std::vector<Value> vals_;
};

// D4M-style algebra. All operations are pure and return canonical arrays.
AssociativeArray select(const AssociativeArray& a, const KeySpec& rows, const KeySpec& cols);
AssociativeArray combine(const AssociativeArray& a, const AssociativeArray& b, CombineOp op);
// Semiring (+, x) product contracted over matching col/row keys. Strings
// coerce to 1.0. Parallelized over result rows; the result is bit-identical
// for every thread count.
AssociativeArray multiply(const AssociativeArray& a, const AssociativeArray& b);
AssociativeArray transpose(const AssociativeArray& a);
// Keeps entries with value strictly greater than cut.
AssociativeArray threshold(const AssociativeArray& a, double cut);

namespace reference {
// Serial string-keyed product used as the comparison baseline for the
// parallel kernel, both in tests and in the kernel benchmark.
AssociativeArray multiply(const AssociativeArray& a, const AssociativeArray& b);
} // namespace reference

} // namespace cmd
