// Embedded sorted triple table: an append-only checksummed log plus an
// in-memory index rebuilt on open. Duplicate (row, col) pairs resolve to
// the highest sequence number at read time. One writer per table,
// enforced with a lock file across processes; reads inside the process
// may run concurrently and see a consistent snapshot.
//
// On disk: magic "CMDT" + version byte, then records of
//   varint(bodyLen) | body | crc32c(body), big-endian
// with body = sequence (8 bytes BE) | row | col | value-text, the last
// three varint-length-prefixed. An optional <name>.meta file carries
// opaque header text (e.g. salt/policy of a masked table).
#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "cmd/assoc_array.hpp"

namespace cmd::store {

class Table {
public:
    struct Options {
        bool create_if_missing = false;
        // On a corrupt tail: drop it and keep the valid prefix instead of
        // throwing Corrupt.
        bool repair = false;
    };

    static Table open(const std::filesystem::path& dir, std::string_view name,
                      Options opts);
    static Table open(const std::filesystem::path& dir, std::string_view name) {
        return open(dir, name, Options{});
    }

    Table(Table&&) noexcept;
    Table& operator=(Table&&) noexcept;
    ~Table();

    // Appends all entries with fresh sequence numbers; one write + one
    // fsync regardless of entry count. Returns entries written.
    std::size_t put(const AssociativeArray& a);

    AssociativeArray query(const KeySpec& rows, const KeySpec& cols) const;
    AssociativeArray scan_all() const;

    // Rewrites the log sorted and collapsed; queries are unaffected.
    void compact();

    void set_meta(std::string text);
    const std::optional<std::string>& meta() const;

    std::size_t live_entries() const;
    const std::filesystem::path& log_path() const;

private:
    Table();
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace cmd::store
