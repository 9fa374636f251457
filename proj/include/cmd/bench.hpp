// Benchmark harness: seeded synthetic corpora, timed phases with a
// correctness gate before any timing is reported, and long-format CSV.
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cmd/analytics.hpp"
#include "cmd/crypto/mask.hpp"
#include "cmd/schema.hpp"

namespace cmd::bench {

struct BenchRecord {
    std::string workload; // "dna" or "tweets"
    std::size_t size = 0; // nnz or tweet count
    std::string phase;
    double seconds = 0;
    int reps = 0;
};

struct RunConfig {
    std::uint64_t seed = 42;
    std::vector<std::size_t> sizes; // strictly increasing; empty = workload default
    std::size_t k = 10;
    double cut = 0.0;
    crypto::MaskPolicy policy; // DET keys, CLEAR values by default
    std::string password = "bench";
    std::filesystem::path store_dir; // tweets workload only
    int reps = 5;

    void validate() const; // throws InvalidValue
};

// Sequences of length >= 50 sized so the k-mer array lands near
// target_nnz; every 8th sequence shares a 20-base window with its
// predecessor so off-diagonal matches exist.
std::vector<SequenceRecord> gen_dna_corpus(std::uint64_t seed, std::size_t target_nnz,
                                           std::size_t k);

// Columns (user, word x4); Zipf-distributed words over a 20k vocabulary,
// uniform users. Fully determined by (seed, count).
DenseTable gen_tweets(std::uint64_t seed, std::size_t count);

// Phases mask, compute_masked, compute_plain, unmask per size.
std::vector<BenchRecord> bench_dna(const RunConfig& cfg);

// Phases insert_plain, insert_masked, query_plain, query_masked per size.
std::vector<BenchRecord> bench_tweets(const RunConfig& cfg);

void write_csv(std::ostream& out, const std::vector<BenchRecord>& records);

} // namespace cmd::bench
