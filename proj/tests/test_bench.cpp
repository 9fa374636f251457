#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "cmd/analytics.hpp"
#include "cmd/bench.hpp"
#include "cmd/error.hpp"

using namespace cmd;
using namespace cmd::bench;

namespace {

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const char* tag)
        : path(std::filesystem::temp_directory_path() /
               (std::string("cmd_bench_") + tag + "_" + std::to_string(::getpid()))) {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

std::vector<std::string> phases_for(const std::vector<BenchRecord>& records,
                                    std::size_t size) {
    std::vector<std::string> out;
    for (const auto& r : records)
        if (r.size == size)
            out.push_back(r.phase);
    return out;
}

} // namespace

TEST_CASE("run configurations reject unusable settings") {
    RunConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.sizes = {100, 100};
    CHECK_THROWS_AS(cfg.validate(), InvalidValue);
    cfg.sizes = {200, 100};
    CHECK_THROWS_AS(cfg.validate(), InvalidValue);
    cfg.sizes = {100, 200};
    CHECK_NOTHROW(cfg.validate());
    cfg.reps = 4;
    CHECK_THROWS_AS(cfg.validate(), InvalidValue); // medians need >= 5 runs
    cfg.reps = 5;
    cfg.k = 0;
    CHECK_THROWS_AS(cfg.validate(), InvalidValue);
}

TEST_CASE("sequence corpora are seeded, sized and well formed") {
    const auto seqs = gen_dna_corpus(9, 1000, 8);
    CHECK(seqs == gen_dna_corpus(9, 1000, 8));
    CHECK_FALSE(seqs == gen_dna_corpus(10, 1000, 8));

    std::set<std::string> ids;
    for (const auto& s : seqs) {
        CHECK(s.bases.size() >= 50);
        CHECK(ids.insert(s.id).second);
        CHECK(s.bases.find_first_not_of("ACGT") == std::string::npos);
    }

    // The k-mer array should land in the neighbourhood of the target.
    const double nnz = double(kmerize(seqs, 8).nnz());
    CHECK(nnz > 500.0);
    CHECK(nnz < 1500.0);

    // Every eighth sequence copies a window from its predecessor, so the
    // match has off-diagonal entries.
    const MatchResult m = dna_match(kmerize(seqs, 8), 0.0);
    CHECK(m.X.nnz() > seqs.size());
}

TEST_CASE("tweet corpora are seeded and shaped like exploded logs") {
    const DenseTable t = gen_tweets(11, 300);
    CHECK(t == gen_tweets(11, 300));
    CHECK_FALSE(t == gen_tweets(12, 300));

    REQUIRE(t.row_ids.size() == 300);
    REQUIRE(t.cells.size() == 300);
    CHECK(t.columns == std::vector<std::string>{"user", "word", "word", "word", "word"});
    std::set<std::string> ids(t.row_ids.begin(), t.row_ids.end());
    CHECK(ids.size() == 300);
    for (const auto& row : t.cells) {
        REQUIRE(row.size() == 5);
        CHECK(row[0][0] == 'u');
        for (std::size_t w = 1; w < 5; ++w)
            CHECK(row[w][0] == 'w');
    }

    // Zipf words repeat heavily; the top word must dominate.
    std::map<std::string, int> freq;
    for (const auto& row : t.cells)
        for (std::size_t w = 1; w < 5; ++w)
            ++freq[row[w]];
    const int top =
        std::max_element(freq.begin(), freq.end(), [](const auto& a, const auto& b) {
            return a.second < b.second;
        })->second;
    CHECK(top > 30);

    const AssociativeArray e = explode(t);
    CHECK(e.nnz() <= 300 * 5);
    CHECK(e.nnz() > 300 * 3); // duplicate words inside one tweet collapse
}

TEST_CASE("the sequence workload reports gated timings per size") {
    RunConfig cfg;
    cfg.seed = 5;
    cfg.sizes = {200, 400};
    cfg.k = 8;
    cfg.reps = 5;
    const auto records = bench_dna(cfg);

    REQUIRE(records.size() == 8);
    for (std::size_t size : cfg.sizes)
        CHECK(phases_for(records, size) ==
              std::vector<std::string>{"mask", "compute_masked", "compute_plain",
                                       "unmask"});
    for (const auto& r : records) {
        CHECK(r.workload == "dna");
        CHECK(r.seconds >= 0.0);
        CHECK(r.reps == 5);
    }
}

TEST_CASE("the log workload reports gated timings per size") {
    TempDir tmp("tweets");
    RunConfig cfg;
    cfg.seed = 6;
    cfg.sizes = {150, 300};
    cfg.reps = 5;
    cfg.store_dir = tmp.path;
    const auto records = bench_tweets(cfg);

    REQUIRE(records.size() == 8);
    for (std::size_t size : cfg.sizes)
        CHECK(phases_for(records, size) ==
              std::vector<std::string>{"insert_plain", "insert_masked", "query_plain",
                                       "query_masked"});
    for (const auto& r : records) {
        CHECK(r.workload == "tweets");
        CHECK(r.seconds >= 0.0);
        CHECK(r.reps == 5);
    }

    RunConfig no_store = cfg;
    no_store.store_dir.clear();
    CHECK_THROWS_AS(bench_tweets(no_store), InvalidValue);
}

TEST_CASE("csv output is long-format with a fixed header") {
    std::vector<BenchRecord> records = {{"dna", 1000, "mask", 0.25, 5},
                                        {"tweets", 50000, "query_plain", 0.00125, 7}};
    std::ostringstream out;
    write_csv(out, records);
    CHECK(out.str() == "workload,size,phase,seconds,reps\n"
                       "dna,1000,mask,0.25,5\n"
                       "tweets,50000,query_plain,0.00125,7\n");
}
