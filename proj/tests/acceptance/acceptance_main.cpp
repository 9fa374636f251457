// End-to-end acceptance checks for the masked associative-array engine.
// Each criterion prints exactly one PASS/FAIL line with its measured
// numbers; the process exit code is the number of failed criteria.
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cmd/analytics.hpp"
#include "cmd/assoc_array.hpp"
#include "cmd/bench.hpp"
#include "cmd/crypto/det.hpp"
#include "cmd/crypto/keys.hpp"
#include "cmd/crypto/mask.hpp"
#include "cmd/crypto/ope.hpp"
#include "cmd/crypto/paillier.hpp"
#include "cmd/crypto/primitives.hpp"
#include "cmd/error.hpp"
#include "cmd/schema.hpp"
#include "cmd/store.hpp"
#include "cmd/triple_text.hpp"
#include "test_util.hpp"

using namespace cmd;
using namespace cmd::crypto;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Salt128 salt_of(std::uint8_t fill) {
    Salt128 s{};
    s.fill(fill);
    return s;
}

AssociativeArray random_numeric(std::mt19937_64& rng, std::size_t n_rows,
                                std::size_t n_cols, double density) {
    std::vector<Triple> t;
    for (std::size_t i = 0; i < n_rows; ++i)
        for (std::size_t j = 0; j < n_cols; ++j)
            if (testutil::unit(rng) < density)
                t.push_back({testutil::padded('r', i), testutil::padded('c', j),
                             Value::num(1.0 + double(rng() % 4))});
    return AssociativeArray::from_triples(std::move(t), CollisionRule::LastWins);
}

double phase_median(const std::vector<bench::BenchRecord>& recs, std::size_t size,
                    std::string_view phase) {
    for (const auto& r : recs)
        if (r.size == size && r.phase == phase)
            return r.seconds;
    throw Error("missing benchmark phase");
}

// ---------------------------------------------------------------------
// 1. Masked compute equals plain compute on 100 random arrays.

bool criterion_masked_compute() {
    const auto t0 = std::chrono::steady_clock::now();
    const MaskKeySet keys = derive_keys("acceptance-compute", salt_of(1));
    const MaskPolicy policies[3] = {
        {Scheme::Det, Scheme::Det, Scheme::Clear},
        {Scheme::Ope, Scheme::Det, Scheme::Clear},
        {Scheme::Det, Scheme::Ope, Scheme::Clear},
    };
    std::mt19937_64 rng(1001);
    int mismatches = 0;

    for (int i = 0; i < 100; ++i) {
        const std::size_t nr = 20 + rng() % 181, nc = 20 + rng() % 181; // <= 200x200
        const AssociativeArray a = random_numeric(rng, nr, nc, 0.05);
        const AssociativeArray b = random_numeric(rng, nr, nc, 0.05);
        const MaskPolicy& policy = policies[i % 3];
        const MaskedArray am = mask_array(a, policy, keys);
        const MaskedArray bm = mask_array(b, policy, keys);

        auto expect = [&](const AssociativeArray& masked_out, const MaskPolicy& out_policy,
                          const AssociativeArray& plain_out) {
            if (!(unmask_array({masked_out, out_policy, keys.kdf_salt}, keys) == plain_out))
                ++mismatches;
        };

        // Product against the own transpose: both result axes carry row keys.
        expect(multiply(am.payload, transpose(am.payload)),
               {policy.rows, policy.rows, Scheme::Clear}, multiply(a, transpose(a)));

        for (CombineOp op : {CombineOp::Add, CombineOp::Min, CombineOp::Max})
            expect(combine(am.payload, bm.payload, op), policy, combine(a, b, op));

        expect(threshold(am.payload, 2.0), policy, threshold(a, 2.0));

        // Exact-key selection through masked keys, misses included.
        std::vector<std::string> plain_rows;
        for (std::size_t k = 0; k < 5; ++k)
            plain_rows.push_back(testutil::padded('r', rng() % (nr + 20)));
        std::vector<std::string> masked_rows;
        for (const auto& r : plain_rows)
            masked_rows.push_back(str_mask(r, keys, policy.rows));
        expect(select(am.payload, KeySpec::exact(masked_rows), KeySpec::all()), policy,
               select(a, KeySpec::exact(plain_rows), KeySpec::all()));
    }

    const double secs = seconds_since(t0);
    const bool pass = mismatches == 0 && secs < 120.0;
    std::printf("%s 1: masked compute equals plain compute across 100 random arrays "
                "(6 operations each, %d mismatches, %.1fs)\n",
                pass ? "PASS" : "FAIL", mismatches, secs);
    return pass;
}

// ---------------------------------------------------------------------
// 2. Sequence matching equivalence at three scales plus a hand-checked
//    instance against a set-intersection oracle.

AssociativeArray brute_match(const std::vector<SequenceRecord>& seqs, std::size_t k) {
    std::vector<std::set<std::string>> sets;
    for (const auto& s : seqs) {
        std::set<std::string> w;
        for (std::size_t i = 0; i + k <= s.bases.size(); ++i)
            w.insert(s.bases.substr(i, k));
        sets.push_back(std::move(w));
    }
    std::vector<Triple> triples;
    for (std::size_t i = 0; i < seqs.size(); ++i)
        for (std::size_t j = 0; j < seqs.size(); ++j) {
            std::size_t shared = 0;
            for (const auto& w : sets[i])
                shared += sets[j].count(w);
            if (shared > 0)
                triples.push_back({seqs[i].id, seqs[j].id, Value::num(double(shared))});
        }
    return AssociativeArray::from_triples(std::move(triples), CollisionRule::LastWins);
}

bool criterion_sequence_match() {
    const MaskKeySet keys = derive_keys("acceptance-dna", salt_of(2));
    const MaskPolicy policy{Scheme::Det, Scheme::Det, Scheme::Clear};
    int bad = 0;
    std::string sizes_note;

    for (std::size_t target : {1000u, 10000u, 100000u}) {
        const auto seqs = bench::gen_dna_corpus(2000 + target, target, 10);
        const MaskedMatch mm = masked_dna_match(seqs, 10, 0.0, policy, keys);
        if (!(mm.unmasked == mm.plain.X))
            ++bad;
        if (!(mm.plain.X == brute_match(seqs, 10)))
            ++bad;
        sizes_note += (sizes_note.empty() ? "" : "/") +
                      std::to_string(kmerize(seqs, 10).nnz());
    }

    // Eight sequences: three share exactly one window, one has exactly
    // two distinct windows, four are disjoint fillers.
    const std::vector<SequenceRecord> eight = {
        {"s1", "ACGAA"}, {"s2", "ACGCC"}, {"s3", "ACGGG"}, {"s4", "AAAT"},
        {"s5", "TTTTT"}, {"s6", "GTGTG"}, {"s7", "CTCTC"}, {"s8", "TAGTA"}};
    const MaskedMatch mm = masked_dna_match(eight, 3, 0.0, policy, keys);
    const AssociativeArray oracle = brute_match(eight, 3);
    if (!(mm.unmasked == mm.plain.X) || !(mm.plain.X == oracle))
        ++bad;
    for (const char* a : {"s1", "s2", "s3"})
        for (const char* b : {"s1", "s2", "s3"})
            if (std::string(a) != b &&
                !(mm.unmasked.at(a, b) && mm.unmasked.at(a, b)->num_value() == 1.0))
                ++bad;
    if (!(mm.unmasked.at("s4", "s4") && mm.unmasked.at("s4", "s4")->num_value() == 2.0))
        ++bad;

    const bool pass = bad == 0;
    std::printf("%s 2: masked sequence matching unmasks to the plain result at nnz %s "
                "and reproduces the 8-sequence instance (%d mismatches)\n",
                pass ? "PASS" : "FAIL", sizes_note.c_str(), bad);
    return pass;
}

// ---------------------------------------------------------------------
// 3. Masked product overhead at the largest sequence size.

bool criterion_match_overhead() {
    bench::RunConfig cfg;
    cfg.seed = 42;
    cfg.sizes = {1000, 10000, 100000};
    cfg.k = 10;
    cfg.reps = 5;
    cfg.password = "acceptance-bench";
    const auto recs = bench::bench_dna(cfg);

    const double masked = phase_median(recs, 100000, "compute_masked");
    const double plain = phase_median(recs, 100000, "compute_plain");
    const double ratio = masked / plain;
    const bool pass = ratio <= 2.5;
    std::printf("%s 3: masked product costs %.2fx the plain product at the largest "
                "size (%.3fs vs %.3fs, limit 2.5x)\n",
                pass ? "PASS" : "FAIL", ratio, masked, plain);
    return pass;
}

// ---------------------------------------------------------------------
// 4. Masked store throughput and flat query latency.

bool criterion_store_throughput() {
    const auto dir = std::filesystem::temp_directory_path() /
                     ("cmd_acceptance_tweets_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);

    bench::RunConfig cfg;
    cfg.seed = 42;
    cfg.sizes = {10000, 20000, 50000};
    cfg.reps = 5;
    cfg.password = "acceptance-bench";
    cfg.store_dir = dir;
    bool pass = true;
    double worst_insert = 0.0, query_spread = 0.0;
    try {
        const auto recs = bench::bench_tweets(cfg); // masked queries gate on equality
        double qmin = 1e30, qmax = 0.0;
        for (std::size_t size : cfg.sizes) {
            const double r = phase_median(recs, size, "insert_masked") /
                             phase_median(recs, size, "insert_plain");
            worst_insert = std::max(worst_insert, r);
            const double q = phase_median(recs, size, "query_plain");
            qmin = std::min(qmin, q);
            qmax = std::max(qmax, q);
        }
        query_spread = qmax / qmin;
        pass = worst_insert <= 2.5 && query_spread <= 3.0;
    } catch (const Error& e) {
        std::printf("FAIL 4: store benchmark aborted: %s\n", e.what());
        std::filesystem::remove_all(dir);
        return false;
    }
    std::filesystem::remove_all(dir);
    std::printf("%s 4: masked inserts cost at most %.2fx plain (limit 2.5x) and plain "
                "query latency stays flat across sizes (spread %.2fx, limit 3x)\n",
                pass ? "PASS" : "FAIL", worst_insert, query_spread);
    return pass;
}

// ---------------------------------------------------------------------
// 5. Masked file expansion stays moderate.

bool criterion_file_expansion() {
    const MaskKeySet keys = derive_keys("acceptance-files", salt_of(5));
    const AssociativeArray E = explode(bench::gen_tweets(7, 10000));

    std::ostringstream plain;
    write_triples(plain, E);
    std::ostringstream masked;
    write_masked(masked, mask_array(E, {Scheme::Det, Scheme::Det, Scheme::Clear}, keys));

    const double ratio = double(masked.str().size()) / double(plain.str().size());
    const bool pass = ratio >= 1.5 && ratio <= 3.0;
    std::printf("%s 5: masking a 10k-record log grows the triple file %.2fx "
                "(%zu -> %zu bytes, required range 1.5x-3.0x)\n",
                pass ? "PASS" : "FAIL", ratio, plain.str().size(), masked.str().size());
    return pass;
}

// ---------------------------------------------------------------------
// 6. Per-scheme guarantees.

bool criterion_scheme_properties() {
    const MaskKeySet keys = derive_keys("acceptance-schemes", salt_of(6));
    std::mt19937_64 rng(1006);

    // Order preservation over ten thousand pairs.
    std::vector<std::string> words(10000);
    for (auto& w : words) {
        w.resize(1 + rng() % 12);
        for (auto& c : w)
            c = char('a' + rng() % 26);
    }
    const OpeCipher ope(keys.ope_key);
    std::vector<std::string> texts(words.size());
    for (std::size_t i = 0; i < words.size(); ++i)
        texts[i] = ope.mask_text(words[i]);
    int ope_violations = 0;
    for (int i = 0; i < 10000; ++i) {
        const std::size_t a = rng() % words.size(), b = rng() % words.size();
        if ((words[a] < words[b]) != (texts[a] < texts[b]))
            ++ope_violations;
    }

    // Determinism and collision-freedom over a million distinct keys.
    std::vector<std::string> cts;
    cts.reserve(1000000);
    for (int i = 0; i < 1000000; ++i)
        cts.push_back(det_mask_text(keys.det_key, "key-" + std::to_string(i)));
    std::sort(cts.begin(), cts.end());
    const bool det_collide = std::adjacent_find(cts.begin(), cts.end()) != cts.end();
    bool det_repeatable = true;
    for (int i = 0; i < 100; ++i) {
        const std::string w = "key-" + std::to_string(rng() % 1000000);
        det_repeatable &= det_mask_text(keys.det_key, w) == det_mask_text(keys.det_key, w);
    }

    // Randomized values: fresh ciphertexts, hard tamper rejection.
    std::set<std::string> blobs;
    std::vector<std::string> sample;
    for (int i = 0; i < 10000; ++i) {
        std::string blob = gcm_seal(keys.rnd_key, "n:7");
        if (i < 100)
            sample.push_back(blob);
        blobs.insert(std::move(blob));
    }
    int tamper_rejected = 0;
    for (auto& blob : sample) {
        const std::size_t bit = rng() % (blob.size() * 8);
        blob[bit / 8] = char(blob[bit / 8] ^ (1u << (bit % 8)));
        try {
            gcm_open(keys.rnd_key, blob);
        } catch (const AuthFailure&) {
            ++tamper_rejected;
        } catch (const DecryptFailure&) {
            ++tamper_rejected;
        }
    }

    // Additive homomorphism over a thousand pairs.
    int hom_bad = 0;
    for (int i = 0; i < 1000; ++i) {
        const std::uint64_t a = rng() % 1000000000, b = rng() % 1000000000;
        const std::string sum =
            hom_add(keys.hom.pub, hom_encrypt(keys.hom.pub, a), hom_encrypt(keys.hom.pub, b));
        if (hom_decrypt(keys.hom, sum) != mpz_class(std::to_string(a + b)))
            ++hom_bad;
    }

    const bool pass = ope_violations == 0 && !det_collide && det_repeatable &&
                      blobs.size() == 10000 && tamper_rejected == 100 && hom_bad == 0;
    std::printf("%s 6: scheme guarantees hold (order violations %d/10000, key collisions "
                "%s over 1e6, fresh value ciphertexts %zu/10000, tampering rejected "
                "%d/100, additive pairs wrong %d/1000)\n",
                pass ? "PASS" : "FAIL", ope_violations, det_collide ? "yes" : "none",
                blobs.size(), tamper_rejected, hom_bad);
    return pass;
}

// ---------------------------------------------------------------------
// 7. Algebra against independent oracles and algebraic laws.

bool criterion_algebra() {
    std::mt19937_64 rng(1007);
    int bad = 0;

    // Dense cubic-loop oracle on small instances.
    for (int i = 0; i < 200; ++i) {
        const AssociativeArray a = random_numeric(rng, 1 + rng() % 8, 1 + rng() % 8, 0.4);
        const AssociativeArray b = random_numeric(rng, 1 + rng() % 8, 1 + rng() % 8, 0.4);
        const AssociativeArray p = multiply(a, b);
        if (!(p == testutil::dense_multiply(a, b)) || !(p == reference::multiply(a, b)))
            ++bad;
    }

    // Semiring laws: associativity and both distributivities.
    for (int i = 0; i < 100; ++i) {
        const AssociativeArray a = random_numeric(rng, 6, 6, 0.5);
        const AssociativeArray b = random_numeric(rng, 6, 6, 0.5);
        const AssociativeArray c = random_numeric(rng, 6, 6, 0.5);
        if (!(multiply(multiply(a, b), c) == multiply(a, multiply(b, c))))
            ++bad;
        if (!(multiply(a, combine(b, c, CombineOp::Add)) ==
              combine(multiply(a, b), multiply(a, c), CombineOp::Add)))
            ++bad;
        if (!(multiply(combine(a, b, CombineOp::Add), c) ==
              combine(multiply(a, c), multiply(b, c), CombineOp::Add)))
            ++bad;
    }

    // Selection composes and arrays survive the triple roundtrip.
    for (int i = 0; i < 1000; ++i) {
        const AssociativeArray a = random_numeric(rng, 12, 12, 0.3);
        const KeySpec rs = i % 2 ? KeySpec::prefix("r000")
                                 : KeySpec::range(testutil::padded('r', rng() % 12),
                                                  "r9999");
        const KeySpec cs =
            KeySpec::exact({testutil::padded('c', rng() % 12),
                            testutil::padded('c', rng() % 12)});
        const AssociativeArray sel = select(a, rs, cs);
        if (!(sel == select(select(a, rs, KeySpec::all()), KeySpec::all(), cs)))
            ++bad;
        if (!(AssociativeArray::from_triples(sel.to_triples(), CollisionRule::LastWins) ==
              sel))
            ++bad;
        sel.check_invariants();
    }

    const bool pass = bad == 0;
    std::printf("%s 7: algebra matches the dense oracle on 200 instances, obeys semiring "
                "laws on 100, and selection composes on 1000 (%d failures)\n",
                pass ? "PASS" : "FAIL", bad);
    return pass;
}

// ---------------------------------------------------------------------
// 8. Store durability and query fidelity.

bool criterion_store_durability() {
    const auto dir = std::filesystem::temp_directory_path() /
                     ("cmd_acceptance_store_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    std::mt19937_64 rng(1008);
    int bad = 0;

    const AssociativeArray a = testutil::random_array(rng, 60, 60, 0.08, true);
    std::filesystem::path log;
    {
        store::Table t = store::Table::open(dir, "d", {.create_if_missing = true});
        t.put(a);
        log = t.log_path();
        if (!(t.scan_all() == a))
            ++bad;

        // A thousand random query specs against scan + select.
        auto random_spec = [&rng]() {
            switch (rng() % 4) {
            case 0:
                return KeySpec::all();
            case 1:
                return KeySpec::exact({testutil::padded('r', rng() % 70),
                                       testutil::padded('c', rng() % 70)});
            case 2:
                return KeySpec::prefix(std::string(rng() % 2 ? "r" : "c") +
                                       std::to_string(rng() % 10));
            default: {
                const char axis = rng() % 2 ? 'r' : 'c';
                std::string lo = testutil::padded(axis, rng() % 70);
                std::string hi = testutil::padded(axis, rng() % 70);
                if (hi < lo)
                    std::swap(lo, hi);
                return KeySpec::range(std::move(lo), std::move(hi));
            }
            }
        };
        const AssociativeArray all = t.scan_all();
        for (int i = 0; i < 1000; ++i) {
            const KeySpec rs = random_spec(), cs = random_spec();
            if (!(t.query(rs, cs) == select(all, rs, cs)))
                ++bad;
        }
    }

    // Reopen: same contents.
    {
        store::Table t = store::Table::open(dir, "d");
        if (!(t.scan_all() == a))
            ++bad;
    }

    // Garbage tail: reported with everything before it recovered.
    {
        std::ofstream out(log, std::ios::binary | std::ios::app);
        out << "\xde\xadgarbage";
    }
    bool corrupt_seen = false;
    try {
        store::Table::open(dir, "d");
    } catch (const Corrupt& c) {
        corrupt_seen = c.recovered == a.nnz();
    }
    if (!corrupt_seen)
        ++bad;
    {
        store::Table t = store::Table::open(dir, "d", {.repair = true});
        if (!(t.scan_all() == a))
            ++bad;
        t.put(AssociativeArray::from_triples({{"post", "repair", Value::num(1)}},
                                             CollisionRule::LastWins));
    }

    // Torn final record: repair drops the interrupted write, nothing else.
    std::filesystem::resize_file(log, std::filesystem::file_size(log) - 2);
    {
        store::Table t = store::Table::open(dir, "d", {.repair = true});
        if (!(t.scan_all() == a))
            ++bad;
    }

    std::filesystem::remove_all(dir);
    const bool pass = bad == 0;
    std::printf("%s 8: the store round-trips, answers 1000 random queries like "
                "scan-and-select, and survives tail corruption (%d failures)\n",
                pass ? "PASS" : "FAIL", bad);
    return pass;
}

} // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    int failures = 0;
    failures += !criterion_masked_compute();
    failures += !criterion_sequence_match();
    failures += !criterion_match_overhead();
    failures += !criterion_store_throughput();
    failures += !criterion_file_expansion();
    failures += !criterion_scheme_properties();
    failures += !criterion_algebra();
    failures += !criterion_store_durability();
    std::printf("%d/8 criteria passed in %.1fs\n", 8 - failures, seconds_since(t0));
    return failures;
}
