#include "cmd/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "cmd/crypto/keys.hpp"
#include "cmd/store.hpp"

namespace cmd::bench {

namespace {

volatile std::size_t g_sink = 0;
void keep(std::size_t v) { g_sink = g_sink + v; }

double now_run(const std::function<void()>& work) {
    const auto t0 = std::chrono::steady_clock::now();
    work();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Discarded warm-up run, then the median of `reps` timed runs. `setup`
// runs before every run, untimed.
double median_time(int reps, const std::function<void()>& setup,
                   const std::function<void()>& work) {
    setup();
    work(); // warm-up
    std::vector<double> times(static_cast<std::size_t>(reps));
    for (auto& t : times) {
        setup();
        t = now_run(work);
    }
    std::sort(times.begin(), times.end());
    const std::size_t n = times.size();
    return n % 2 ? times[n / 2] : 0.5 * (times[n / 2 - 1] + times[n / 2]);
}

std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t x = seed ^ (salt * 0x9e3779b97f4a7c15ULL);
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    return x;
}

double unit_draw(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

std::string padded(std::string_view prefix, std::size_t i, int width) {
    std::string d = std::to_string(i);
    std::string out(prefix);
    out.append(width > static_cast<int>(d.size()) ? width - d.size() : 0, '0');
    return out + d;
}

} // namespace

void RunConfig::validate() const {
    for (std::size_t i = 1; i < sizes.size(); ++i)
        if (sizes[i] <= sizes[i - 1])
            throw InvalidValue("sizes must be strictly increasing");
    if (reps < 5)
        throw InvalidValue("medians need at least 5 repetitions");
    if (k < 1)
        throw InvalidValue("k must be positive");
}

std::vector<SequenceRecord> gen_dna_corpus(std::uint64_t seed, std::size_t target_nnz,
                                           std::size_t k) {
    static const char bases[] = "ACGT";
    const std::size_t len = std::max<std::size_t>(50, k + 40);
    const std::size_t windows = len - k + 1;
    const std::size_t n = std::max<std::size_t>(1, (target_nnz + windows - 1) / windows);

    std::mt19937_64 rng(mix(seed, target_nnz));
    std::vector<SequenceRecord> seqs;
    seqs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::string b(len, 'A');
        for (auto& c : b)
            c = bases[rng() & 3];
        // Shared window => off-diagonal matches in the corpus.
        if (i % 8 == 7)
            b.replace(10, 20, seqs[i - 1].bases.substr(10, 20));
        seqs.push_back({padded("s", i, 6), std::move(b)});
    }
    return seqs;
}

DenseTable gen_tweets(std::uint64_t seed, std::size_t count) {
    constexpr std::size_t kVocab = 20000, kUsers = 2000, kWordsPerTweet = 4;
    std::mt19937_64 rng(mix(seed, count));

    // Zipf(s=1.1) word ranks via an explicit CDF: portable and seeded.
    std::vector<double> cdf(kVocab);
    double total = 0;
    for (std::size_t r = 0; r < kVocab; ++r) {
        total += 1.0 / std::pow(static_cast<double>(r + 1), 1.1);
        cdf[r] = total;
    }
    auto zipf_word = [&]() {
        const double u = unit_draw(rng) * total;
        const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        return padded("w", static_cast<std::size_t>(it - cdf.begin()), 0);
    };

    DenseTable t;
    t.columns = {"user", "word", "word", "word", "word"};
    t.row_ids.reserve(count);
    t.cells.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        t.row_ids.push_back(padded("t", i, 8));
        std::vector<std::string> row;
        row.reserve(1 + kWordsPerTweet);
        row.push_back(padded("u", rng() % kUsers, 0));
        for (std::size_t w = 0; w < kWordsPerTweet; ++w)
            row.push_back(zipf_word());
        t.cells.push_back(std::move(row));
    }
    return t;
}

std::vector<BenchRecord> bench_dna(const RunConfig& cfg) {
    cfg.validate();
    const std::vector<std::size_t> sizes =
        cfg.sizes.empty() ? std::vector<std::size_t>{1000, 10000, 100000} : cfg.sizes;

    const auto keys = crypto::derive_keys(cfg.password, crypto::random_salt());
    std::vector<BenchRecord> out;

    for (const std::size_t size : sizes) {
        const auto seqs = gen_dna_corpus(cfg.seed, size, cfg.k);
        const AssociativeArray A = kmerize(seqs, cfg.k);

        // Correctness gate: the masked pipeline must unmask to the plain
        // result before its timings mean anything.
        const MaskedMatch gate = masked_dna_match(seqs, cfg.k, cfg.cut, cfg.policy, keys);
        if (gate.unmasked != gate.plain.X)
            throw CorrectnessFailure("masked DNA match does not unmask to the plain result");

        const crypto::MaskedArray Am = crypto::mask_array(A, cfg.policy, keys);
        const crypto::MaskPolicy match_policy{cfg.policy.rows, cfg.policy.rows,
                                              crypto::Scheme::Clear};
        const crypto::MaskedArray Xm{gate.masked.X, match_policy, keys.kdf_salt};

        auto add = [&](const char* phase, const std::function<void()>& work) {
            out.push_back({"dna", size, phase, median_time(cfg.reps, [] {}, work), cfg.reps});
        };
        add("mask", [&] { keep(crypto::mask_array(A, cfg.policy, keys).payload.nnz()); });
        add("compute_masked", [&] {
            keep(threshold(multiply(Am.payload, transpose(Am.payload)), cfg.cut).nnz());
        });
        add("compute_plain",
            [&] { keep(threshold(multiply(A, transpose(A)), cfg.cut).nnz()); });
        add("unmask", [&] { keep(crypto::unmask_array(Xm, keys).nnz()); });
    }
    return out;
}

std::vector<BenchRecord> bench_tweets(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.store_dir.empty())
        throw InvalidValue("the tweets workload needs a store directory");
    const std::vector<std::size_t> sizes =
        cfg.sizes.empty() ? std::vector<std::size_t>{10000, 20000, 50000} : cfg.sizes;

    const auto keys = crypto::derive_keys(cfg.password, crypto::random_salt());
    // The transpose table swaps the key axes, so its policy swaps too.
    const crypto::MaskPolicy tpolicy{cfg.policy.cols, cfg.policy.rows, cfg.policy.values};
    std::vector<BenchRecord> out;

    for (const std::size_t size : sizes) {
        const DenseTable tweets = gen_tweets(cfg.seed, size);
        const AssociativeArray E = explode(tweets);
        const AssociativeArray Et = transpose(E);
        const crypto::MaskedArray Em = crypto::mask_array(E, cfg.policy, keys);
        const crypto::MaskedArray Emt = crypto::mask_array(Et, tpolicy, keys);

        const auto dir = cfg.store_dir / ("tweets_" + std::to_string(size));
        std::filesystem::remove_all(dir);

        // Queries go to the transpose tables: a word lookup is an exact
        // row there, which is the flat-cost path.
        store::Table plain_t = store::Table::open(dir, "q_plain_t", {true, false});
        plain_t.put(Et);
        store::Table masked_t = store::Table::open(dir, "q_masked_t", {true, false});
        masked_t.put(Emt.payload);
        {
            std::ostringstream meta;
            crypto::MaskedArray header{AssociativeArray{}, Emt.policy, Emt.salt};
            crypto::write_masked(meta, header);
            masked_t.set_meta(meta.str());
        }

        // Query words with 1..5 occurrences: point lookups whose result
        // size stays constant as the corpus grows.
        std::map<std::string, int> word_count;
        for (const auto& row : tweets.cells)
            for (std::size_t c = 1; c < row.size(); ++c)
                ++word_count[row[c]];
        std::vector<std::string> qwords;
        for (const auto& [w, n] : word_count)
            if (n >= 1 && n <= 5)
                qwords.push_back(w);
        std::mt19937_64 rng(mix(cfg.seed, size + 1));
        std::shuffle(qwords.begin(), qwords.end(), rng);
        if (qwords.size() > 200)
            qwords.resize(200);
        if (qwords.empty())
            throw CorrectnessFailure("no low-frequency query words in the corpus");

        std::vector<std::string> plain_keys, masked_keys;
        for (const auto& w : qwords) {
            plain_keys.push_back("word|" + w);
            masked_keys.push_back(crypto::str_mask(plain_keys.back(), keys, tpolicy.rows));
        }

        // Correctness gate: every masked query unmasks to its plain twin.
        for (std::size_t i = 0; i < qwords.size(); ++i) {
            const auto plain_res =
                plain_t.query(KeySpec::exact({plain_keys[i]}), KeySpec::all());
            const auto masked_res =
                masked_t.query(KeySpec::exact({masked_keys[i]}), KeySpec::all());
            const auto unmasked =
                crypto::unmask_array({masked_res, tpolicy, keys.kdf_salt}, keys);
            if (plain_res.empty() || unmasked != plain_res)
                throw CorrectnessFailure("masked query did not unmask to the plain result");
        }

        auto add = [&](const char* phase, const std::function<void()>& setup,
                       const std::function<void()>& work) {
            out.push_back(
                {"tweets", size, phase, median_time(cfg.reps, setup, work), cfg.reps});
        };
        auto wipe = [&](const char* base) {
            return [dir, base] {
                for (const char* suffix : {".log", ".meta", ".lock"}) {
                    std::filesystem::remove(dir / (std::string(base) + suffix));
                    std::filesystem::remove(dir / (std::string(base) + "_t" + suffix));
                }
            };
        };

        add("insert_plain", wipe("ins_p"), [&] {
            store::Table tm = store::Table::open(dir, "ins_p", {true, false});
            keep(tm.put(E));
            store::Table tt = store::Table::open(dir, "ins_p_t", {true, false});
            keep(tt.put(Et));
        });
        add("insert_masked", wipe("ins_m"), [&] {
            store::Table tm = store::Table::open(dir, "ins_m", {true, false});
            keep(tm.put(Em.payload));
            store::Table tt = store::Table::open(dir, "ins_m_t", {true, false});
            keep(tt.put(Emt.payload));
        });
        add("query_plain", [] {}, [&] {
            for (const auto& k : plain_keys)
                keep(plain_t.query(KeySpec::exact({k}), KeySpec::all()).nnz());
        });
        add("query_masked", [] {}, [&] {
            for (const auto& k : masked_keys)
                keep(masked_t.query(KeySpec::exact({k}), KeySpec::all()).nnz());
        });
    }
    return out;
}

void write_csv(std::ostream& out, const std::vector<BenchRecord>& records) {
    out << "workload,size,phase,seconds,reps\n";
    for (const auto& r : records)
        out << r.workload << ',' << r.size << ',' << r.phase << ',' << format_double(r.seconds)
            << ',' << r.reps << '\n';
}

} // namespace cmd::bench
