// cmdtool: command-line front end for the masked associative-array
// pipeline. Subcommands cover schema explosion, masking, algebra,
// analytics, the embedded triple store, and the benchmark harness.
// Exit codes: 0 success, 1 usage error, 2 data/crypto/io error.
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <omp.h>

#include "CLI11.hpp"

#include "cmd/analytics.hpp"
#include "cmd/assoc_array.hpp"
#include "cmd/bench.hpp"
#include "cmd/crypto/keys.hpp"
#include "cmd/crypto/mask.hpp"
#include "cmd/error.hpp"
#include "cmd/schema.hpp"
#include "cmd/store.hpp"
#include "cmd/triple_text.hpp"

namespace {

using namespace cmd;

std::string slurp(const std::string& path) {
    std::ostringstream os;
    if (path == "-") {
        os << std::cin.rdbuf();
    } else {
        std::ifstream f(path, std::ios::binary);
        if (!f) throw NotFound("no such input file: " + path);
        os << f.rdbuf();
    }
    return os.str();
}

// Output is produced only after the computation succeeded, so a failed
// run never leaves a file behind.
void emit(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoFailure("cannot open output file: " + path);
    f << text;
    f.flush();
    if (!f) throw IoFailure("short write: " + path);
}

bool looks_masked(const std::string& text) { return text.rfind("salt=", 0) == 0; }

crypto::Salt128 parse_salt(const std::string& hex) {
    std::string bytes = crypto::from_hex(hex);
    if (bytes.size() != 16) throw ParseError("salt must be 32 hex digits");
    crypto::Salt128 s{};
    std::memcpy(s.data(), bytes.data(), s.size());
    return s;
}

// Row/column selector syntax: "" or ":" selects everything, "lo:hi" an
// inclusive range, a trailing '*' a prefix, anything else a
// comma-separated exact list. Colons win over stars.
KeySpec parse_spec(const std::string& text) {
    if (text.empty() || text == ":") return KeySpec::all();
    if (auto p = text.find(':'); p != std::string::npos)
        return KeySpec::range(text.substr(0, p), text.substr(p + 1));
    if (text.back() == '*') return KeySpec::prefix(text.substr(0, text.size() - 1));
    std::vector<std::string> keys;
    std::size_t start = 0;
    while (true) {
        auto comma = text.find(',', start);
        keys.push_back(text.substr(start, comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return KeySpec::exact(std::move(keys));
}

std::string masked_header_text(const crypto::Salt128& salt, const crypto::MaskPolicy& policy) {
    std::ostringstream os;
    crypto::write_masked(os, crypto::MaskedArray{AssociativeArray{}, policy, salt});
    return os.str();
}

crypto::MaskPolicy load_policy(const std::string& path) {
    std::istringstream in(slurp(path));
    return crypto::read_policy(in);
}

struct MaskFlags {
    std::string password;
    std::string policy_file;
    std::string salt_hex;

    crypto::MaskPolicy policy() const {
        return policy_file.empty() ? crypto::MaskPolicy{} : load_policy(policy_file);
    }
    crypto::Salt128 salt() const {
        return salt_hex.empty() ? crypto::random_salt() : parse_salt(salt_hex);
    }
};

void run_explode(const std::string& in, const std::string& out, bool no_header,
                 char delimiter) {
    std::istringstream is(slurp(in));
    DenseTable t = parse_dense_csv(is, !no_header);
    AssociativeArray a = explode(t, ExplodeConfig{delimiter});
    emit(out, to_triple_text(a));
}

void run_mask(const std::string& in, const std::string& out, const MaskFlags& mf) {
    AssociativeArray a = from_triple_text(slurp(in));
    crypto::MaskPolicy policy = mf.policy();
    crypto::MaskKeySet keys = crypto::derive_keys(mf.password, mf.salt());
    crypto::MaskedArray m = crypto::mask_array(a, policy, keys);
    std::ostringstream os;
    crypto::write_masked(os, m);
    emit(out, os.str());
}

void run_unmask(const std::string& in, const std::string& out, const std::string& password) {
    std::istringstream is(slurp(in));
    crypto::MaskedArray m = crypto::read_masked(is);
    crypto::MaskKeySet keys = crypto::derive_keys(password, m.salt);
    AssociativeArray a = crypto::unmask_array(m, keys);
    emit(out, to_triple_text(a));
}

void run_multiply(const std::string& in_a, const std::string& in_b, const std::string& out) {
    std::string ta = slurp(in_a), tb = slurp(in_b);
    if (looks_masked(ta) != looks_masked(tb))
        throw SchemeMismatch("cannot multiply a masked table with a plain one");
    if (!looks_masked(ta)) {
        AssociativeArray c = multiply(from_triple_text(ta), from_triple_text(tb));
        emit(out, to_triple_text(c));
        return;
    }
    std::istringstream sa(ta), sb(tb);
    crypto::MaskedArray ma = crypto::read_masked(sa), mb = crypto::read_masked(sb);
    if (ma.salt != mb.salt) throw SchemeMismatch("inputs are masked under different salts");
    if (ma.policy.values != crypto::Scheme::Clear || mb.policy.values != crypto::Scheme::Clear)
        throw PolicyMismatch("masked multiply needs CLEAR values");
    crypto::MaskedArray mc{multiply(ma.payload, mb.payload),
                           crypto::MaskPolicy{ma.policy.rows, mb.policy.cols,
                                              crypto::Scheme::Clear},
                           ma.salt};
    std::ostringstream os;
    crypto::write_masked(os, mc);
    emit(out, os.str());
}

void run_dnamatch(const std::string& in, const std::string& out, std::size_t k, double cut,
                  bool masked, const MaskFlags& mf) {
    std::istringstream is(slurp(in));
    std::vector<SequenceRecord> seqs = parse_fasta(is);
    if (!masked) {
        MatchResult r = dna_match(kmerize(seqs, k), cut);
        emit(out, to_triple_text(r.X));
        return;
    }
    crypto::MaskPolicy policy = mf.policy();
    crypto::MaskKeySet keys = crypto::derive_keys(mf.password, mf.salt());
    MaskedMatch mm = masked_dna_match(seqs, k, cut, policy, keys);
    if (!(mm.unmasked == mm.plain.X))
        throw CorrectnessFailure("masked match does not unmask to the plain match");
    std::cerr << "mask_seconds=" << mm.mask_seconds << "\n"
              << "compute_seconds=" << mm.compute_seconds << "\n"
              << "unmask_seconds=" << mm.unmask_seconds << "\n";
    crypto::MaskedArray m{mm.masked.X,
                          crypto::MaskPolicy{policy.rows, policy.rows, crypto::Scheme::Clear},
                          keys.kdf_salt};
    std::ostringstream os;
    crypto::write_masked(os, m);
    emit(out, os.str());
}

void run_loggraph(const std::string& in, const std::string& out, const std::string& a,
                  const std::string& b) {
    std::string text = slurp(in);
    if (looks_masked(text))
        throw SchemeMismatch("loggraph expects a plain exploded table; unmask first");
    AssociativeArray g = log_graph(from_triple_text(text), a, b);
    emit(out, to_triple_text(g));
}

void run_put(const std::string& in, const std::string& dir, const std::string& table) {
    std::string text = slurp(in);
    store::Table t = store::Table::open(dir, table, {.create_if_missing = true});
    std::size_t n = 0;
    if (looks_masked(text)) {
        std::istringstream is(text);
        crypto::MaskedArray m = crypto::read_masked(is);
        n = t.put(m.payload);
        t.set_meta(masked_header_text(m.salt, m.policy));
    } else {
        n = t.put(from_triple_text(text));
    }
    std::cout << "inserted " << n << " entries into " << table << "\n";
}

void run_query(const std::string& dir, const std::string& table, const std::string& rows,
               const std::string& cols, const std::string& out, bool scan) {
    store::Table t = store::Table::open(dir, table);
    AssociativeArray r =
        scan ? t.scan_all() : t.query(parse_spec(rows), parse_spec(cols));
    std::ostringstream os;
    if (t.meta()) os << *t.meta();
    write_triples(os, r);
    emit(out, os.str());
}

void run_compact(const std::string& dir, const std::string& table) {
    store::Table t = store::Table::open(dir, table);
    t.compact();
    std::cout << "compacted " << table << " to " << t.live_entries() << " entries\n";
}

void run_strmask(const std::string& word, const std::string& out, const std::string& password,
                 const std::string& scheme_name, const std::string& salt_hex,
                 const std::string& from_file, const std::string& dir,
                 const std::string& table) {
    crypto::Salt128 salt{};
    crypto::Scheme scheme = crypto::Scheme::Det;
    if (!salt_hex.empty()) {
        salt = parse_salt(salt_hex);
    } else if (!from_file.empty()) {
        std::istringstream is(slurp(from_file));
        crypto::MaskPolicy policy;
        std::tie(salt, policy) = crypto::read_masked_header(is);
        scheme = policy.rows;
    } else if (!dir.empty() && !table.empty()) {
        store::Table t = store::Table::open(dir, table);
        if (!t.meta()) throw InvalidValue("table " + table + " has no mask header");
        std::istringstream is(*t.meta());
        crypto::MaskPolicy policy;
        std::tie(salt, policy) = crypto::read_masked_header(is);
        scheme = policy.rows;
    } else {
        throw CLI::RequiredError("one of --salt, --from, or --store with --table");
    }
    if (!scheme_name.empty()) scheme = crypto::parse_scheme(scheme_name);
    crypto::MaskKeySet keys = crypto::derive_keys(password, salt);
    emit(out, crypto::str_mask(word, keys, scheme) + "\n");
}

void run_bench(const std::string& workload, const std::string& out, bench::RunConfig cfg,
               const std::string& policy_file) {
    if (!policy_file.empty()) cfg.policy = load_policy(policy_file);
    std::vector<bench::BenchRecord> records;
    if (workload == "dna") {
        records = bench::bench_dna(cfg);
    } else if (workload == "tweets") {
        records = bench::bench_tweets(cfg);
    } else {
        throw InvalidValue("unknown workload: " + workload);
    }
    std::ostringstream os;
    bench::write_csv(os, records);
    emit(out, os.str());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"masked associative-array toolkit"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "cap OpenMP threads (0 = library default)");
    auto apply_threads = [&threads] {
        if (threads > 0) omp_set_num_threads(threads);
    };

    std::string in = "-", out = "-", in_b;
    MaskFlags mf;
    bool no_header = false;
    std::string delimiter = "|";
    std::size_t k = 10;
    double cut = 0.0;
    bool plain = false, masked = false;
    std::string prefix_a, prefix_b;
    std::string dir, table, rows_spec, cols_spec;
    std::string word, scheme, salt_hex, from_file;
    std::string workload;
    bench::RunConfig cfg;

    auto* c_explode = app.add_subcommand(
        "explode", "dense CSV (first field = row id) -> sparse triple text");
    c_explode->add_option("input", in, "CSV file or - for stdin");
    c_explode->add_option("--out", out, "output file (default stdout)");
    c_explode->add_flag("--no-header", no_header, "treat the first CSV record as data");
    c_explode->add_option("--delimiter", delimiter, "name/value separator (default |)")
        ->check(CLI::Validator(
            [](std::string& s) { return s.size() == 1 ? "" : "one character"; }, "CHAR"));
    c_explode->callback([&] {
        apply_threads();
        run_explode(in, out, no_header, delimiter[0]);
    });

    auto add_mask_flags = [&mf](CLI::App* c, bool required) {
        auto* p = c->add_option("--password", mf.password, "masking password");
        if (required) p->required();
        c->add_option("--policy", mf.policy_file,
                      "policy file: rows=/cols=/values= lines (default DET,DET,CLEAR)");
        c->add_option("--salt", mf.salt_hex, "table salt, 32 hex digits (default random)");
    };

    auto* c_mask = app.add_subcommand("mask", "triple text -> masked table file");
    c_mask->add_option("input", in, "triple file or - for stdin");
    c_mask->add_option("--out", out, "output file (default stdout)");
    add_mask_flags(c_mask, true);
    c_mask->callback([&] {
        apply_threads();
        run_mask(in, out, mf);
    });

    auto* c_unmask = app.add_subcommand("unmask", "masked table file -> triple text");
    c_unmask->add_option("input", in, "masked file or - for stdin");
    c_unmask->add_option("--out", out, "output file (default stdout)");
    c_unmask->add_option("--password", mf.password, "masking password")->required();
    c_unmask->callback([&] {
        apply_threads();
        run_unmask(in, out, mf.password);
    });

    auto* c_mult = app.add_subcommand(
        "multiply", "key-matched product of two tables, both plain or both masked");
    c_mult->add_option("a", in, "left table file")->required();
    c_mult->add_option("b", in_b, "right table file")->required();
    c_mult->add_option("--out", out, "output file (default stdout)");
    c_mult->callback([&] {
        apply_threads();
        run_multiply(in, in_b, out);
    });

    auto* c_dna = app.add_subcommand(
        "dnamatch", "FASTA -> shared-k-mer match counts (sequence id x sequence id)");
    c_dna->add_option("input", in, "FASTA file or - for stdin");
    c_dna->add_option("--out", out, "output file (default stdout)");
    c_dna->add_option("--k", k, "k-mer length (default 10)");
    c_dna->add_option("--cut", cut, "keep counts strictly above this (default 0)");
    auto* f_plain = c_dna->add_flag("--plain", plain, "plaintext pipeline (default)");
    auto* f_masked =
        c_dna->add_flag("--masked", masked, "masked pipeline; emits a masked table");
    f_masked->excludes(f_plain);
    add_mask_flags(c_dna, false);
    c_dna->callback([&] {
        apply_threads();
        if (masked && mf.password.empty())
            throw CLI::RequiredError("--password (with --masked)");
        run_dnamatch(in, out, k, cut, masked, mf);
    });

    auto* c_graph = app.add_subcommand(
        "loggraph", "co-occurrence counts between two column families of an exploded table");
    c_graph->add_option("input", in, "exploded triple file or - for stdin");
    c_graph->add_option("--a", prefix_a, "row-side column prefix, e.g. 'user|'")->required();
    c_graph->add_option("--b", prefix_b, "col-side column prefix, e.g. 'word|'")->required();
    c_graph->add_option("--out", out, "output file (default stdout)");
    c_graph->callback([&] {
        apply_threads();
        run_loggraph(in, out, prefix_a, prefix_b);
    });

    auto* c_put = app.add_subcommand(
        "put", "append a triple or masked file to a store table (created if missing)");
    c_put->add_option("input", in, "triple or masked file, - for stdin");
    c_put->add_option("--store", dir, "store directory")->required();
    c_put->add_option("--table", table, "table name")->required();
    c_put->callback([&] {
        apply_threads();
        run_put(in, dir, table);
    });

    auto* c_query = app.add_subcommand("query", "select rows/cols from a store table");
    c_query->add_option("--store", dir, "store directory")->required();
    c_query->add_option("--table", table, "table name")->required();
    c_query->add_option("--rows", rows_spec,
                        "row selector: '' all, 'lo:hi' range, 'p*' prefix, 'a,b' exact");
    c_query->add_option("--cols", cols_spec, "column selector, same syntax");
    c_query->add_option("--out", out, "output file (default stdout)");
    c_query->callback([&] {
        apply_threads();
        run_query(dir, table, rows_spec, cols_spec, out, false);
    });

    auto* c_scan = app.add_subcommand("scan", "dump every live entry of a store table");
    c_scan->add_option("--store", dir, "store directory")->required();
    c_scan->add_option("--table", table, "table name")->required();
    c_scan->add_option("--out", out, "output file (default stdout)");
    c_scan->callback([&] {
        apply_threads();
        run_query(dir, table, "", "", out, true);
    });

    auto* c_compact = app.add_subcommand(
        "compact", "rewrite a store table's log sorted and collapsed");
    c_compact->add_option("--store", dir, "store directory")->required();
    c_compact->add_option("--table", table, "table name")->required();
    c_compact->callback([&] {
        apply_threads();
        run_compact(dir, table);
    });

    auto* c_str = app.add_subcommand(
        "strmask", "mask one key the way a table's keys were masked, for querying");
    c_str->add_option("word", word, "key text to mask")->required();
    c_str->add_option("--password", mf.password, "masking password")->required();
    c_str->add_option("--scheme", scheme, "DET or OPE (default: the source's row scheme)");
    c_str->add_option("--salt", salt_hex, "table salt, 32 hex digits");
    c_str->add_option("--from", from_file, "masked file to take salt and scheme from");
    c_str->add_option("--store", dir, "store directory holding --table");
    c_str->add_option("--table", table, "store table to take salt and scheme from");
    c_str->add_option("--out", out, "output file (default stdout)");
    c_str->callback([&] {
        apply_threads();
        run_strmask(word, out, mf.password, scheme, salt_hex, from_file, dir, table);
    });

    auto* c_bench = app.add_subcommand("bench", "timed workloads with correctness gates; CSV out");
    c_bench->add_option("--workload", workload, "dna or tweets")->required();
    c_bench->add_option("--sizes", cfg.sizes, "strictly increasing sizes, e.g. 1000,10000")
        ->delimiter(',');
    c_bench->add_option("--seed", cfg.seed, "corpus seed (default 42)");
    c_bench->add_option("--k", cfg.k, "k-mer length for dna (default 10)");
    c_bench->add_option("--cut", cfg.cut, "match threshold for dna (default 0)");
    c_bench->add_option("--policy", mf.policy_file, "policy file (default DET,DET,CLEAR)");
    c_bench->add_option("--password", cfg.password, "masking password (default 'bench')");
    c_bench->add_option("--store", dir, "store directory (tweets workload)");
    c_bench->add_option("--reps", cfg.reps, "repetitions per phase, >= 5");
    c_bench->add_option("--out", out, "CSV output file (default stdout)");
    c_bench->callback([&] {
        apply_threads();
        cfg.store_dir = dir;
        run_bench(workload, out, cfg, mf.policy_file);
    });

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const cmd::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
