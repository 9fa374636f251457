#include <omp.h>

#include <map>
#include <random>
#include <utility>
#include <vector>

#include "doctest.h"

#include "cmd/assoc_array.hpp"
#include "test_util.hpp"

using namespace cmd;
using testutil::random_array;

namespace {
Value n(double v) { return Value::num(v); }
}

TEST_CASE("construction sums numeric duplicates and drops zeros") {
    AssociativeArray a = AssociativeArray::from_triples({
        {"r1", "c1", n(2)},
        {"r1", "c1", n(3)},
        {"r2", "c2", n(0)},
        {"r1", "c2", n(-1)},
        {"r1", "c2", n(1)},
    });
    a.check_invariants();
    CHECK(a.nnz() == 1);
    CHECK(a.at("r1", "c1")->num_value() == 5.0);
    CHECK(!a.at("r2", "c2").has_value());
    // r2/c2 carried only zeros, so the keys must not linger.
    CHECK(a.row_keys() == std::vector<std::string>{"r1"});
    CHECK(a.col_keys() == std::vector<std::string>{"c1"});
}

TEST_CASE("last-wins keeps the final duplicate, strings included") {
    AssociativeArray a = AssociativeArray::from_triples(
        {{"r", "c", Value::str("first")}, {"r", "c", Value::str("second")}},
        CollisionRule::LastWins);
    CHECK(a.at("r", "c")->str_value() == "second");

    AssociativeArray b = AssociativeArray::from_triples({{"r", "c", n(7)}, {"r", "c", n(2)}},
                                                        CollisionRule::LastWins);
    CHECK(b.at("r", "c")->num_value() == 2.0);
}

TEST_CASE("mixed-type duplicates and empty keys are rejected") {
    CHECK_THROWS_AS(
        AssociativeArray::from_triples({{"r", "c", n(1)}, {"r", "c", Value::str("x")}}),
        MixedTypeCollision);
    CHECK_THROWS_AS(AssociativeArray::from_triples({{"", "c", n(1)}}), InvalidValue);
    CHECK_THROWS_AS(AssociativeArray::from_triples({{"r", "", n(1)}}), InvalidValue);
}

TEST_CASE("triple roundtrip reproduces the array") {
    std::mt19937_64 rng(3);
    for (int it = 0; it < 50; ++it) {
        AssociativeArray a = random_array(rng, 12, 9, 0.3, true);
        CHECK(AssociativeArray::from_triples(a.to_triples()) == a);
    }
}

TEST_CASE("select narrows by exact, prefix and range specs") {
    AssociativeArray a = AssociativeArray::from_triples({
        {"alpha", "x|1", n(1)},
        {"beta", "x|2", n(2)},
        {"gamma", "y|1", n(3)},
    });

    AssociativeArray ex = select(a, KeySpec::exact({"beta", "nope"}), KeySpec::all());
    CHECK(ex.nnz() == 1);
    CHECK(ex.at("beta", "x|2").has_value());

    AssociativeArray pre = select(a, KeySpec::all(), KeySpec::prefix("x|"));
    CHECK(pre.nnz() == 2);
    CHECK(pre.col_keys() == std::vector<std::string>{"x|1", "x|2"});

    AssociativeArray rng_sel = select(a, KeySpec::range("alpha", "beta"), KeySpec::all());
    CHECK(rng_sel.nnz() == 2);

    CHECK(select(a, KeySpec::exact({}), KeySpec::all()).empty());
    CHECK_THROWS_AS(KeySpec::range("z", "a"), InvalidRange);
}

TEST_CASE("selecting in two steps equals selecting once") {
    std::mt19937_64 rng(4);
    for (int it = 0; it < 200; ++it) {
        AssociativeArray a = random_array(rng, 15, 15, 0.25, true);
        KeySpec rs = KeySpec::prefix("r00");
        KeySpec cs = KeySpec::range("c0003", "c0011");
        CHECK(select(select(a, rs, KeySpec::all()), KeySpec::all(), cs) == select(a, rs, cs));
        CHECK(select(a, KeySpec::all(), KeySpec::all()) == a);
    }
}

TEST_CASE("combine matches keys, not positions") {
    AssociativeArray a = AssociativeArray::from_triples({{"r1", "c1", n(2)}, {"r1", "c2", n(3)}});
    AssociativeArray b = AssociativeArray::from_triples({{"r1", "c2", n(5)}, {"r9", "c9", n(7)}});

    AssociativeArray add = combine(a, b, CombineOp::Add);
    CHECK(add.at("r1", "c1")->num_value() == 2.0);
    CHECK(add.at("r1", "c2")->num_value() == 8.0);
    CHECK(add.at("r9", "c9")->num_value() == 7.0);

    AssociativeArray sub = combine(a, b, CombineOp::Sub);
    CHECK(sub.at("r1", "c2")->num_value() == -2.0);
    CHECK(sub.at("r9", "c9")->num_value() == -7.0);

    AssociativeArray mn = combine(a, b, CombineOp::Min);
    CHECK(mn.nnz() == 1); // intersection only
    CHECK(mn.at("r1", "c2")->num_value() == 3.0);

    AssociativeArray mx = combine(a, b, CombineOp::Max);
    CHECK(mx.at("r1", "c2")->num_value() == 5.0);
    CHECK(mx.nnz() == 3);
}

TEST_CASE("combine agrees with a map-built oracle") {
    std::mt19937_64 rng(5);
    for (int it = 0; it < 300; ++it) {
        AssociativeArray a = random_array(rng, 10, 10, 0.3);
        AssociativeArray b = random_array(rng, 10, 10, 0.3);
        using Key = std::pair<std::string, std::string>;
        std::map<Key, double> av, bv;
        for (const auto& t : a.to_triples()) av[{t.row, t.col}] = t.val.num_value();
        for (const auto& t : b.to_triples()) bv[{t.row, t.col}] = t.val.num_value();
        std::map<Key, char> keys;
        for (const auto& [k, _] : av) keys[k] |= 1;
        for (const auto& [k, _] : bv) keys[k] |= 2;
        for (CombineOp op : {CombineOp::Add, CombineOp::Sub, CombineOp::Min, CombineOp::Max}) {
            std::vector<Triple> expect;
            for (const auto& [k, side] : keys) {
                double v = 0;
                if (side == 3) {
                    double x = av[k], y = bv[k];
                    v = op == CombineOp::Add   ? x + y
                        : op == CombineOp::Sub ? x - y
                        : op == CombineOp::Min ? std::min(x, y)
                                               : std::max(x, y);
                } else if (op == CombineOp::Min) {
                    continue; // intersection semantics
                } else {
                    v = side == 1 ? av[k] : (op == CombineOp::Sub ? -bv[k] : bv[k]);
                }
                if (v != 0.0) expect.push_back({k.first, k.second, n(v)});
            }
            CHECK(combine(a, b, op) == AssociativeArray::from_triples(std::move(expect)));
        }
    }
}

TEST_CASE("string cells refuse arithmetic they cannot carry") {
    AssociativeArray s = AssociativeArray::from_triples({{"r", "c", Value::str("x")}});
    AssociativeArray v = AssociativeArray::from_triples({{"r", "c", n(1)}});
    CHECK_THROWS_AS(combine(s, v, CombineOp::Add), TypeMismatch);
    CHECK_THROWS_AS(combine(s, s, CombineOp::Sub), TypeMismatch);
    CHECK_THROWS_AS(threshold(s, 0.0), TypeMismatch);
    // Strings pass through Add/Max when unpaired.
    AssociativeArray t = AssociativeArray::from_triples({{"q", "c", n(1)}});
    CHECK(combine(s, t, CombineOp::Add).at("r", "c")->str_value() == "x");
}

TEST_CASE("product contracts over matching keys only") {
    AssociativeArray a = AssociativeArray::from_triples({
        {"r1", "j1", n(2)},
        {"r1", "j2", n(3)},
        {"r2", "j2", n(4)},
    });
    AssociativeArray b = AssociativeArray::from_triples({
        {"j2", "k1", n(5)},
        {"jX", "k1", n(100)}, // never matches
    });
    AssociativeArray c = multiply(a, b);
    CHECK(c.nnz() == 2);
    CHECK(c.at("r1", "k1")->num_value() == 15.0);
    CHECK(c.at("r2", "k1")->num_value() == 20.0);
    CHECK(multiply(a, AssociativeArray{}).empty());
}

TEST_CASE("product matches the dense oracle and the serial reference") {
    std::mt19937_64 rng(6);
    for (int it = 0; it < 200; ++it) {
        AssociativeArray a = random_array(rng, 1 + rng() % 8, 1 + rng() % 8, 0.4, true);
        AssociativeArray b = random_array(rng, 1 + rng() % 8, 1 + rng() % 8, 0.4, true);
        AssociativeArray via_kernel = multiply(a, b);
        via_kernel.check_invariants();
        CHECK(via_kernel == testutil::dense_multiply(a, b));
        CHECK(via_kernel == reference::multiply(a, b));
        // Contraction against the transpose keys the same strings.
        AssociativeArray sq = multiply(a, transpose(a));
        sq.check_invariants();
        CHECK(sq == testutil::dense_multiply(a, transpose(a)));
    }
}

TEST_CASE("semiring laws hold on integer-valued instances") {
    std::mt19937_64 rng(7);
    for (int it = 0; it < 200; ++it) {
        AssociativeArray a = random_array(rng, 6, 6, 0.4);
        AssociativeArray b = random_array(rng, 6, 6, 0.4);
        AssociativeArray c = random_array(rng, 6, 6, 0.4);
        CHECK(multiply(multiply(a, b), c) == multiply(a, multiply(b, c)));
        CHECK(multiply(a, combine(b, c, CombineOp::Add)) ==
              combine(multiply(a, b), multiply(a, c), CombineOp::Add));
        CHECK(multiply(combine(a, b, CombineOp::Add), c) ==
              combine(multiply(a, c), multiply(b, c), CombineOp::Add));
    }
}

TEST_CASE("transpose is an involution and flips products") {
    std::mt19937_64 rng(8);
    for (int it = 0; it < 100; ++it) {
        AssociativeArray a = random_array(rng, 10, 7, 0.3, true);
        AssociativeArray b = random_array(rng, 7, 10, 0.3);
        transpose(a).check_invariants();
        CHECK(transpose(transpose(a)) == a);
        CHECK(transpose(multiply(a, b)) == multiply(transpose(b), transpose(a)));
    }
}

TEST_CASE("threshold keeps strictly greater values and drops empty keys") {
    AssociativeArray a = AssociativeArray::from_triples({
        {"r1", "c1", n(1)},
        {"r1", "c2", n(2)},
        {"r2", "c1", n(3)},
    });
    AssociativeArray t = threshold(a, 2.0);
    t.check_invariants();
    CHECK(t.nnz() == 1);
    CHECK(t.row_keys() == std::vector<std::string>{"r2"});
    CHECK(threshold(a, 0.0) == a);
    CHECK(threshold(a, 99.0).empty());
}

TEST_CASE("property sweep: closure invariants over composed operations") {
    std::mt19937_64 rng(9);
    for (int it = 0; it < 1000; ++it) {
        AssociativeArray a = random_array(rng, 1 + rng() % 12, 1 + rng() % 12, 0.3, true);
        AssociativeArray b = random_array(rng, 1 + rng() % 12, 1 + rng() % 12, 0.3);
        AssociativeArray a_num = random_array(rng, 1 + rng() % 12, 1 + rng() % 12, 0.3);
        AssociativeArray c;
        switch (rng() % 5) {
        case 0: c = multiply(a, transpose(b)); break;
        case 1: c = combine(a_num, b, CombineOp::Add); break;
        case 2: c = combine(a_num, b, CombineOp::Max); break;
        case 3: c = select(a, KeySpec::prefix("r000"), KeySpec::all()); break;
        default: c = threshold(multiply(a, transpose(a)), 1.0); break;
        }
        c.check_invariants();
        CHECK(AssociativeArray::from_triples(c.to_triples()) == c);
    }
}

TEST_CASE("product is bit-identical across thread counts") {
    std::mt19937_64 rng(10);
    AssociativeArray a = random_array(rng, 60, 60, 0.15);
    AssociativeArray b = random_array(rng, 60, 60, 0.15);
    const int before = omp_get_max_threads();
    omp_set_num_threads(1);
    AssociativeArray c1 = multiply(a, transpose(b));
    omp_set_num_threads(4); // oversubscribes a small machine; that is the point
    AssociativeArray c4 = multiply(a, transpose(b));
    omp_set_num_threads(before);
    CHECK(c1 == c4);
}
