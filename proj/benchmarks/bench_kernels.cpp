// Kernel benchmark: the OpenMP product kernel against the serial
// string-keyed reference, and key masking at one thread against the full
// thread count. Results are checked equal before anything is timed.
#include <chrono>
#include <cstdint>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <omp.h>

#include "CLI11.hpp"

#include "cmd/assoc_array.hpp"
#include "cmd/crypto/mask.hpp"
#include "cmd/error.hpp"

namespace {

using namespace cmd;

std::string padded(char tag, std::uint64_t i) {
    std::string digits = std::to_string(i);
    return tag + std::string(6 - std::min<std::size_t>(6, digits.size()), '0') + digits;
}

AssociativeArray gen(std::uint64_t seed, std::size_t n_rows, std::size_t n_cols,
                     std::size_t nnz) {
    std::mt19937_64 rng(seed);
    std::vector<Triple> t;
    t.reserve(nnz);
    for (std::size_t i = 0; i < nnz; ++i)
        t.push_back({padded('r', rng() % n_rows), padded('c', rng() % n_cols),
                     Value::num(1.0 + double(rng() % 4))});
    return AssociativeArray::from_triples(std::move(t), CollisionRule::LastWins);
}

template <class F> double median_seconds(int reps, F&& work) {
    work(); // warm-up, discarded
    std::vector<double> times;
    for (int i = 0; i < reps; ++i) {
        auto t0 = std::chrono::steady_clock::now();
        work();
        auto t1 = std::chrono::steady_clock::now();
        times.push_back(std::chrono::duration<double>(t1 - t0).count());
    }
    std::sort(times.begin(), times.end());
    std::size_t n = times.size();
    return n % 2 ? times[n / 2] : (times[n / 2 - 1] + times[n / 2]) / 2;
}

volatile std::size_t g_sink = 0;

void keep(std::size_t v) { g_sink = g_sink + v; }

void row(const char* kernel, std::size_t nnz, const std::string& variant, double s) {
    std::cout << kernel << "," << nnz << "," << variant << "," << s << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"product and masking kernels: serial reference vs OpenMP"};
    std::vector<std::size_t> sizes{20000, 100000, 400000};
    int reps = 5;
    std::uint64_t seed = 7;
    app.add_option("--sizes", sizes, "nnz per operand")->delimiter(',');
    app.add_option("--reps", reps, "timed repetitions per variant");
    app.add_option("--seed", seed, "corpus seed");
    CLI11_PARSE(app, argc, argv);

    int max_threads = omp_get_max_threads();
    std::cout << "kernel,nnz,variant,seconds\n";
    try {
        crypto::MaskKeySet keys = crypto::derive_keys("kernels", crypto::random_salt());
        for (std::size_t nnz : sizes) {
            std::size_t side = nnz / 50 + 1; // ~50 entries per row/col
            AssociativeArray a = gen(seed, side, side, nnz);
            // Same column space as a, so the contraction has real work.
            AssociativeArray b = transpose(gen(seed + 1, side, side, nnz));

            if (!(reference::multiply(a, b) == multiply(a, b)))
                throw CorrectnessFailure("parallel product disagrees with the reference");

            row("multiply", nnz, "reference_serial",
                median_seconds(reps, [&] { keep(reference::multiply(a, b).nnz()); }));
            omp_set_num_threads(1);
            row("multiply", nnz, "parallel_t1",
                median_seconds(reps, [&] { keep(multiply(a, b).nnz()); }));
            omp_set_num_threads(max_threads);
            row("multiply", nnz, "parallel_t" + std::to_string(max_threads),
                median_seconds(reps, [&] { keep(multiply(a, b).nnz()); }));

            crypto::MaskPolicy policy; // DET keys, CLEAR values
            omp_set_num_threads(1);
            row("mask_keys", nnz, "parallel_t1",
                median_seconds(reps,
                               [&] { keep(crypto::mask_array(a, policy, keys).payload.nnz()); }));
            omp_set_num_threads(max_threads);
            row("mask_keys", nnz, "parallel_t" + std::to_string(max_threads),
                median_seconds(reps,
                               [&] { keep(crypto::mask_array(a, policy, keys).payload.nnz()); }));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
