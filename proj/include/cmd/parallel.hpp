#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>

#include <omp.h>

namespace cmd {

// OpenMP loop that carries the first thrown exception out of the parallel
// region instead of terminating.
template <typename F>
void parallel_for_guarded(std::size_t n, F&& f) {
    std::exception_ptr err = nullptr;
#pragma omp parallel
    {
        std::exception_ptr local = nullptr;
#pragma omp for schedule(dynamic, 64)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
            if (local)
                continue;
            try {
                f(static_cast<std::size_t>(i));
            } catch (...) {
                local = std::current_exception();
            }
        }
        if (local) {
#pragma omp critical(cmd_parallel_guard)
            if (!err)
                err = local;
        }
    }
    if (err)
        std::rethrow_exception(err);
}

} // namespace cmd
