#pragma once
#include <atomic>
#include <cstddef>
#include <exception>

// Batch-kernel executor. Every scan in the library maps independent work
// items onto pre-sized output slots, so the OpenMP path is bit-identical to
// the serial reference path regardless of scheduling; reductions are done
// afterwards in index order. The serial path is kept as the reference
// implementation for tests and for the kernel benchmark.

namespace hyplab::par {

enum class Exec { serial, openmp };

Exec& default_exec();   // process-wide default, openmp when compiled in

template <class F>
void for_index(std::size_t n, F&& body, Exec mode) {
    if (mode == Exec::serial) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
#ifdef _OPENMP
    // exceptions cannot cross the parallel region: capture the first one and
    // rethrow after the join
    std::exception_ptr err = nullptr;
    std::atomic<bool> failed{false};
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        if (failed.load(std::memory_order_relaxed)) continue;
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(hyplab_par_err)
            {
                if (!failed.exchange(true)) err = std::current_exception();
            }
        }
    }
    if (err) std::rethrow_exception(err);
#else
    for (std::size_t i = 0; i < n; ++i) body(i);
#endif
}

template <class F>
void for_index(std::size_t n, F&& body) {
    for_index(n, static_cast<F&&>(body), default_exec());
}

} // namespace hyplab::par
