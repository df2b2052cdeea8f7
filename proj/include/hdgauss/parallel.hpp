#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "hdgauss/rng.hpp"

namespace hdgauss {

// Deterministic replicated map: result[r] = f(r, derive(base, r)). Workers
// pull indices from a shared counter and write into preallocated slots, so
// the output is identical for any worker count. f must be pure in (r, key).
template <class T, class F>
std::vector<T> run_replicated(std::size_t replicates, unsigned workers, const CounterRng& base, F&& f) {
    std::vector<T> results(replicates);
    if (replicates == 0) return results;
    if (workers <= 1) {
        for (std::size_t r = 0; r < replicates; ++r) results[r] = f(r, base.derive(r));
        return results;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&]() {
        for (;;) {
            const std::size_t r = next.fetch_add(1);
            if (r >= replicates) return;
            try {
                results[r] = f(r, base.derive(r));
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
    return results;
}

// Worker count resolution: explicit flag > HDGAUSS_THREADS > 1.
unsigned resolve_threads(int requested);

}  // namespace hdgauss
