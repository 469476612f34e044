#pragma once
// Deterministic data-parallel loops. Work is split into contiguous index
// blocks and every index writes only its own slot, so results never depend
// on the worker count.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace wavefront::parallel {

namespace detail {
inline std::atomic<unsigned>& worker_cap() {
    static std::atomic<unsigned> cap{0};  // 0 = hardware parallelism
    return cap;
}
}  // namespace detail

inline void set_max_workers(unsigned n) { detail::worker_cap().store(n); }

inline unsigned max_workers() {
    unsigned cap = detail::worker_cap().load();
    if (cap == 0) cap = std::max(1u, std::thread::hardware_concurrency());
    return cap;
}

/// Reads WAVEFRONT_THREADS; returns false if it is set but not a positive integer.
inline bool configure_from_environment() {
    const char* env = std::getenv("WAVEFRONT_THREADS");
    if (env == nullptr || *env == '\0') return true;
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n <= 0) return false;
    set_max_workers(static_cast<unsigned>(n));
    return true;
}

/// Calls fn(i) for i in [0, n). Blocks smaller than min_block run inline.
template <typename Fn>
void for_each_index(std::size_t n, Fn&& fn, std::size_t min_block = 4096) {
    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(max_workers(), (n + min_block - 1) / min_block));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        pool.emplace_back([&, w, lo, hi] {
            try {
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    // lowest block wins so the reported error is independent of scheduling
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace wavefront::parallel
