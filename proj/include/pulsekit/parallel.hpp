#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace pulsekit {

inline int resolve_threads(int requested, std::size_t work_items) {
    if (requested <= 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        requested = hw == 0 ? 1 : static_cast<int>(hw);
    }
    if (static_cast<std::size_t>(requested) > work_items)
        requested = static_cast<int>(work_items == 0 ? 1 : work_items);
    return requested < 1 ? 1 : requested;
}

/// Run fn(i) for i in [0, n).  Each index is processed exactly once; with
/// several threads the work is block-partitioned, so callers that write
/// into per-index slots stay deterministic regardless of thread count.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
    threads = resolve_threads(threads, n);
    if (threads == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    const std::size_t chunk = (n + static_cast<std::size_t>(threads) - 1) /
                              static_cast<std::size_t>(threads);
    for (int t = 0; t < threads; ++t) {
        const std::size_t lo = static_cast<std::size_t>(t) * chunk;
        const std::size_t hi = lo + chunk < n ? lo + chunk : n;
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace pulsekit
