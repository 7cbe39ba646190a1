// parallel.hpp — index-based worker pool for sweep cells.

#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace pcs {

inline int default_workers() {
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

// Run fn(i) for i in [0, count). Results must be written to pre-sized
// per-index slots so assembly order stays deterministic.
inline void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
    if (workers <= 0) workers = default_workers();
    if (workers == 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    const int n_threads = static_cast<int>(std::min<std::size_t>(count, static_cast<std::size_t>(workers)));
    pool.reserve(n_threads);
    for (int w = 0; w < n_threads; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

} // namespace pcs
