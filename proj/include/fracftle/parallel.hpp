#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace fracftle::parallel {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Run fn(i) for i in [0, n) on a worker pool. Each index owns its output
/// slot, so results are schedule-independent; the first exception wins and is
/// rethrown on the caller.
inline void parallel_for(std::size_t n, int threads,
                         const std::function<void(std::size_t)>& fn) {
    const int n_threads = resolve_threads(threads);
    if (n_threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int spawn = static_cast<int>(std::min<std::size_t>(n, n_threads));
    pool.reserve(spawn);
    for (int t = 0; t < spawn; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace fracftle::parallel
