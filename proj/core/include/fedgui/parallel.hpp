#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace fedgui {

inline int resolve_workers(int workers) {
    if (workers > 0) return workers;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Work is striped by
/// index, so callers writing to slot i of a prefilled vector get results
/// independent of the worker count. The first exception thrown by any fn is
/// rethrown on the calling thread once all workers finish.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
    int w = resolve_workers(workers);
    if (w <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> threads;
    auto stride = static_cast<std::size_t>(w);
    for (std::size_t t = 0; t < stride; ++t) {
        threads.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < n; i += stride) fn(i);
            } catch (...) {
                std::scoped_lock lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& th : threads) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace fedgui
