// parallel.hpp: Bounded worker pool over an index range

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace heatrect {

// Calls fn(i) for every i in [0, count) on up to `workers` threads. Callers write results by
// index, so output order never depends on scheduling. The first exception is rethrown after
// all workers have stopped. `progress` (optional) runs under a lock after each item.
template <typename F>
void parallel_for(std::size_t count, unsigned workers, F&& fn,
                  const std::function<void(std::size_t done, std::size_t total)>& progress = {}) {
    if (count == 0) return;
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex lock;
    std::size_t done = 0;

    auto work = [&]() {
        for (;;) {
            if (failed.load()) return;
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> g(lock);
                if (!error) error = std::current_exception();
                failed = true;
                return;
            }
            if (progress) {
                std::lock_guard<std::mutex> g(lock);
                progress(++done, count);
            }
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);
}

} // namespace heatrect
