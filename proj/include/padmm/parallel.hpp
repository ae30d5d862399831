#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace padmm {

/// Run fn(i) for i in [0, n) on up to `threads` workers. Callers write results
/// into per-index slots, so output order never depends on scheduling. The
/// exception of the lowest failing index is rethrown.
template <class Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::size_t fail_index = n;
    std::exception_ptr fail;
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lk(mu);
                if (i < fail_index) {
                    fail_index = i;
                    fail = std::current_exception();
                }
            }
        }
    };
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < k; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    if (fail) std::rethrow_exception(fail);
}

}  // namespace padmm
