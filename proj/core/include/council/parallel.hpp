#pragma once
// Minimal bounded fan-out: run fn(0..n-1) on up to `cap` threads and join.
// Results land in caller-owned slots indexed by i, so the outcome is
// independent of scheduling order.

#include <atomic>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace council {

template <typename Fn>
void parallel_for_indexed(std::size_t n, int cap, Fn&& fn) {
    if (n == 0) return;
    std::size_t workers = cap < 1 ? 1 : static_cast<std::size_t>(cap);
    if (workers > n) workers = n;
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        threads.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace council
