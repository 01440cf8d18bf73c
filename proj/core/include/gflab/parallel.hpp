#pragma once
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace gflab {

/// Runs body(0..n-1) on up to `degree` worker threads. Workers share
/// nothing except the index counter; callers write results into
/// index-addressed slots so the merge is deterministic. degree <= 1 runs
/// strictly sequentially. The first exception is rethrown after join.
inline void parallel_for(std::size_t n, int degree,
                         const std::function<void(std::size_t)>& body) {
    if (degree <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(degree), n);
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n || failed.load()) return;
                try {
                    body(i);
                } catch (...) {
                    if (!failed.exchange(true)) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace gflab
