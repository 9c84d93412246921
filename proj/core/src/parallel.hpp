#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace restorex::detail {

/// Run fn(0..n-1) on up to `threads` workers. Results must be written to
/// index-addressed storage by the caller; the first exception in index
/// order is rethrown, so failures are deterministic regardless of
/// scheduling.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
    if (n == 0) return;
    const int workers = std::max(1, std::min<int>(threads, static_cast<int>(n)));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (std::thread& th : pool) th.join();
    for (std::size_t i = 0; i < n; ++i)
        if (errors[i]) std::rethrow_exception(errors[i]);
}

} // namespace restorex::detail
