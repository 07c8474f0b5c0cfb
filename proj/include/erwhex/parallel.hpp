#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace erwhex {

/// Explicit request if positive, else ERWHEX_THREADS, else hardware concurrency.
int resolve_threads(int requested);

/// Calls body(i) for every i in [0, count) on up to `threads` workers. Work is
/// handed out in fixed-size blocks; body must write only to slot i, so results
/// never depend on scheduling. The first exception thrown is rethrown.
template <class Body>
void parallel_for(std::int64_t count, int threads, Body&& body) {
    constexpr std::int64_t kBlock = 256;
    const int workers = static_cast<int>(std::clamp<std::int64_t>((count + kBlock - 1) / kBlock, 1, std::max(threads, 1)));
    if (workers == 1) {
        for (std::int64_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto run = [&] {
        try {
            for (;;) {
                const std::int64_t begin = next.fetch_add(kBlock);
                if (begin >= count) return;
                const std::int64_t end = std::min(count, begin + kBlock);
                for (std::int64_t i = begin; i < end; ++i) body(i);
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next.store(count);
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers - 1));
    for (int w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace erwhex
