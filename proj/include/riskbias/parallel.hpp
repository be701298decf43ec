#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace riskbias {

// Worker cap: RISKBIAS_THREADS env var if set, else hardware concurrency.
inline unsigned worker_count() {
    if (const char* env = std::getenv("RISKBIAS_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1u;
}

namespace detail {
inline bool& in_parallel_region() {
    thread_local bool flag = false;
    return flag;
}
} // namespace detail

// Runs fn(i) for i in [0, count). Results must be written to per-index slots;
// the iteration order is unspecified, so fn must not depend on it. Nested
// calls from inside a worker run serially. Any worker exception is rethrown.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    if (count == 0) return;
    unsigned workers = worker_count();
    if (workers <= 1 || count == 1 || detail::in_parallel_region()) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    if (workers > count) workers = static_cast<unsigned>(count);

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto drain = [&] {
        detail::in_parallel_region() = true;
        for (;;) {
            std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count) break;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                break;
            }
        }
        detail::in_parallel_region() = false;
    };

    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(drain);
    drain();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

} // namespace riskbias
