#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace ratio_convexity {

/// Worker count from RATIO_CONVEXITY_THREADS (0 or unset means hardware concurrency).
inline std::size_t thread_count() {
    std::size_t requested = 0;
    if (const char* env = std::getenv("RATIO_CONVEXITY_THREADS")) {
        try {
            requested = static_cast<std::size_t>(std::stoul(env));
        } catch (const std::exception&) {
            requested = 0;
        }
    }
    if (requested == 0) requested = std::max(1u, std::thread::hardware_concurrency());
    return requested;
}

namespace detail {
inline thread_local bool in_parallel_region = false;
}

/// Calls fn(i) for i in [0, count). Work is claimed dynamically, so fn must
/// write only to slots owned by i. The first exception thrown is rethrown.
/// Nested calls run serially on the calling worker.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    const std::size_t workers = detail::in_parallel_region ? 1 : std::min(thread_count(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
        const bool outer = detail::in_parallel_region;
        detail::in_parallel_region = true;
        struct Restore {
            bool value;
            ~Restore() { detail::in_parallel_region = value; }
        } restore{outer};
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(count);
                return;
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers - 1);
        for (std::size_t w = 0; w + 1 < workers; ++w) pool.emplace_back(body);
        body();
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace ratio_convexity
