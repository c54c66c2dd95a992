#ifndef FKIT_PARALLEL_HPP
#define FKIT_PARALLEL_HPP

#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace fkit {

// Thread cap: FRIEDRICHS_KIT_THREADS if set, else machine parallelism.
inline int thread_cap() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("FRIEDRICHS_KIT_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1 && v <= static_cast<long>(hw)) return static_cast<int>(v);
        if (v >= 1) return static_cast<int>(v);
    }
    return static_cast<int>(hw);
}

// Runs fn(i) for i in [0, count) on at most thread_cap() workers. Results must
// be written to per-index slots by the caller, which keeps output order
// deterministic. The first exception is rethrown after all workers join.
inline void parallel_for_index(int count, const std::function<void(int)>& fn) {
    int workers = std::min(count, thread_cap());
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto work = [&]() {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace fkit

#endif
