#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace msl {

/// Worker count: MASLOV_LAB_THREADS env override, else hardware concurrency.
inline int thread_count() {
    if (const char* env = std::getenv("MASLOV_LAB_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

/// Index-parallel map with results stored by index; reductions done by the
/// caller in index order, so outputs are bit-stable regardless of the degree.
template <class F>
void parallel_for(int count, F&& body, int threads = -1) {
    if (threads <= 0) threads = thread_count();
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::exception_ptr first_error = nullptr;
    std::mutex err_mutex;
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&, w]() {
            try {
                for (int i = w; i < count; i += threads) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace msl
