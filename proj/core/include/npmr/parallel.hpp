#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace npmr {

/// Runs fn(i) for i in [0, count) on up to hardware_concurrency threads.
/// Work items must write only to their own slot; the first exception thrown
/// is rethrown on the calling thread.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn, unsigned max_threads = 0)
{
    unsigned hw = max_threads ? max_threads : std::max(1u, std::thread::hardware_concurrency());
    auto n_threads = static_cast<unsigned>(std::min<std::size_t>(hw, count));
    if (n_threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> threads;
        threads.reserve(n_threads);
        for (unsigned t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);
}

} // namespace npmr
