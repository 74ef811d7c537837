#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace bibo {

// Runs fn(i) for i in [0, count). Work items must write only to their own
// output slots; under that contract the result is identical for any thread
// count, including 1. n_threads == 0 means hardware concurrency.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn,
                         unsigned n_threads = 0) {
    if (count == 0) return;
    unsigned hw = n_threads != 0 ? n_threads : std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (hw > count) hw = static_cast<unsigned>(count);
    if (hw <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> workers;
    workers.reserve(hw);
    for (unsigned w = 0; w < hw; ++w) {
        workers.emplace_back([&]() {
            while (!failed.load(std::memory_order_relaxed)) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) break;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    failed.store(true, std::memory_order_relaxed);
                }
            }
        });
    }
    for (auto& t : workers) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace bibo
