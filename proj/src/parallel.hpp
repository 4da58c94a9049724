#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

namespace walkfit::detail {

// Runs fn(worker_id, index) for every index in [0, count), splitting the
// index range into contiguous blocks over at most n_workers threads.
// fn must only touch per-index (or per-worker) state; the first exception
// thrown by any worker is rethrown on the calling thread.
template <class Fn>
void for_each_index(std::size_t count, int n_workers, Fn&& fn) {
    std::size_t workers = n_workers < 1 ? 1 : static_cast<std::size_t>(n_workers);
    if (workers > count) workers = count == 0 ? 1 : count;
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(std::size_t{0}, i);
        return;
    }
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto run_block = [&](std::size_t w, std::size_t begin, std::size_t end) {
        try {
            for (std::size_t i = begin; i < end; ++i) fn(w, i);
        } catch (...) {
            const std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    };
    std::vector<std::thread> threads;
    threads.reserve(workers - 1);
    const std::size_t base = count / workers;
    const std::size_t extra = count % workers;
    std::size_t begin = 0;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t len = base + (w < extra ? 1 : 0);
        const std::size_t end = begin + len;
        if (w + 1 == workers) {
            run_block(w, begin, end);
        } else {
            threads.emplace_back(run_block, w, begin, end);
        }
        begin = end;
    }
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace walkfit::detail
