#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace scatlab {

inline unsigned default_thread_count() {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    return n > 8 ? 8u : n;
}

// Deterministic parallel map: body(i) writes only to slot i of some
// preallocated output, so the result is independent of scheduling.
template <typename Body>
void parallel_for(std::size_t n, Body&& body, unsigned threads = 0) {
    if (threads == 0) threads = default_thread_count();
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::exception_ptr eptr = nullptr;
    std::mutex emtx;
    std::vector<std::thread> pool;
    const std::size_t nt = std::min<std::size_t>(threads, n);
    std::vector<std::size_t> cursor{0};
    std::mutex cmtx;
    for (std::size_t t = 0; t < nt; ++t) {
        pool.emplace_back([&]() {
            for (;;) {
                std::size_t i;
                {
                    std::lock_guard<std::mutex> lk(cmtx);
                    if (cursor[0] >= n) return;
                    i = cursor[0]++;
                }
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(emtx);
                    if (!eptr) eptr = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (eptr) std::rethrow_exception(eptr);
}

} // namespace scatlab
