#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace smoothval {

// Deterministic chunked parallelism. Work is split into a fixed set of
// chunks whose boundaries do not depend on the worker count; workers pull
// chunk indices from an atomic counter and each chunk writes its own result
// slot. The caller reduces the slots in chunk order, so any reduction is
// bit-identical for 1, 4, or 8 workers.
template <typename R>
std::vector<R> run_chunked(std::size_t n_chunks, int threads,
                           const std::function<R(std::size_t)>& work) {
    std::vector<R> results(n_chunks);
    if (n_chunks == 0) return results;
    if (threads < 1) threads = 1;
    std::size_t n_workers = std::min<std::size_t>(threads, n_chunks);
    if (n_workers <= 1) {
        for (std::size_t i = 0; i < n_chunks; ++i) results[i] = work(i);
        return results;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};

    auto body = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n_chunks || failed.load()) return;
            try {
                results[i] = work(i);
            } catch (...) {
                if (!failed.exchange(true)) error = std::current_exception();
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (failed.load()) std::rethrow_exception(error);
    return results;
}

}  // namespace smoothval
