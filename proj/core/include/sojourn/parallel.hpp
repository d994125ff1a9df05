#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "sojourn/errors.hpp"

namespace sojourn {

/// Split of n_samples into fixed-size chunks. Chunk c always covers the same
/// samples and draws from stream (seed, purpose, c), which is what makes results
/// independent of the worker count.
struct ChunkPlan {
    std::size_t n_samples = 0;
    std::size_t chunk_size = 0;

    /// chunk_size == 0 selects about 100 chunks.
    [[nodiscard]] static ChunkPlan make(std::size_t n_samples, std::size_t chunk_size = 0) {
        if (n_samples == 0) throw ConfigError("chunk plan: n_samples must be positive");
        if (chunk_size == 0) chunk_size = std::max<std::size_t>(1, (n_samples + 99) / 100);
        return {n_samples, chunk_size};
    }

    [[nodiscard]] std::size_t chunks() const noexcept { return (n_samples + chunk_size - 1) / chunk_size; }
    [[nodiscard]] std::size_t begin(std::size_t c) const noexcept { return c * chunk_size; }
    [[nodiscard]] std::size_t count(std::size_t c) const noexcept {
        return std::min(chunk_size, n_samples - begin(c));
    }
};

[[nodiscard]] inline unsigned resolve_workers(unsigned requested) noexcept {
    if (requested != 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs `run(worker, chunk)` for chunk in [first, last) on up to `workers` threads.
/// Each thread builds its own worker state with `make_worker()`. Results are
/// stored by chunk index, so the caller can reduce them in a fixed order.
template <class MakeWorker, class Run>
auto run_chunks(std::size_t first, std::size_t last, unsigned workers, MakeWorker make_worker, Run run) {
    using Worker = decltype(make_worker());
    using Result = decltype(run(std::declval<Worker&>(), std::size_t{}));
    std::vector<Result> results(last > first ? last - first : 0);
    if (results.empty()) return results;
    const unsigned n_threads =
        static_cast<unsigned>(std::min<std::size_t>(resolve_workers(workers), results.size()));
    std::atomic<std::size_t> next{first};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto body = [&] {
        try {
            auto worker = make_worker();
            for (;;) {
                const std::size_t c = next.fetch_add(1);
                if (c >= last) break;
                results[c - first] = run(worker, c);
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next.store(last);
        }
    };
    if (n_threads <= 1) {
        body();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(n_threads);
        for (unsigned t = 0; t < n_threads; ++t) threads.emplace_back(body);
        for (auto& t : threads) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    return results;
}

}  // namespace sojourn
