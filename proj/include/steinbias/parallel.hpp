#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace steinbias {

/// Replicates are cut into fixed-size chunks; chunk k always draws from
/// substream derive_seed(seed, k), so output never depends on the thread count.
inline constexpr std::size_t kChunkSize = 8192;

/// Worker count used when a caller passes 0. Defaults to hardware threads.
std::size_t default_threads() noexcept;
void set_default_threads(std::size_t threads) noexcept;

/// Runs body(chunk, begin, end) over [0, total) in chunks of kChunkSize.
/// The first exception thrown by any chunk is rethrown after all workers join.
template <class Body>
void for_each_chunk(std::size_t total, std::size_t threads, Body&& body) {
    const std::size_t chunks = (total + kChunkSize - 1) / kChunkSize;
    if (threads == 0) threads = default_threads();
    threads = std::max<std::size_t>(1, std::min(threads, chunks));
    auto run = [&](std::size_t c) { body(c, c * kChunkSize, std::min(total, (c + 1) * kChunkSize)); };
    if (threads == 1) {
        for (std::size_t c = 0; c < chunks; ++c) run(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t c = next++; c < chunks && !failed; c = next++) {
                try {
                    run(c);
                } catch (...) {
                    if (!failed.exchange(true)) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace steinbias
