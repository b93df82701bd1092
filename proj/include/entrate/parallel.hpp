#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace entrate::detail {

/// Chunk geometry is fixed (independent of the worker count) so that chunked
/// reductions merge the same partials in the same order no matter how many
/// threads ran. Workers grab chunks through an atomic cursor.
inline constexpr std::size_t chunk_size = std::size_t{1} << 16;

inline unsigned resolve_threads(unsigned requested) {
    if (requested != 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw != 0 ? hw : 1;
}

/// Runs fn(chunk_index, begin, end) over [0, total) split into fixed chunks.
/// fn must only touch state owned by its chunk.
template <typename Fn>
void for_each_chunk(std::size_t total, unsigned threads, Fn&& fn) {
    if (total == 0) return;
    const std::size_t n_chunks = (total + chunk_size - 1) / chunk_size;
    threads = resolve_threads(threads);
    if (threads <= 1 || n_chunks == 1) {
        for (std::size_t c = 0; c < n_chunks; ++c) {
            const std::size_t begin = c * chunk_size;
            const std::size_t end = begin + chunk_size < total ? begin + chunk_size : total;
            fn(c, begin, end);
        }
        return;
    }
    std::atomic<std::size_t> cursor{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t c = cursor.fetch_add(1, std::memory_order_relaxed);
            if (c >= n_chunks) return;
            const std::size_t begin = c * chunk_size;
            const std::size_t end = begin + chunk_size < total ? begin + chunk_size : total;
            fn(c, begin, end);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads - 1);
    for (unsigned t = 0; t + 1 < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
}

inline std::size_t num_chunks(std::size_t total) {
    return (total + chunk_size - 1) / chunk_size;
}

}  // namespace entrate::detail
