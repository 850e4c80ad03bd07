#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cobro {

// Worker count: COBRO_THREADS environment variable if set (minimum 1),
// otherwise the hardware concurrency.
inline int worker_count() {
    if (const char* env = std::getenv("COBRO_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

// Runs fn(block_index, begin, end) over [0, n) split into fixed-size blocks.
// Blocks are claimed dynamically, but block boundaries depend only on n and
// block_size; callers that store per-block results by block_index and fold
// them in index order get answers independent of the worker count.
template <class Fn>
void parallel_blocks(uint64_t n, uint64_t block_size, Fn&& fn) {
    if (n == 0) return;
    const uint64_t n_blocks = (n + block_size - 1) / block_size;
    const uint64_t workers =
        std::min<uint64_t>(static_cast<uint64_t>(worker_count()), n_blocks);

    if (workers <= 1) {
        for (uint64_t b = 0; b < n_blocks; ++b)
            fn(b, b * block_size, std::min(n, (b + 1) * block_size));
        return;
    }

    std::atomic<uint64_t> next{0};
    std::exception_ptr first_error;
    std::mutex err_mu;

    auto run = [&]() {
        for (;;) {
            const uint64_t b = next.fetch_add(1);
            if (b >= n_blocks) return;
            try {
                fn(b, b * block_size, std::min(n, (b + 1) * block_size));
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mu);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (uint64_t w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

// Map-reduce over [0, n): map each fixed-size block to a partial of type T,
// then fold partials in block-index order (deterministic for non-associative
// floating-point accumulation).
template <class T, class Map, class Fold>
T parallel_map_reduce(uint64_t n, uint64_t block_size, T init, Map&& map_block,
                      Fold&& fold) {
    if (n == 0) return init;
    const uint64_t n_blocks = (n + block_size - 1) / block_size;
    std::vector<T> partial(n_blocks, init);
    parallel_blocks(n, block_size, [&](uint64_t b, uint64_t lo, uint64_t hi) {
        partial[b] = map_block(lo, hi);
    });
    T acc = init;
    for (uint64_t b = 0; b < n_blocks; ++b) acc = fold(acc, partial[b]);
    return acc;
}

} // namespace cobro
