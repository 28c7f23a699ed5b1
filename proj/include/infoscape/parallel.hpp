#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace infoscape {

inline int default_threads() {
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Splits [0, n) into one contiguous chunk per worker and runs
// fn(chunk_index, begin, end) on each. Chunk boundaries depend only on
// (n, threads), never on scheduling, so callers that merge per-chunk
// results in chunk order stay deterministic.
template <typename Fn>
void parallel_chunks(size_t n, int threads, Fn&& fn) {
    if (threads < 1) threads = 1;
    size_t nchunks = static_cast<size_t>(threads);
    if (nchunks > n) nchunks = n == 0 ? 1 : n;
    if (nchunks <= 1) {
        fn(size_t{0}, size_t{0}, n);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(nchunks);
    size_t base = n / nchunks, rem = n % nchunks, begin = 0;
    for (size_t c = 0; c < nchunks; ++c) {
        size_t len = base + (c < rem ? 1 : 0);
        size_t end = begin + len;
        workers.emplace_back([&fn, c, begin, end] { fn(c, begin, end); });
        begin = end;
    }
    for (auto& w : workers) w.join();
}

}  // namespace infoscape
