#pragma once

#include <algorithm>
#include <functional>
#include <future>
#include <thread>
#include <vector>

namespace suptrap {

// Worker count: SUPTRAP_THREADS overrides, otherwise available parallelism.
int max_threads();

// Splits [0, n) into at most max_threads() contiguous chunks, runs `fn` on
// each and returns the per-chunk results in chunk order. Determinism is the
// caller's job: draw from per-item streams and merge per-chunk results in
// order, never from a shared stream.
template <typename T, typename Fn>
std::vector<T> parallel_map_chunks(long n, Fn fn) {
    const long workers = std::max<long>(1, std::min<long>(max_threads(), n));
    if (workers == 1) {
        std::vector<T> out;
        out.push_back(fn(0L, n));
        return out;
    }
    const long chunk = (n + workers - 1) / workers;
    std::vector<std::future<T>> futures;
    for (long begin = 0; begin < n; begin += chunk) {
        const long end = std::min(n, begin + chunk);
        futures.push_back(
            std::async(std::launch::async, [fn, begin, end] { return fn(begin, end); }));
    }
    std::vector<T> out;
    out.reserve(futures.size());
    for (auto& f : futures) out.push_back(f.get());
    return out;
}

}  // namespace suptrap
