#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace qwalk {

// Static range partition; each index is processed by exactly one worker, so
// results do not depend on the worker count.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
    if (threads <= 1 || n < 2) {
        fn(std::size_t(0), n);
        return;
    }
    const std::size_t nt = std::min<std::size_t>(std::size_t(threads), n);
    std::vector<std::thread> pool;
    pool.reserve(nt);
    const std::size_t chunk = (n + nt - 1) / nt;
    for (std::size_t t = 0; t < nt; ++t) {
        const std::size_t b = t * chunk;
        const std::size_t e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&fn, b, e] { fn(b, e); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace qwalk
