#pragma once
#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace lobeq {

// Worker cap: GLOSTEN_EQ_THREADS if set, else hardware concurrency.
inline int worker_count() {
    if (const char* env = std::getenv("GLOSTEN_EQ_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

// Chunked parallel loop over [0, n). Serial when one worker suffices.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    int workers = std::min<std::size_t>(worker_count(), n ? n : 1);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::size_t chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace lobeq
