#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <thread>
#include <vector>

// Deterministic work helpers.  Results must not depend on the thread count,
// so parallel loops only ever write to caller-owned slots indexed by the loop
// variable, and reductions happen afterwards in a fixed pairwise order.

namespace axb {

// Runs work(i) for i in [0, n).  Static block partition; any thread count
// (including 1) produces identical side effects as long as work(i) writes
// only to slot i of caller-owned storage.
inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& work) {
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) work(i);
        return;
    }
    std::size_t t = static_cast<std::size_t>(threads);
    if (t > n) t = n;
    std::vector<std::thread> pool;
    pool.reserve(t);
    for (std::size_t j = 0; j < t; ++j) {
        std::size_t lo = n * j / t, hi = n * (j + 1) / t;
        pool.emplace_back([lo, hi, &work] {
            for (std::size_t i = lo; i < hi; ++i) work(i);
        });
    }
    for (auto& th : pool) th.join();
}

// Pairwise (tree) summation in index order: reproducible and far more
// accurate than a running sum on long, mixed-magnitude inputs.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    std::size_t h = v.size() / 2;
    return pairwise_sum(v.first(h)) + pairwise_sum(v.subspan(h));
}

}  // namespace axb
