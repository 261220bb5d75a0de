/*
 * (C) Copyright 2026 dsikit authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace dsi {

/// Runs body(i) for i in [0, n) on a static contiguous partition over
/// `threads` workers. Bodies must only touch disjoint state per index;
/// results are then independent of the thread count.
inline void parallel_for_index(Eigen::Index n, int threads,
                               const std::function<void(Eigen::Index)>& body) {
    if (threads <= 1 || n <= 1) {
        for (Eigen::Index i = 0; i < n; ++i)
            body(i);
        return;
    }
    const int n_workers = std::min<int>(threads, static_cast<int>(n));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    const Eigen::Index chunk = (n + n_workers - 1) / n_workers;
    for (int w = 0; w < n_workers; ++w) {
        const Eigen::Index begin = w * chunk;
        const Eigen::Index end = std::min<Eigen::Index>(n, begin + chunk);
        pool.emplace_back([begin, end, &body] {
            for (Eigen::Index i = begin; i < end; ++i)
                body(i);
        });
    }
    for (auto& t : pool)
        t.join();
}

} // namespace dsi
