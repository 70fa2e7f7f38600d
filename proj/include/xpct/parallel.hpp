//
// xpct - Copyright 2026 The xpct Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace xpct {

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Each index is
/// handled exactly once; callers write into per-index slots so the result
/// does not depend on scheduling. The first exception is rethrown after all
/// workers join.
inline void parallel_for(std::size_t n, std::size_t workers,
                         const std::function<void(std::size_t)> &fn) {
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i)
      fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n && !failed; i = next++) {
          try {
            fn(i);
          } catch (...) {
            if (!failed.exchange(true))
              error = std::current_exception();
          }
        }
      });
    }
  }
  if (error)
    std::rethrow_exception(error);
}

inline std::size_t default_workers() {
  return std::max(1u, std::thread::hardware_concurrency());
}

} // namespace xpct
