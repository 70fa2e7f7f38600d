//
// xpct - Copyright 2026 The xpct Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "xpct/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace xpct::fft {
namespace {
  using PlanKey = std::tuple<std::size_t, std::size_t, int>; // rows (0 = 1D), cols, sign

  class PlanCache {
  public:
    ~PlanCache() {
      for (auto &[key, plan] : plans_)
        fftw_destroy_plan(plan);
    }

    fftw_plan get(std::size_t rows, std::size_t cols, int sign) {
      std::lock_guard lock(mutex_);
      const PlanKey key{rows, cols, sign};
      if (auto it = plans_.find(key); it != plans_.end())
        return it->second;
      // Planned on scratch memory; FFTW_UNALIGNED lets the plan run on any
      // caller buffer with identical numerics.
      std::vector<Complex> scratch((rows == 0 ? 1 : rows) * cols);
      auto *buf = reinterpret_cast<fftw_complex *>(scratch.data());
      const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
      fftw_plan plan = rows == 0
                           ? fftw_plan_dft_1d(static_cast<int>(cols), buf, buf,
                                              sign, flags)
                           : fftw_plan_dft_2d(static_cast<int>(rows),
                                              static_cast<int>(cols), buf, buf,
                                              sign, flags);
      plans_.emplace(key, plan);
      return plan;
    }

  private:
    std::mutex mutex_;
    std::map<PlanKey, fftw_plan> plans_;
  };

  PlanCache &cache() {
    static PlanCache instance;
    return instance;
  }

  void run(std::span<Complex> data, std::size_t rows, std::size_t cols,
           int sign) {
    if (data.size() != (rows == 0 ? 1 : rows) * cols)
      throw InvalidArgument("fft: buffer size does not match shape");
    auto *buf = reinterpret_cast<fftw_complex *>(data.data());
    fftw_execute_dft(cache().get(rows, cols, sign), buf, buf);
  }

  void scale(std::span<Complex> data) {
    const double s = 1.0 / static_cast<double>(data.size());
    for (auto &v : data)
      v *= s;
  }
} // namespace

void forward_2d(std::span<Complex> data, std::size_t rows, std::size_t cols) {
  run(data, rows, cols, FFTW_FORWARD);
}

void inverse_2d(std::span<Complex> data, std::size_t rows, std::size_t cols) {
  run(data, rows, cols, FFTW_BACKWARD);
  scale(data);
}

void forward_1d(std::span<Complex> data) {
  run(data, 0, data.size(), FFTW_FORWARD);
}

void inverse_1d(std::span<Complex> data) {
  run(data, 0, data.size(), FFTW_BACKWARD);
  scale(data);
}

} // namespace xpct::fft
