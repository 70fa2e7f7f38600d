//
// xpct - Copyright 2026 The xpct Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "xpct/tomo.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "xpct/core.hpp"
#include "xpct/fft.hpp"
#include "xpct/parallel.hpp"

namespace xpct {
namespace {
  // Frequency-sampled |f| matches the analytic Ram-Lak kernel to ~1e-6 from
  // this length on.
  constexpr std::size_t kMinFilterLength = 1024;
} // namespace

Sinogram::Sinogram(std::size_t views, std::size_t rows, std::size_t cols,
                   std::vector<double> angles, double pixel_pitch)
    : views_(views), rows_(rows), cols_(cols), angles_(std::move(angles)),
      pixel_pitch_(pixel_pitch), data_(views * rows * cols, 0.0) {
  if (angles_.size() != views_)
    throw InvalidArgument("sinogram: " + std::to_string(views_) + " views but "
                          + std::to_string(angles_.size()) + " angles");
  if (!(pixel_pitch_ > 0.0))
    throw InvalidArgument("sinogram: pixel pitch must be > 0");
}

Sinogram Sinogram::from_projections(const std::vector<RealImage> &projections,
                                    std::vector<double> angles,
                                    double pixel_pitch) {
  if (projections.empty())
    throw InvalidArgument("sinogram: no projections");
  const std::size_t rows = projections.front().rows();
  const std::size_t cols = projections.front().cols();
  Sinogram s(projections.size(), rows, cols, std::move(angles), pixel_pitch);
  for (std::size_t v = 0; v < projections.size(); ++v) {
    const RealImage &p = projections[v];
    if (p.rows() != rows || p.cols() != cols)
      throw InvalidArgument("sinogram: projection " + std::to_string(v)
                            + " has a different shape");
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (!std::isfinite(p[i]))
        throw InvalidData("sinogram: non-finite value in projection "
                          + std::to_string(v));
      s.data_[v * rows * cols + i] = p[i];
    }
  }
  return s;
}

Grid2D<double> Sinogram::row_slice(std::size_t row) const {
  if (row >= rows_)
    throw InvalidArgument("sinogram: row out of range");
  Grid2D<double> out(views_, cols_);
  for (std::size_t v = 0; v < views_; ++v)
    for (std::size_t c = 0; c < cols_; ++c)
      out(v, c) = (*this)(v, row, c);
  return out;
}

std::size_t ramp_filter_length(std::size_t n) {
  return std::max<std::size_t>(2 * n, kMinFilterLength);
}

std::vector<double> ramp_filter(std::span<const double> row, bool apodize) {
  const std::size_t n = row.size();
  if (n == 0)
    return {};
  const std::size_t len = ramp_filter_length(n);
  // Pad by repeating the end samples: the right half of the pad takes the
  // last value, the wrapped left half the first.
  std::vector<Complex> buf(len, Complex(row.front(), 0.0));
  std::copy(row.begin(), row.end(), buf.begin());
  std::fill(buf.begin() + static_cast<std::ptrdiff_t>(n),
            buf.begin() + static_cast<std::ptrdiff_t>(n + (len - n) / 2),
            Complex(row.back(), 0.0));
  fft::forward_1d(buf);
  for (std::size_t k = 0; k < len; ++k) {
    const double f = static_cast<double>(FrequencyGrid::signed_index(k, len))
                     / static_cast<double>(len);
    double response = std::abs(f);
    if (apodize)
      response *= 0.54 + 0.46 * std::cos(2.0 * kPi * f);
    buf[k] *= response;
  }
  fft::inverse_1d(buf);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = buf[i].real();
  return out;
}

RealImage fbp_slice(const Grid2D<double> &sinogram,
                    std::span<const double> angles, double pixel_pitch,
                    bool apodize) {
  const std::size_t views = sinogram.rows();
  const std::size_t n = sinogram.cols();
  if (views < 2)
    throw InvalidArgument("fbp_slice: need at least 2 views");
  if (angles.size() != views)
    throw InvalidArgument("fbp_slice: angle count does not match views");
  if (!(pixel_pitch > 0.0))
    throw InvalidArgument("fbp_slice: pixel pitch must be > 0");

  RealImage out(n, n);
  const double center = 0.5 * static_cast<double>(n - 1);
  // Pixels outside the inscribed circle are not seen by every view.
  const double fov_sq = 0.25 * static_cast<double>(n * n);
  const double scale = kPi / static_cast<double>(views) / pixel_pitch;
  std::vector<double> row(n);
  for (std::size_t v = 0; v < views; ++v) {
    for (std::size_t c = 0; c < n; ++c)
      row[c] = sinogram(v, c);
    const std::vector<double> q = ramp_filter(row, apodize);
    const double ct = std::cos(angles[v]);
    const double st = std::sin(angles[v]);
    for (std::size_t r = 0; r < n; ++r) {
      const double y = static_cast<double>(r) - center;
      for (std::size_t c = 0; c < n; ++c) {
        const double x = static_cast<double>(c) - center;
        if (x * x + y * y > fov_sq)
          continue;
        const double t = x * ct + y * st + center;
        const double t0 = std::floor(t);
        const double a = t - t0;
        const auto i0 = static_cast<std::ptrdiff_t>(t0);
        double val = 0.0;
        if (i0 >= 0 && i0 < static_cast<std::ptrdiff_t>(n))
          val += (1.0 - a) * q[static_cast<std::size_t>(i0)];
        if (i0 + 1 >= 0 && i0 + 1 < static_cast<std::ptrdiff_t>(n))
          val += a * q[static_cast<std::size_t>(i0 + 1)];
        out(r, c) += val;
      }
    }
  }
  for (auto &v : out.values())
    v *= scale;
  return out;
}

Volume reconstruct_delta(const Sinogram &sinogram, double wavelength,
                         bool apodize, std::size_t workers) {
  if (!(wavelength > 0.0))
    throw InvalidArgument("reconstruct_delta: wavelength must be > 0");
  const std::size_t n = sinogram.cols();
  Volume vol(sinogram.rows(), n, n, sinogram.pixel_pitch(), Quantity::Delta);
  const double to_delta = wavelength / (2.0 * kPi);
  parallel_for(sinogram.rows(), workers, [&](std::size_t r) {
    const RealImage slice = fbp_slice(sinogram.row_slice(r), sinogram.angles(),
                                      sinogram.pixel_pitch(), apodize);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        vol(r, i, j) = to_delta * slice(i, j);
  });
  return vol;
}

} // namespace xpct
