//
// xpct - Copyright 2026 The xpct Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "xpct/array.hpp"

namespace xpct {

/// Projections stacked as (view, detector row, detector column).
class Sinogram {
public:
  Sinogram(std::size_t views, std::size_t rows, std::size_t cols,
           std::vector<double> angles, double pixel_pitch);

  static Sinogram from_projections(const std::vector<RealImage> &projections,
                                   std::vector<double> angles,
                                   double pixel_pitch);

  std::size_t views() const noexcept { return views_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  const std::vector<double> &angles() const noexcept { return angles_; }
  double pixel_pitch() const noexcept { return pixel_pitch_; }

  double &operator()(std::size_t v, std::size_t r, std::size_t c) {
    return data_[(v * rows_ + r) * cols_ + c];
  }
  double operator()(std::size_t v, std::size_t r, std::size_t c) const {
    return data_[(v * rows_ + r) * cols_ + c];
  }

  /// (view x column) slice for one detector row.
  Grid2D<double> row_slice(std::size_t row) const;

private:
  std::size_t views_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> angles_;
  double pixel_pitch_;
  std::vector<double> data_;
};

/// Padded length used by ramp_filter for an n-sample row.
std::size_t ramp_filter_length(std::size_t n);

/// Band-limited Ram-Lak filter in cycles-per-sample units (impulse response
/// 1/4 at the center). The row is extended with its end values before the
/// DFT, so a constant row filters to zero. Optional Hamming apodization.
std::vector<double> ramp_filter(std::span<const double> row,
                                bool apodize = false);

/// Parallel-beam FBP of one (view x column) sinogram slice onto a
/// cols x cols grid at the detector pitch. Output is in units of the
/// projected quantity per meter; pixels farther than cols/2 from the grid
/// center are left at zero.
RealImage fbp_slice(const Grid2D<double> &sinogram,
                    std::span<const double> angles, double pixel_pitch,
                    bool apodize = false);

/// Slice-wise FBP of a phase sinogram scaled by lambda / (2 pi), giving
/// the refractive index decrement per voxel.
Volume reconstruct_delta(const Sinogram &sinogram, double wavelength,
                         bool apodize = false, std::size_t workers = 1);

} // namespace xpct
