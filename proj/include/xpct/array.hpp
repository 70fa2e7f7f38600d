//
// xpct - Copyright 2026 The xpct Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "xpct/errors.hpp"

namespace xpct {

using Complex = std::complex<double>;

/// Dense row-major 2D array. Row index runs along the detector u axis,
/// column index along v.
template <class T>
class Grid2D {
public:
  Grid2D() = default;
  Grid2D(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Grid2D(std::size_t rows, std::size_t cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_)
      throw InvalidArgument("Grid2D: data size does not match shape");
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T &operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }
  T &operator[](std::size_t i) { return data_[i]; }
  const T &operator[](std::size_t i) const { return data_[i]; }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }
  std::vector<T> &storage() noexcept { return data_; }
  const std::vector<T> &storage() const noexcept { return data_; }

  bool same_shape(const Grid2D &o) const noexcept {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }

  template <class U>
  bool same_shape(const Grid2D<U> &o) const noexcept {
    return rows_ == o.rows() && cols_ == o.cols();
  }

  friend bool operator==(const Grid2D &, const Grid2D &) = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

enum class ImageRole {
  Generic,
  Raw,
  Bright,
  Dark,
  NormalizedSqrt,
  Transmission,
  Phase,
  Absorption,
};

/// Real-valued detector image tagged with what it holds.
class RealImage : public Grid2D<double> {
public:
  RealImage() = default;
  RealImage(std::size_t rows, std::size_t cols, double fill = 0.0,
            ImageRole role = ImageRole::Generic)
      : Grid2D<double>(rows, cols, fill), role_(role) {}
  RealImage(Grid2D<double> grid, ImageRole role = ImageRole::Generic)
      : Grid2D<double>(std::move(grid)), role_(role) {}

  ImageRole role() const noexcept { return role_; }
  void set_role(ImageRole role) noexcept { role_ = role; }

private:
  ImageRole role_ = ImageRole::Generic;
};

using ComplexField = Grid2D<Complex>;

enum class Quantity { Raw, Delta, Beta };

/// 3D voxel array indexed (slice, row, col); slices run along the vertical
/// rotation axis, rows and cols span the horizontal plane.
class Volume {
public:
  Volume() = default;
  Volume(std::size_t slices, std::size_t rows, std::size_t cols,
         double voxel_width, Quantity quantity = Quantity::Raw)
      : slices_(slices), rows_(rows), cols_(cols), voxel_width_(voxel_width),
        quantity_(quantity), data_(slices * rows * cols, 0.0) {}

  std::size_t slices() const noexcept { return slices_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }
  double voxel_width() const noexcept { return voxel_width_; }
  Quantity quantity() const noexcept { return quantity_; }
  void set_quantity(Quantity q) noexcept { quantity_ = q; }

  double &operator()(std::size_t s, std::size_t r, std::size_t c) {
    return data_[(s * rows_ + r) * cols_ + c];
  }
  double operator()(std::size_t s, std::size_t r, std::size_t c) const {
    return data_[(s * rows_ + r) * cols_ + c];
  }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  RealImage slice(std::size_t s) const;

private:
  std::size_t slices_ = 0;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  double voxel_width_ = 0.0;
  Quantity quantity_ = Quantity::Raw;
  std::vector<double> data_;
};

inline RealImage Volume::slice(std::size_t s) const {
  if (s >= slices_)
    throw InvalidArgument("Volume::slice: index out of range");
  RealImage out(rows_, cols_);
  const auto *src = data_.data() + s * rows_ * cols_;
  std::copy(src, src + rows_ * cols_, out.values().begin());
  return out;
}

} // namespace xpct
