//
// xpct - Copyright 2026 The xpct Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "xpct/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace xpct {

double wavelength_from_energy(double energy_kev) {
  if (!(energy_kev > 0.0) || !std::isfinite(energy_kev))
    throw InvalidArgument("wavelength_from_energy: energy must be positive, got "
                          + std::to_string(energy_kev) + " keV");
  return units::kPlanckTimesLightSpeed / (energy_kev * units::kJoulePerKeV);
}

void AcquisitionGeometry::validate() const {
  if (!(wavelength > 0.0))
    throw InvalidArgument("geometry: wavelength must be > 0");
  if (!(distance >= 0.0))
    throw InvalidArgument("geometry: distance must be >= 0");
  if (!(pixel_pitch > 0.0))
    throw InvalidArgument("geometry: pixel_pitch must be > 0");
  if (n_u < 2 || n_v < 2)
    throw InvalidArgument("geometry: detector must be at least 2x2");
  for (std::size_t i = 0; i < angles.size(); ++i) {
    if (!(angles[i] >= 0.0 && angles[i] < kPi))
      throw InvalidArgument("geometry: angle " + std::to_string(i)
                            + " outside [0, pi)");
    if (i > 0 && !(angles[i] > angles[i - 1]))
      throw InvalidArgument("geometry: angles must be strictly increasing");
  }
}

std::vector<double> equally_spaced_angles(std::size_t n_views) {
  std::vector<double> out(n_views);
  for (std::size_t i = 0; i < n_views; ++i)
    out[i] = static_cast<double>(i) * kPi / static_cast<double>(n_views);
  return out;
}

double fresnel_number(const AcquisitionGeometry &geometry) {
  if (geometry.distance == 0.0)
    return std::numeric_limits<double>::infinity();
  return geometry.pixel_pitch * geometry.pixel_pitch
         / (geometry.wavelength * geometry.distance);
}

void RetrievalConfig::validate() const {
  if (!(gamma >= 0.0))
    throw InvalidArgument("retrieval config: gamma must be >= 0");
  if (!std::isfinite(alpha))
    throw InvalidArgument("retrieval config: alpha must be finite");
  if (!(xtol_rel > 0.0))
    throw InvalidArgument("retrieval config: xtol_rel must be > 0");
  if (lbfgs_memory < 1)
    throw InvalidArgument("retrieval config: lbfgs_memory must be >= 1");
  if (!(lower_bound > 0.0 && lower_bound < 1.0))
    throw InvalidArgument("retrieval config: lower_bound must be in (0, 1)");
  if (!(pad_factor >= 1.0))
    throw InvalidArgument("retrieval config: pad_factor must be >= 1");
}

FrequencyGrid::FrequencyGrid(double pixel_pitch, std::size_t n_u,
                             std::size_t n_v)
    : d_mu_(1.0 / (static_cast<double>(n_u) * pixel_pitch)),
      d_nu_(1.0 / (static_cast<double>(n_v) * pixel_pitch)), n_u_(n_u),
      n_v_(n_v) {
  if (n_u < 2 || n_v < 2)
    throw InvalidArgument("frequency_grid: dims must be >= 2");
  if (!(pixel_pitch > 0.0))
    throw InvalidArgument("frequency_grid: pixel pitch must be > 0");
}

FrequencyGrid frequency_grid(const AcquisitionGeometry &geometry,
                             std::size_t n_u, std::size_t n_v) {
  return FrequencyGrid(geometry.pixel_pitch, n_u, n_v);
}

std::size_t padded_size(std::size_t n, double pad_factor) {
  if (!(pad_factor >= 1.0))
    throw InvalidArgument("pad_edge: pad factor must be >= 1");
  if (pad_factor == 1.0)
    return n;
  auto m = static_cast<std::size_t>(
      std::ceil(pad_factor * static_cast<double>(n) - 1e-9));
  m = std::max(m, n);
  if (m % 2 != 0)
    ++m;
  return m;
}

template <class T>
Padded<T> pad_edge(const Grid2D<T> &image, double pad_factor) {
  if (image.empty())
    throw InvalidArgument("pad_edge: empty image");
  const std::size_t rows = padded_size(image.rows(), pad_factor);
  const std::size_t cols = padded_size(image.cols(), pad_factor);
  CropWindow w{(rows - image.rows()) / 2, (cols - image.cols()) / 2,
               image.rows(), image.cols()};
  Grid2D<T> out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t sr = std::clamp<std::ptrdiff_t>(
        static_cast<std::ptrdiff_t>(r) - static_cast<std::ptrdiff_t>(w.row0), 0,
        static_cast<std::ptrdiff_t>(image.rows()) - 1);
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t sc = std::clamp<std::ptrdiff_t>(
          static_cast<std::ptrdiff_t>(c) - static_cast<std::ptrdiff_t>(w.col0),
          0, static_cast<std::ptrdiff_t>(image.cols()) - 1);
      out(r, c) = image(sr, sc);
    }
  }
  return {std::move(out), w};
}

template <class T>
Grid2D<T> crop(const Grid2D<T> &image, const CropWindow &window) {
  if (window.row0 + window.rows > image.rows()
      || window.col0 + window.cols > image.cols())
    throw InvalidArgument("crop: window exceeds image bounds");
  Grid2D<T> out(window.rows, window.cols);
  for (std::size_t r = 0; r < window.rows; ++r)
    for (std::size_t c = 0; c < window.cols; ++c)
      out(r, c) = image(window.row0 + r, window.col0 + c);
  return out;
}

template Padded<double> pad_edge(const Grid2D<double> &, double);
template Padded<Complex> pad_edge(const Grid2D<Complex> &, double);
template Grid2D<double> crop(const Grid2D<double> &, const CropWindow &);
template Grid2D<Complex> crop(const Grid2D<Complex> &, const CropWindow &);

PaddedImage pad_edge(const RealImage &image, double pad_factor) {
  auto p = pad_edge(static_cast<const Grid2D<double> &>(image), pad_factor);
  return {RealImage(std::move(p.image), image.role()), p.window};
}

RealImage crop(const RealImage &image, const CropWindow &window) {
  return RealImage(crop(static_cast<const Grid2D<double> &>(image), window),
                   image.role());
}

} // namespace xpct
