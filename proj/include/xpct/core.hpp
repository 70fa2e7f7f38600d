//
// xpct - Copyright 2026 The xpct Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "xpct/array.hpp"

namespace xpct {

inline constexpr double kPi = 3.14159265358979323846;

namespace units {
  inline constexpr double kPlanckTimesLightSpeed = 1.98644586e-25; // J m
  inline constexpr double kJoulePerKeV = 1.602176634e-16;
  inline constexpr double kMicrometer = 1e-6;
  inline constexpr double kMillimeter = 1e-3;
} // namespace units

/// Photon energy in keV to wavelength in meters.
double wavelength_from_energy(double energy_kev);

/// Parallel-beam acquisition geometry, SI units throughout.
struct AcquisitionGeometry {
  double wavelength = 0.0;  // m
  double distance = 0.0;    // object to detector, m
  double pixel_pitch = 0.0; // m
  std::size_t n_u = 0;      // detector rows
  std::size_t n_v = 0;      // detector columns
  std::vector<double> angles; // rad, strictly increasing in [0, pi)

  /// Throws InvalidArgument on the first violated invariant.
  void validate() const;

  AcquisitionGeometry with_distance(double r) const {
    AcquisitionGeometry g = *this;
    g.distance = r;
    return g;
  }
};

/// theta_i = i * pi / n for i in [0, n).
std::vector<double> equally_spaced_angles(std::size_t n_views);

/// Per-pixel Fresnel number pitch^2 / (lambda R); +inf when R = 0.
double fresnel_number(const AcquisitionGeometry &geometry);

struct RetrievalConfig {
  double alpha = 1.0;
  double gamma = 350.0;
  double xtol_rel = 1e-6;
  std::size_t max_iterations = 500;
  std::size_t lbfgs_memory = 10;
  double lower_bound = 1e-6;
  double pad_factor = 1.5;
  bool upper_bound_one = false;

  void validate() const;
};

/// DFT frequency bins for an n_u x n_v grid with wrapped (signed) indexing.
class FrequencyGrid {
public:
  FrequencyGrid(double pixel_pitch, std::size_t n_u, std::size_t n_v);

  double d_mu() const noexcept { return d_mu_; }
  double d_nu() const noexcept { return d_nu_; }
  std::size_t n_u() const noexcept { return n_u_; }
  std::size_t n_v() const noexcept { return n_v_; }

  /// k for k < n/2, k - n otherwise.
  static std::int64_t signed_index(std::size_t bin, std::size_t n) noexcept {
    const auto k = static_cast<std::int64_t>(bin);
    const auto nn = static_cast<std::int64_t>(n);
    return 2 * k < nn ? k : k - nn;
  }

  double mu(std::size_t row_bin) const noexcept {
    return static_cast<double>(signed_index(row_bin, n_u_)) * d_mu_;
  }
  double nu(std::size_t col_bin) const noexcept {
    return static_cast<double>(signed_index(col_bin, n_v_)) * d_nu_;
  }
  /// mu^2 + nu^2 at DFT bin (row, col).
  double radial_sq(std::size_t row_bin, std::size_t col_bin) const noexcept {
    const double m = mu(row_bin);
    const double n = nu(col_bin);
    return m * m + n * n;
  }

private:
  double d_mu_;
  double d_nu_;
  std::size_t n_u_;
  std::size_t n_v_;
};

FrequencyGrid frequency_grid(const AcquisitionGeometry &geometry,
                             std::size_t n_u, std::size_t n_v);

/// Placement of an original image inside a padded one.
struct CropWindow {
  std::size_t row0 = 0;
  std::size_t col0 = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
};

/// ceil(factor * n) rounded up to the next even integer.
std::size_t padded_size(std::size_t n, double pad_factor);

template <class T>
struct Padded {
  Grid2D<T> image;
  CropWindow window;
};

/// Edge-replicating pad with the original centered.
template <class T>
Padded<T> pad_edge(const Grid2D<T> &image, double pad_factor);

template <class T>
Grid2D<T> crop(const Grid2D<T> &image, const CropWindow &window);

/// RealImage overloads keep the role tag.
struct PaddedImage {
  RealImage image;
  CropWindow window;
};
PaddedImage pad_edge(const RealImage &image, double pad_factor);
RealImage crop(const RealImage &image, const CropWindow &window);

extern template Padded<double> pad_edge(const Grid2D<double> &, double);
extern template Padded<Complex> pad_edge(const Grid2D<Complex> &, double);
extern template Grid2D<double> crop(const Grid2D<double> &, const CropWindow &);
extern template Grid2D<Complex> crop(const Grid2D<Complex> &,
                                     const CropWindow &);

} // namespace xpct
