//
// xpct - Copyright 2026 The xpct Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "xpct/fresnel.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <tuple>

#include "xpct/fft.hpp"

namespace xpct {

PropagatorKernel::PropagatorKernel(double wavelength, double distance,
                                   double pixel_pitch, std::size_t n_u,
                                   std::size_t n_v)
    : wavelength_(wavelength), distance_(distance), pixel_pitch_(pixel_pitch),
      values_(n_u, n_v, Complex(1.0, 0.0)) {
  const FrequencyGrid grid(pixel_pitch, n_u, n_v);
  const double scale = kPi * wavelength * distance;
  if (scale == 0.0)
    return;
  for (std::size_t p = 0; p < n_u; ++p)
    for (std::size_t q = 0; q < n_v; ++q)
      values_(p, q) = std::polar(1.0, -scale * grid.radial_sq(p, q));
}

PropagatorKernel propagator_kernel(const AcquisitionGeometry &geometry,
                                   std::size_t n_u, std::size_t n_v) {
  return PropagatorKernel(geometry.wavelength, geometry.distance,
                          geometry.pixel_pitch, n_u, n_v);
}

namespace {
  using KernelKey =
      std::tuple<double, double, double, std::size_t, std::size_t>;

  struct KernelCache {
    std::shared_mutex mutex;
    std::map<KernelKey, std::shared_ptr<const PropagatorKernel>> entries;
  };

  KernelCache &kernel_cache() {
    static KernelCache cache;
    return cache;
  }

  void check_dims(const ComplexField &field, const PropagatorKernel &kernel) {
    if (field.rows() != kernel.rows() || field.cols() != kernel.cols())
      throw InvalidArgument("propagate: field is "
                            + std::to_string(field.rows()) + "x"
                            + std::to_string(field.cols()) + " but kernel is "
                            + std::to_string(kernel.rows()) + "x"
                            + std::to_string(kernel.cols()));
  }
} // namespace

std::shared_ptr<const PropagatorKernel>
cached_kernel(double wavelength, double distance, double pixel_pitch,
              std::size_t n_u, std::size_t n_v) {
  auto &cache = kernel_cache();
  const KernelKey key{wavelength, distance, pixel_pitch, n_u, n_v};
  {
    std::shared_lock lock(cache.mutex);
    if (auto it = cache.entries.find(key); it != cache.entries.end())
      return it->second;
  }
  auto kernel = std::make_shared<const PropagatorKernel>(
      wavelength, distance, pixel_pitch, n_u, n_v);
  std::unique_lock lock(cache.mutex);
  auto [it, inserted] = cache.entries.emplace(key, std::move(kernel));
  return it->second;
}

std::shared_ptr<const PropagatorKernel>
cached_kernel(const AcquisitionGeometry &geometry, std::size_t n_u,
              std::size_t n_v) {
  return cached_kernel(geometry.wavelength, geometry.distance,
                       geometry.pixel_pitch, n_u, n_v);
}

void propagate_inplace(ComplexField &field, const PropagatorKernel &kernel) {
  check_dims(field, kernel);
  fft::forward(field);
  const auto h = kernel.values().values();
  auto f = field.values();
  for (std::size_t i = 0; i < f.size(); ++i)
    f[i] *= h[i];
  fft::inverse(field);
}

void adjoint_propagate_inplace(ComplexField &field,
                               const PropagatorKernel &kernel) {
  check_dims(field, kernel);
  fft::forward(field);
  const auto h = kernel.values().values();
  auto f = field.values();
  for (std::size_t i = 0; i < f.size(); ++i)
    f[i] *= std::conj(h[i]);
  fft::inverse(field);
}

ComplexField propagate(const ComplexField &field,
                       const PropagatorKernel &kernel) {
  ComplexField out = field;
  propagate_inplace(out, kernel);
  return out;
}

ComplexField adjoint_propagate(const ComplexField &field,
                               const PropagatorKernel &kernel) {
  ComplexField out = field;
  adjoint_propagate_inplace(out, kernel);
  return out;
}

} // namespace xpct
