//
// xpct - Copyright 2026 The xpct Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <memory>

#include "xpct/array.hpp"
#include "xpct/core.hpp"

namespace xpct {

/// Discrete Fresnel transfer function H(p, q) on a DFT grid. Pure phase.
class PropagatorKernel {
public:
  PropagatorKernel(double wavelength, double distance, double pixel_pitch,
                   std::size_t n_u, std::size_t n_v);

  std::size_t rows() const noexcept { return values_.rows(); }
  std::size_t cols() const noexcept { return values_.cols(); }
  double wavelength() const noexcept { return wavelength_; }
  double distance() const noexcept { return distance_; }
  double pixel_pitch() const noexcept { return pixel_pitch_; }

  const Complex &operator()(std::size_t p, std::size_t q) const {
    return values_(p, q);
  }
  const ComplexField &values() const noexcept { return values_; }

private:
  double wavelength_;
  double distance_;
  double pixel_pitch_;
  ComplexField values_;
};

/// H(p,q) = exp(-i pi lambda R ((p dmu)^2 + (q dnu)^2)) for the given
/// (padded) dims.
PropagatorKernel propagator_kernel(const AcquisitionGeometry &geometry,
                                   std::size_t n_u, std::size_t n_v);

/// Shared, process-wide kernel cache keyed by (lambda, R, pitch, dims).
std::shared_ptr<const PropagatorKernel>
cached_kernel(double wavelength, double distance, double pixel_pitch,
              std::size_t n_u, std::size_t n_v);

std::shared_ptr<const PropagatorKernel>
cached_kernel(const AcquisitionGeometry &geometry, std::size_t n_u,
              std::size_t n_v);

/// IDFT(DFT(field) * H).
ComplexField propagate(const ComplexField &field,
                       const PropagatorKernel &kernel);

/// IDFT(DFT(field) * conj(H)); the exact inverse of propagate.
ComplexField adjoint_propagate(const ComplexField &field,
                               const PropagatorKernel &kernel);

/// In-place variants used on hot paths.
void propagate_inplace(ComplexField &field, const PropagatorKernel &kernel);
void adjoint_propagate_inplace(ComplexField &field,
                               const PropagatorKernel &kernel);

} // namespace xpct
