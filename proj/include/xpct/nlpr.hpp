//
// xpct - Copyright 2026 The xpct Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <memory>
#include <span>
#include <vector>

#include "xpct/array.hpp"
#include "xpct/core.hpp"
#include "xpct/fresnel.hpp"
#include "xpct/lbfgs.hpp"
#include "xpct/lpr.hpp"

namespace xpct {

/// x^(alpha + i gamma) elementwise; x must be > 0.
ComplexField complex_power(const RealImage &x, double alpha, double gamma);

struct ObjectiveValue {
  double value = 0.0;
  RealImage residual; // |z| - y
  ComplexField z;     // H x^(alpha + i gamma)
};

/// sum_j (y_j - |z_j|)^2 with z = propagate(complex_power(x)).
ObjectiveValue objective(const RealImage &x, const RealImage &y,
                         const PropagatorKernel &kernel, double alpha,
                         double gamma);

/// Analytic gradient of `objective` with respect to x.
RealImage gradient(const RealImage &x, const RealImage &y,
                   const PropagatorKernel &kernel, double alpha, double gamma);

/// Guard on |z| in the phase factor z / |z| of the gradient.
inline constexpr double kMagnitudeGuard = 1e-12;

/// Fused objective + gradient over a fixed measurement, reusing scratch
/// buffers between calls. Not thread-safe; use one instance per view.
class NlprProblem {
public:
  NlprProblem(RealImage y_padded, std::shared_ptr<const PropagatorKernel> kernel,
              double alpha, double gamma);

  double operator()(std::span<const double> x, std::span<double> grad);

  std::size_t rows() const noexcept { return y_.rows(); }
  std::size_t cols() const noexcept { return y_.cols(); }

private:
  RealImage y_;
  std::shared_ptr<const PropagatorKernel> kernel_;
  double alpha_;
  double gamma_;
  ComplexField xt_;
  ComplexField work_;
};

struct NlprResult {
  TransmissionMap x;         // cropped to the detector grid
  TransmissionMap x_padded;  // optimizer variable
  std::vector<TraceEntry> trace;
  LbfgsStatus status = LbfgsStatus::MaxIterations;
  std::size_t iterations = 0;
  double initial_objective = 0.0;
  double final_objective = 0.0;
};

/// Edge-pad y, initialize from LPR on the padded frame, minimize with
/// projected L-BFGS over x >= lower_bound (and x <= 1 when requested),
/// then crop.
NlprResult nlpr_retrieve(const RealImage &y, const AcquisitionGeometry &geometry,
                         const RetrievalConfig &config);

} // namespace xpct
