//
// xpct - Copyright 2026 The xpct Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "xpct/nlpr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace xpct {
namespace {
  void check_positive(std::span<const double> x, const char *where) {
    for (std::size_t i = 0; i < x.size(); ++i)
      if (!(x[i] > 0.0))
        throw InvalidData(std::string(where) + ": x must be > 0, got "
                          + std::to_string(x[i]) + " at pixel "
                          + std::to_string(i));
  }

  void power_into(std::span<const double> x, double alpha, double gamma,
                  std::span<Complex> out) {
    const Complex exponent(alpha, gamma);
    for (std::size_t i = 0; i < x.size(); ++i)
      out[i] = std::exp(exponent * std::log(x[i]));
  }

  void check_shapes(const RealImage &x, const RealImage &y,
                    const PropagatorKernel &kernel) {
    if (!x.same_shape(y) || x.rows() != kernel.rows()
        || x.cols() != kernel.cols())
      throw InvalidArgument("nlpr: x, y and kernel dims must agree");
  }
} // namespace

ComplexField complex_power(const RealImage &x, double alpha, double gamma) {
  check_positive(x.values(), "complex_power");
  ComplexField out(x.rows(), x.cols());
  power_into(x.values(), alpha, gamma, out.values());
  return out;
}

ObjectiveValue objective(const RealImage &x, const RealImage &y,
                         const PropagatorKernel &kernel, double alpha,
                         double gamma) {
  check_shapes(x, y, kernel);
  ObjectiveValue out;
  out.z = complex_power(x, alpha, gamma);
  propagate_inplace(out.z, kernel);
  out.residual = RealImage(x.rows(), x.cols());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = std::abs(out.z[i]) - y[i];
    out.residual[i] = r;
    out.value += r * r;
  }
  return out;
}

RealImage gradient(const RealImage &x, const RealImage &y,
                   const PropagatorKernel &kernel, double alpha, double gamma) {
  ObjectiveValue ov = objective(x, y, kernel, alpha, gamma);
  ComplexField back(x.rows(), x.cols());
  for (std::size_t i = 0; i < back.size(); ++i) {
    const double mag = std::abs(ov.z[i]);
    back[i] = ov.residual[i] * ov.z[i] / std::max(mag, kMagnitudeGuard);
  }
  adjoint_propagate_inplace(back, kernel);
  const Complex exponent(alpha, gamma);
  RealImage g(x.rows(), x.cols());
  for (std::size_t i = 0; i < g.size(); ++i) {
    // d/dx x^(a+ig) = (a+ig) x^(a+ig) / x
    const Complex dpow = exponent * std::exp(exponent * std::log(x[i])) / x[i];
    g[i] = 2.0 * (std::conj(dpow) * back[i]).real();
  }
  return g;
}

NlprProblem::NlprProblem(RealImage y_padded,
                         std::shared_ptr<const PropagatorKernel> kernel,
                         double alpha, double gamma)
    : y_(std::move(y_padded)), kernel_(std::move(kernel)), alpha_(alpha),
      gamma_(gamma), xt_(y_.rows(), y_.cols()), work_(y_.rows(), y_.cols()) {
  if (!kernel_ || kernel_->rows() != y_.rows() || kernel_->cols() != y_.cols())
    throw InvalidArgument("NlprProblem: kernel dims must match measurement");
}

double NlprProblem::operator()(std::span<const double> x,
                               std::span<double> grad) {
  if (x.size() != y_.size() || grad.size() != y_.size())
    throw InvalidArgument("NlprProblem: size mismatch");
  check_positive(x, "nlpr objective");
  power_into(x, alpha_, gamma_, xt_.values());
  work_ = xt_;
  propagate_inplace(work_, *kernel_);

  double value = 0.0;
  for (std::size_t i = 0; i < work_.size(); ++i) {
    const Complex z = work_[i];
    const double mag = std::abs(z);
    const double r = mag - y_[i];
    value += r * r;
    work_[i] = r * z / std::max(mag, kMagnitudeGuard);
  }
  adjoint_propagate_inplace(work_, *kernel_);
  const Complex exponent(alpha_, gamma_);
  for (std::size_t i = 0; i < grad.size(); ++i) {
    const Complex dpow = exponent * xt_[i] / x[i];
    grad[i] = 2.0 * (std::conj(dpow) * work_[i]).real();
  }
  return value;
}

NlprResult nlpr_retrieve(const RealImage &y, const AcquisitionGeometry &geometry,
                         const RetrievalConfig &config) {
  config.validate();
  const auto padded = pad_edge(y, config.pad_factor);
  TransmissionMap x0 = lpr_retrieve_padded(padded.image, geometry, config);
  const double upper =
      config.upper_bound_one ? 1.0 : std::numeric_limits<double>::infinity();
  for (auto &v : x0.values())
    v = std::clamp(v, config.lower_bound, upper);

  auto kernel = cached_kernel(geometry, x0.rows(), x0.cols());
  NlprProblem problem(padded.image, kernel, config.alpha, config.gamma);

  LbfgsOptions options;
  options.memory = config.lbfgs_memory;
  options.xtol_rel = config.xtol_rel;
  options.max_iterations = config.max_iterations;
  options.lower_bound = config.lower_bound;
  options.upper_bound = upper;

  NlprResult out;
  if (config.max_iterations == 0) {
    std::vector<double> scratch(x0.size());
    out.initial_objective = out.final_objective = problem(x0.values(), scratch);
    out.trace.push_back({0, out.initial_objective});
    out.x = crop(x0, padded.window);
    out.x_padded = std::move(x0);
    return out;
  }

  LbfgsResult res = lbfgs_minimize(
      [&problem](std::span<const double> x, std::span<double> g) {
        return problem(x, g);
      },
      x0.storage(), options);

  out.x_padded = TransmissionMap(
      Grid2D<double>(x0.rows(), x0.cols(), std::move(res.x)),
      ImageRole::Transmission);
  out.x = crop(out.x_padded, padded.window);
  out.trace = std::move(res.trace);
  out.status = res.status;
  out.iterations = res.iterations;
  out.initial_objective = out.trace.front().objective;
  out.final_objective = res.objective;
  return out;
}

} // namespace xpct
