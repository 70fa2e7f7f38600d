//
// xpct - Copyright 2026 The xpct Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "xpct/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "xpct/errors.hpp"

namespace xpct {

const char *to_string(LbfgsStatus status) {
  switch (status) {
  case LbfgsStatus::XtolReached:
    return "xtol_reached";
  case LbfgsStatus::MaxIterations:
    return "max_iterations";
  case LbfgsStatus::LineSearchStalled:
    return "line_search_stalled";
  case LbfgsStatus::Stationary:
    return "stationary";
  }
  return "unknown";
}

namespace {
  struct CurvaturePair {
    std::vector<double> s;
    std::vector<double> y;
    double rho;
  };

  double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
      acc += a[i] * b[i];
    return acc;
  }

  double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

  bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(),
                       [](double x) { return std::isfinite(x); });
  }

  // A coordinate sitting on a bound with the gradient pushing outward is
  // held fixed for this iteration.
  bool is_fixed(double x, double g, const LbfgsOptions &o) {
    return (x <= o.lower_bound && g > 0.0) || (x >= o.upper_bound && g < 0.0);
  }

  void two_loop(const std::deque<CurvaturePair> &history,
                std::span<const double> grad, std::span<double> dir) {
    std::vector<double> q(grad.begin(), grad.end());
    std::vector<double> alpha(history.size());
    for (std::size_t k = history.size(); k-- > 0;) {
      const auto &p = history[k];
      alpha[k] = p.rho * dot(p.s, q);
      for (std::size_t i = 0; i < q.size(); ++i)
        q[i] -= alpha[k] * p.y[i];
    }
    const auto &last = history.back();
    const double h0 = dot(last.s, last.y) / dot(last.y, last.y);
    for (double &v : q)
      v *= h0;
    for (std::size_t k = 0; k < history.size(); ++k) {
      const auto &p = history[k];
      const double b = p.rho * dot(p.y, q);
      for (std::size_t i = 0; i < q.size(); ++i)
        q[i] += p.s[i] * (alpha[k] - b);
    }
    for (std::size_t i = 0; i < q.size(); ++i)
      dir[i] = -q[i];
  }
} // namespace

LbfgsResult lbfgs_minimize(const ObjectiveFn &objective,
                           std::vector<double> x0,
                           const LbfgsOptions &options) {
  if (options.memory < 1)
    throw InvalidArgument("lbfgs: memory must be >= 1");
  if (!(options.xtol_rel > 0.0))
    throw InvalidArgument("lbfgs: xtol_rel must be > 0");
  if (!(options.lower_bound < options.upper_bound))
    throw InvalidArgument("lbfgs: empty feasible box");
  if (x0.empty())
    throw InvalidArgument("lbfgs: empty starting point");
  for (double v : x0)
    if (!(v >= options.lower_bound && v <= options.upper_bound))
      throw InvalidArgument("lbfgs: starting point outside bounds");

  const std::size_t n = x0.size();
  LbfgsResult result;
  result.x = std::move(x0);
  std::vector<double> grad(n);
  double f = objective(result.x, grad);
  result.evaluations = 1;
  result.trace.push_back({0, f});
  if (!std::isfinite(f) || !all_finite(grad))
    throw OptimizationFailure("lbfgs: non-finite objective or gradient at start",
                              result.trace);

  auto project = [&](double v) {
    return std::clamp(v, options.lower_bound, options.upper_bound);
  };

  std::deque<CurvaturePair> history;
  std::vector<double> free_grad(n), dir(n), x_new(n), grad_new(n);
  result.status = LbfgsStatus::MaxIterations;

  for (std::size_t iter = 1; iter <= options.max_iterations; ++iter) {
    bool any_free = false;
    for (std::size_t i = 0; i < n; ++i) {
      const bool fixed = is_fixed(result.x[i], grad[i], options);
      free_grad[i] = fixed ? 0.0 : grad[i];
      any_free = any_free || free_grad[i] != 0.0;
    }
    if (!any_free) {
      result.status = LbfgsStatus::Stationary;
      break;
    }

    bool accepted = false;
    bool steepest = false;
    double f_new = f;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      steepest = history.empty();
      double step = 1.0;
      if (steepest) {
        for (std::size_t i = 0; i < n; ++i)
          dir[i] = -free_grad[i];
        step = std::min(1.0, 1.0 / norm2(free_grad));
      } else {
        two_loop(history, free_grad, dir);
        for (std::size_t i = 0; i < n; ++i)
          if (free_grad[i] == 0.0)
            dir[i] = 0.0;
        if (dot(dir, free_grad) >= 0.0) {
          history.clear();
          continue;
        }
      }

      for (std::size_t bt = 0; bt < options.max_backtracks; ++bt, step *= 0.5) {
        double decrease = 0.0;
        bool moved = false;
        for (std::size_t i = 0; i < n; ++i) {
          x_new[i] = project(result.x[i] + step * dir[i]);
          const double dx = x_new[i] - result.x[i];
          decrease += grad[i] * dx;
          moved = moved || dx != 0.0;
        }
        if (!moved)
          break;
        if (decrease >= 0.0)
          continue;
        f_new = objective(x_new, grad_new);
        ++result.evaluations;
        if (!std::isfinite(f_new) || !all_finite(grad_new)) {
          result.trace.push_back({iter, f_new});
          throw OptimizationFailure(
              "lbfgs: non-finite objective or gradient at iteration "
                  + std::to_string(iter),
              result.trace);
        }
        if (f_new <= f + options.armijo_c1 * decrease) {
          accepted = true;
          break;
        }
      }
      if (!accepted)
        history.clear();
      if (!accepted && steepest)
        break;
    }
    if (!accepted) {
      result.status = LbfgsStatus::LineSearchStalled;
      break;
    }

    CurvaturePair pair{std::vector<double>(n), std::vector<double>(n), 0.0};
    double max_rel_step = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      pair.s[i] = x_new[i] - result.x[i];
      pair.y[i] = grad_new[i] - grad[i];
      max_rel_step = std::max(max_rel_step,
                              std::abs(pair.s[i]) / std::max(std::abs(x_new[i]), 1.0));
    }
    const double sy = dot(pair.s, pair.y);
    if (sy > 1e-10 * norm2(pair.s) * norm2(pair.y)) {
      pair.rho = 1.0 / sy;
      history.push_back(std::move(pair));
      if (history.size() > options.memory)
        history.pop_front();
    }

    result.x.swap(x_new);
    grad.swap(grad_new);
    f = f_new;
    result.iterations = iter;
    result.trace.push_back({iter, f});

    // A scaled steepest-descent step carries no curvature information, so
    // its length says nothing about convergence.
    if (!steepest && max_rel_step < options.xtol_rel) {
      result.status = LbfgsStatus::XtolReached;
      break;
    }
  }
  result.objective = f;
  return result;
}

} // namespace xpct
