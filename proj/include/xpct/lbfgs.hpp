//
// xpct - Copyright 2026 The xpct Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace xpct {

/// Objective callback: returns f(x) and writes grad f(x) into `grad`.
using ObjectiveFn =
    std::function<double(std::span<const double> x, std::span<double> grad)>;

struct LbfgsOptions {
  std::size_t memory = 10;
  double xtol_rel = 1e-6;
  std::size_t max_iterations = 500;
  double lower_bound = 0.0;
  double upper_bound = std::numeric_limits<double>::infinity();
  double armijo_c1 = 1e-4;
  std::size_t max_backtracks = 60;
};

enum class LbfgsStatus {
  XtolReached,
  MaxIterations,
  LineSearchStalled, // no decrease representable along the search direction
  Stationary,        // projected gradient is exactly zero
};

const char *to_string(LbfgsStatus status);

struct TraceEntry {
  std::size_t iteration;
  double objective;
};

struct LbfgsResult {
  std::vector<double> x;
  double objective = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  LbfgsStatus status = LbfgsStatus::MaxIterations;
  /// Entry 0 is the starting point; one entry per accepted step after that.
  std::vector<TraceEntry> trace;
};

/// Thrown when f or grad f becomes non-finite; carries the trace so far.
class OptimizationFailure : public std::runtime_error {
public:
  OptimizationFailure(const std::string &what, std::vector<TraceEntry> trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const std::vector<TraceEntry> &trace() const noexcept { return trace_; }

private:
  std::vector<TraceEntry> trace_;
};

/// Projected L-BFGS for box constraints [lower, upper]. Two-loop recursion,
/// Armijo backtracking along the projected path, projection after every
/// step. Stops when max_j |dx_j| / max(|x_j|, 1) < xtol_rel.
LbfgsResult lbfgs_minimize(const ObjectiveFn &objective,
                           std::vector<double> x0, const LbfgsOptions &options);

} // namespace xpct
