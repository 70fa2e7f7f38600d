//
// xpct - Copyright 2026 The xpct Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <doctest.h>

#include <cmath>
#include <random>

#include "xpct/errors.hpp"
#include "xpct/lbfgs.hpp"

using namespace xpct;

namespace {

ObjectiveFn shifted_quadratic(std::vector<double> c) {
  return [c](std::span<const double> x, std::span<double> g) {
    double f = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = x[i] - c[i];
      f += d * d;
      g[i] = 2.0 * d;
    }
    return f;
  };
}

void check_monotone(const LbfgsResult &r) {
  REQUIRE(!r.trace.empty());
  for (std::size_t i = 1; i < r.trace.size(); ++i)
    CHECK(r.trace[i].objective <= r.trace[i - 1].objective);
  CHECK(r.trace.back().objective == r.objective);
}

} // namespace

TEST_CASE("quadratic with an interior minimum") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(0.5, 3.0);
  std::vector<double> c(50);
  for (auto &v : c)
    v = d(rng);
  LbfgsOptions opt;
  opt.xtol_rel = 1e-12;
  const auto r = lbfgs_minimize(shifted_quadratic(c), std::vector<double>(50, 1.0), opt);
  CHECK(r.iterations <= 25);
  for (std::size_t i = 0; i < c.size(); ++i)
    CHECK(std::abs(r.x[i] - c[i]) < 1e-8);
  check_monotone(r);
}

TEST_CASE("projection onto the lower bound") {
  const std::vector<double> c{-1.0, 0.05, 0.5, 2.0, -3.0};
  LbfgsOptions opt;
  opt.lower_bound = 0.1;
  opt.xtol_rel = 1e-12;
  const auto r = lbfgs_minimize(shifted_quadratic(c), std::vector<double>(5, 1.0), opt);
  for (std::size_t i = 0; i < c.size(); ++i)
    CHECK(std::abs(r.x[i] - std::max(c[i], 0.1)) < 1e-8);
  check_monotone(r);
}

TEST_CASE("upper bound") {
  const std::vector<double> c{0.5, 2.0};
  LbfgsOptions opt;
  opt.upper_bound = 1.0;
  opt.xtol_rel = 1e-12;
  const auto r = lbfgs_minimize(shifted_quadratic(c), {0.2, 0.2}, opt);
  CHECK(std::abs(r.x[0] - 0.5) < 1e-8);
  CHECK(r.x[1] == 1.0);
}

TEST_CASE("rosenbrock") {
  ObjectiveFn f = [](std::span<const double> x, std::span<double> g) {
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    g[0] = -2.0 * a - 400.0 * x[0] * b;
    g[1] = 200.0 * b;
    return a * a + 100.0 * b * b;
  };
  LbfgsOptions opt;
  opt.lower_bound = -5.0;
  opt.xtol_rel = 1e-12;
  opt.max_iterations = 1000;
  const auto r = lbfgs_minimize(f, {-1.2, 1.0}, opt);
  CHECK(std::abs(r.x[0] - 1.0) < 1e-5);
  CHECK(std::abs(r.x[1] - 1.0) < 1e-5);
  check_monotone(r);
}

TEST_CASE("iteration budget") {
  const std::vector<double> c(10, 4.0);
  LbfgsOptions opt;
  opt.max_iterations = 0;
  const auto r0 = lbfgs_minimize(shifted_quadratic(c), std::vector<double>(10, 1.0), opt);
  CHECK(r0.iterations == 0);
  CHECK(r0.x == std::vector<double>(10, 1.0));
  CHECK(r0.trace.size() == 1);
  CHECK(r0.status == LbfgsStatus::MaxIterations);

  opt.max_iterations = 2;
  opt.xtol_rel = 1e-300;
  const auto r2 = lbfgs_minimize(shifted_quadratic(c), std::vector<double>(10, 1.0), opt);
  CHECK(r2.iterations <= 2);
}

TEST_CASE("stationary start") {
  const std::vector<double> c{1.0, 2.0};
  const auto r = lbfgs_minimize(shifted_quadratic(c), c, LbfgsOptions{});
  CHECK(r.status == LbfgsStatus::Stationary);
  CHECK(r.iterations == 0);
}

TEST_CASE("non-finite objective carries the trace") {
  int calls = 0;
  ObjectiveFn f = [&](std::span<const double> x, std::span<double> g) {
    ++calls;
    g[0] = 2.0 * (x[0] - 3.0);
    if (calls > 1)
      return std::numeric_limits<double>::quiet_NaN();
    return (x[0] - 3.0) * (x[0] - 3.0);
  };
  try {
    lbfgs_minimize(f, {0.0}, LbfgsOptions{});
    FAIL("expected OptimizationFailure");
  } catch (const OptimizationFailure &e) {
    CHECK(e.trace().size() == 2);
    CHECK(e.trace()[0].objective == 9.0);
  }
}

TEST_CASE("invalid start") {
  LbfgsOptions opt;
  opt.lower_bound = 1.0;
  CHECK_THROWS_AS(lbfgs_minimize(shifted_quadratic({2.0}), {0.5}, opt),
                  InvalidArgument);
  CHECK_THROWS_AS(lbfgs_minimize(shifted_quadratic({}), {}, LbfgsOptions{}),
                  InvalidArgument);
  CHECK(std::string(to_string(LbfgsStatus::XtolReached)) == "xtol_reached");
}
