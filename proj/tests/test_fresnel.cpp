//
// xpct - Copyright 2026 The xpct Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <doctest.h>

#include <random>

#include "test_util.hpp"
#include "xpct/fresnel.hpp"
#include "xpct/simulate.hpp"

using namespace xpct;
using xpct::testing::inner;
using xpct::testing::max_abs_diff;
using xpct::testing::norm2;
using xpct::testing::random_field;

namespace {
AcquisitionGeometry reference_geometry() {
  AcquisitionGeometry g;
  g.wavelength = 6.1992e-11;
  g.distance = 0.1;
  g.pixel_pitch = 0.645e-6;
  g.n_u = 48;
  g.n_v = 64;
  return g;
}
} // namespace

TEST_CASE("propagator kernel") {
  const auto g = reference_geometry();
  const PropagatorKernel h = propagator_kernel(g, 64, 64);
  CHECK(h(0, 0) == Complex(1.0, 0.0));
  for (const auto &v : h.values().values())
    CHECK(std::abs(std::abs(v) - 1.0) < 1e-12);
  CHECK(std::abs(std::arg(h(1, 0)) - (-0.011430)) < 1e-5);

  const PropagatorKernel zero = propagator_kernel(g.with_distance(0.0), 16, 12);
  for (const auto &v : zero.values().values())
    CHECK(v == Complex(1.0, 0.0));

  // even in the signed index: bin k and bin n - k hold the same value
  const PropagatorKernel k2 = propagator_kernel(g, 72, 96);
  for (std::size_t p = 1; p < 72; ++p)
    for (std::size_t q = 1; q < 96; ++q) {
      CHECK(k2(p, q) == k2(72 - p, q));
      CHECK(k2(p, q) == k2(p, 96 - q));
    }
}

TEST_CASE("kernel cache returns shared instances") {
  const auto g = reference_geometry();
  auto a = cached_kernel(g, 72, 96);
  auto b = cached_kernel(g, 72, 96);
  CHECK(a.get() == b.get());
  auto c = cached_kernel(g.with_distance(0.05), 72, 96);
  CHECK(a.get() != c.get());
}

TEST_CASE("propagate basics") {
  std::mt19937_64 rng(1);
  const auto g = reference_geometry();
  const ComplexField x = random_field(24, 32, rng);
  const PropagatorKernel id = propagator_kernel(g.with_distance(0.0), 24, 32);
  CHECK(max_abs_diff(propagate(x, id), x) < 1e-12);
  CHECK(max_abs_diff(adjoint_propagate(x, id), x) < 1e-12);

  const PropagatorKernel h = propagator_kernel(g, 24, 32);
  const ComplexField y = propagate(x, h);
  CHECK(std::abs(norm2(y) / norm2(x) - 1.0) < 1e-10);
  CHECK(max_abs_diff(adjoint_propagate(y, h), x) < 1e-10);

  const PropagatorKernel back = propagator_kernel(g.with_distance(-0.1), 24, 32);
  CHECK(max_abs_diff(propagate(y, back), x) < 1e-10);

  CHECK_THROWS_AS(propagate(x, propagator_kernel(g, 24, 30)), InvalidArgument);
  CHECK_THROWS_AS(adjoint_propagate(x, propagator_kernel(g, 20, 32)),
                  InvalidArgument);
}

TEST_CASE("adjoint identity over random pairs") {
  std::mt19937_64 rng(2);
  const auto g = reference_geometry();
  const PropagatorKernel h = propagator_kernel(g, 18, 22);
  for (int i = 0; i < 100; ++i) {
    const ComplexField a = random_field(18, 22, rng);
    const ComplexField b = random_field(18, 22, rng);
    const Complex lhs = inner(propagate(a, h), b);
    const Complex rhs = inner(a, adjoint_propagate(b, h));
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(std::abs(lhs), 1.0));
  }
}

TEST_CASE("semigroup: R1 then R2 equals R1 + R2") {
  std::mt19937_64 rng(3);
  const auto g = reference_geometry();
  const ComplexField x = random_field(16, 20, rng);
  const auto h1 = propagator_kernel(g.with_distance(0.03), 16, 20);
  const auto h2 = propagator_kernel(g.with_distance(0.07), 16, 20);
  const auto h12 = propagator_kernel(g.with_distance(0.10), 16, 20);
  CHECK(max_abs_diff(propagate(propagate(x, h1), h2), propagate(x, h12)) < 1e-9);
}

TEST_CASE("plane wave stays a plane wave") {
  const auto g = reference_geometry();
  const ComplexField ones(12, 10, Complex(1.0, 0.0));
  const auto h = propagator_kernel(g, 12, 10);
  CHECK(max_abs_diff(propagate(ones, h), ones) < 1e-12);
}
