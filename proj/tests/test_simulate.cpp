//
// xpct - Copyright 2026 The xpct Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <doctest.h>

#include <algorithm>
#include <random>

#include "test_util.hpp"
#include "xpct/fresnel.hpp"
#include "xpct/parallel.hpp"
#include "xpct/simulate.hpp"

using namespace xpct;

namespace {
constexpr double kUm = 1e-6;

// Small phantom with voxel width equal to the detector pitch.
PhantomSpec isolated_sphere(double radius_vox, double value_delta,
                            double value_beta) {
  PhantomSpec s;
  s.n_slices = 32;
  s.n_rows = 48;
  s.n_cols = 48;
  s.voxel_width = 1.0 * kUm;
  // Half-voxel offsets put the center on a detector pixel center.
  s.spheres = {{0.5 * kUm, 0.5 * kUm, 0.0, radius_vox * kUm, value_delta,
                value_beta}};
  return s;
}

AcquisitionGeometry unit_geometry(std::size_t n_u, std::size_t n_v) {
  AcquisitionGeometry g;
  g.wavelength = wavelength_from_energy(20.0);
  g.distance = 0.1;
  g.pixel_pitch = 1.0 * kUm;
  g.n_u = n_u;
  g.n_v = n_v;
  g.angles = equally_spaced_angles(8);
  return g;
}
} // namespace

TEST_CASE("build_phantom occupancy") {
  const auto spec = isolated_sphere(8.0, 1.67e-6, 4.77e-9);
  const auto vols = build_phantom(spec);
  // voxel (16, 24, 24) is centered at (0.5, 0.5, 0.5) um: deep inside
  CHECK(vols.delta(16, 24, 24) == 1.67e-6);
  CHECK(vols.beta(16, 24, 24) == 4.77e-9);
  CHECK(vols.delta(0, 0, 0) == 0.0);
  CHECK(vols.delta(16, 24, 47) == 0.0);

  PhantomSpec outside = spec;
  outside.spheres[0].v = 20 * kUm;
  CHECK_THROWS_AS(build_phantom(outside), InvalidArgument);
  PhantomSpec bad = spec;
  bad.spheres[0].radius = 0;
  CHECK_THROWS_AS(build_phantom(bad), InvalidArgument);
}

TEST_CASE("build_phantom later sphere wins on overlap") {
  PhantomSpec s = isolated_sphere(6.0, 1.0, 0.0);
  s.spheres.push_back({0.5 * kUm, 0.5 * kUm, 0.0, 3.0 * kUm, 2.0, 0.0});
  const auto vols = build_phantom(s);
  CHECK(vols.delta(16, 24, 24) == 2.0);
  CHECK(vols.delta(16, 24, 29) == 1.0);
}

TEST_CASE("phantom mass matches analytic sphere volumes") {
  const PhantomSpec spec = single_material_phantom();
  const auto vols = build_phantom(spec);
  double sum = 0.0;
  for (double v : vols.delta.values())
    sum += v;
  const double vw = spec.voxel_width;
  const double voxel_mass = sum * vw * vw * vw;
  double analytic = 0.0;
  for (const auto &s : spec.spheres)
    analytic += 4.0 / 3.0 * kPi * s.radius * s.radius * s.radius * s.delta;
  CHECK(std::abs(voxel_mass / analytic - 1.0) < 0.01);

  const Volume down = downsample2(vols.delta);
  CHECK(down.slices() == 48);
  CHECK(down.rows() == 64);
  CHECK(down.cols() == 64);
  double down_sum = 0.0;
  for (double v : down.values())
    down_sum += v;
  CHECK(down_sum * 8.0 == doctest::Approx(sum).epsilon(1e-12));
}

TEST_CASE("project_volume") {
  const auto g = unit_geometry(32, 48);
  const Volume zero(32, 48, 48, 1.0 * kUm);
  const RealImage p0 = project_volume(zero, 0.3, g);
  for (double v : p0.values())
    CHECK(v == 0.0);

  const auto spec = isolated_sphere(10.0, 1.0, 0.0);
  const auto vols = build_phantom(spec);
  for (double angle : {0.0, 0.4, 1.3}) {
    const RealImage p = project_volume(vols.delta, angle, g);
    // center pixel (16, 24) sits on the sphere axis
    CHECK(std::abs(p(16, 24) / (2.0 * 10.0 * kUm) - 1.0) < 0.02);
    CHECK(p(16, 24 + 12) == 0.0);
    CHECK(p(16 + 12, 24) == 0.0);
  }

  CHECK_THROWS_AS(project_volume(Volume(), 0.0, g), InvalidArgument);
  auto g_bad = g;
  g_bad.pixel_pitch = 1.5 * kUm;
  CHECK_THROWS_AS(project_volume(vols.delta, 0.0, g_bad), InvalidArgument);
}

TEST_CASE("rotational invariance of a centered sphere") {
  PhantomSpec spec = isolated_sphere(9.0, 1.0, 0.0);
  spec.spheres[0].v = 0.0; // on the rotation axis
  auto g = unit_geometry(32, 48);
  g.angles = equally_spaced_angles(12);

  const RealImage ref = analytic_projections(spec, 0.0, g).phase;
  double peak = 0.0;
  for (double v : ref.values())
    peak = std::max(peak, v);
  for (double angle : g.angles) {
    const RealImage p = analytic_projections(spec, angle, g).phase;
    for (std::size_t i = 0; i < p.size(); ++i)
      CHECK(std::abs(p[i] - ref[i]) <= 1e-6 * peak);
  }

  // The voxelized sphere is only approximately round.
  const auto vols = build_phantom(spec);
  const RealImage vref = project_volume(vols.delta, 0.0, g);
  for (double angle : g.angles) {
    const RealImage p = project_volume(vols.delta, angle, g);
    double worst = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      worst = std::max(worst, std::abs(p[i] - vref[i]));
      sq += (p[i] - vref[i]) * (p[i] - vref[i]);
    }
    CHECK(worst <= 0.05 * 18.0 * kUm);
    CHECK(std::sqrt(sq / p.size()) <= 0.01 * 18.0 * kUm);
  }
}

TEST_CASE("projections of a SiC sphere") {
  const double lambda = 6.1992e-11;
  PhantomSpec spec;
  spec.n_slices = 48;
  spec.n_rows = 64;
  spec.n_cols = 64;
  spec.voxel_width = 0.3225 * kUm;
  // center on a detector pixel center of the 0.645 um grid
  spec.spheres = {{0.3225 * kUm, 0.3225 * kUm, 0.0, 4.0 * kUm, 1.67e-6, 4.77e-9}};
  AcquisitionGeometry g;
  g.wavelength = lambda;
  g.distance = 0.1;
  g.pixel_pitch = 0.645 * kUm;
  g.n_u = 24;
  g.n_v = 32;
  g.angles = {0.0};

  const ProjectionPair exact = analytic_projections(spec, 0.0, g);
  CHECK(std::abs(exact.absorption(12, 16) / 3.868e-3 - 1.0) < 0.01);
  CHECK(std::abs(exact.phase(12, 16) / 1.354 - 1.0) < 0.01);

  const ProjectionPair vox = projections_from_phantom(spec, 0.7, g);
  CHECK(std::abs(vox.absorption(12, 16) / 3.868e-3 - 1.0) < 0.01);
  CHECK(std::abs(vox.phase(12, 16) / 1.354 - 1.0) < 0.01);

  const double ratio = 1.67e-6 / 4.77e-9; // 350.1
  for (std::size_t i = 0; i < vox.phase.size(); ++i) {
    if (vox.absorption[i] <= 0.0)
      continue;
    CHECK(std::abs(vox.phase[i] / vox.absorption[i] / ratio - 1.0) < 1e-6);
  }
}

TEST_CASE("transmission from projections") {
  RealImage a(1, 3), p(1, 3);
  a[1] = 3.868e-3;
  p[1] = 1.354;
  a[2] = 0.5;
  p[2] = -2.0;
  const ComplexField t = transmission_from_projections({a, p});
  CHECK(t[0] == Complex(1.0, 0.0));
  CHECK(std::abs(std::abs(t[1]) - 0.99614) < 1e-5);
  CHECK(std::abs(std::arg(t[1]) + 1.354) < 1e-12);
  for (const auto &v : t.values())
    CHECK(std::abs(v) <= 1.0);
}

TEST_CASE("forward_intensity") {
  const AcquisitionGeometry g = default_geometry();
  const ComplexField ones(48, 64, Complex(1.0, 0.0));
  const RealImage flat = forward_intensity(ones, g, 1e4, 1.5);
  for (double v : flat.values())
    CHECK(std::abs(v - 1e4) < 1e-6);

  std::mt19937_64 rng(4);
  const ComplexField f = testing::random_field(72, 96, rng);
  const auto h = cached_kernel(g, 72, 96);
  const ComplexField z = propagate(f, *h);
  double e_in = 0.0, e_out = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    e_in += std::norm(f[i]);
    e_out += std::norm(z[i]);
  }
  CHECK(std::abs(e_out / e_in - 1.0) < 1e-9);
  CHECK_THROWS_AS(forward_intensity(ones, g, 0.0, 1.5), InvalidArgument);
}

TEST_CASE("phase contrast fringes exceed the flat field") {
  const AcquisitionGeometry g = default_geometry();
  const PhantomSpec spec = single_material_phantom();
  const ProjectionPair pair = analytic_projections(spec, 0.0, g, 2);
  const RealImage raw =
      forward_intensity(transmission_from_projections(pair), g, 1e4, 1.5);
  double mx = 0.0;
  for (double v : raw.values())
    mx = std::max(mx, v);
  CHECK(mx > 1e4);
}

TEST_CASE("poisson noise") {
  RealImage zero(4, 4, 0.0);
  const RealImage z = apply_poisson_noise(zero, 3, 0);
  for (double v : z.values())
    CHECK(v == 0.0);

  RealImage mean(400, 300, 1e4);
  const RealImage n = apply_poisson_noise(mean, 42, 5);
  double s = 0.0, s2 = 0.0;
  for (double v : n.values()) {
    s += v;
    s2 += v * v;
  }
  const double count = static_cast<double>(n.size());
  const double m = s / count;
  const double var = s2 / count - m * m;
  CHECK(std::abs(m / 1e4 - 1.0) < 0.01);
  CHECK(var / m >= 0.97);
  CHECK(var / m <= 1.03);

  CHECK(apply_poisson_noise(mean, 42, 5) == n);
  CHECK_FALSE(apply_poisson_noise(mean, 42, 6) == n);
  CHECK_FALSE(apply_poisson_noise(mean, 43, 5) == n);

  RealImage neg(2, 2, 1.0);
  neg[3] = -1.0;
  CHECK_THROWS_AS(apply_poisson_noise(neg, 1, 0), InvalidArgument);
}

TEST_CASE("poisson noise is independent of worker count") {
  RealImage mean(20, 30, 500.0);
  std::vector<RealImage> serial(16), pooled(16);
  parallel_for(16, 1, [&](std::size_t v) { serial[v] = apply_poisson_noise(mean, 9, v); });
  parallel_for(16, 4, [&](std::size_t v) { pooled[v] = apply_poisson_noise(mean, 9, v); });
  for (std::size_t v = 0; v < 16; ++v)
    CHECK(serial[v] == pooled[v]);
}

TEST_CASE("normalize") {
  RealImage raw(1, 3), bright(1, 3, 100.0), dark(1, 3, 0.0);
  raw[0] = 100.0;
  raw[1] = 0.0;
  raw[2] = 25.0;
  const RealImage y = normalize(raw, bright, dark);
  CHECK(y[0] == 1.0);
  CHECK(y[1] == 0.0);
  CHECK(y[2] == 0.5);
  CHECK(y.role() == ImageRole::NormalizedSqrt);

  RealImage dark2(1, 3, 10.0);
  raw[1] = 10.0;
  CHECK(normalize(raw, bright, dark2)[1] == 0.0);
  raw[1] = 3.0; // below dark: clamped
  CHECK(normalize(raw, bright, dark2)[1] == 0.0);

  bright[2] = 0.0;
  try {
    normalize(raw, bright, dark);
    FAIL("expected InvalidData");
  } catch (const InvalidData &e) {
    CHECK(std::string(e.what()).find("(0, 2)") != std::string::npos);
  }
}

TEST_CASE("noiseless normalization reproduces the propagated magnitude") {
  const AcquisitionGeometry g = default_geometry();
  const PhantomSpec spec = single_material_phantom();
  const ComplexField t =
      transmission_from_projections(analytic_projections(spec, 0.5, g));
  const RealImage raw = forward_intensity(t, g, 1e4, 1.5);
  const RealImage y = normalize(raw, RealImage(48, 64, 1e4), RealImage(48, 64, 0.0));

  auto padded = pad_edge(t, 1.5);
  const ComplexField z = crop(propagate(padded.image, *cached_kernel(g, 72, 96)),
                              padded.window);
  for (std::size_t i = 0; i < y.size(); ++i)
    CHECK(std::abs(y[i] - std::abs(z[i])) < 1e-9);
}
