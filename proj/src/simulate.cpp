//
// xpct - Copyright 2026 The xpct Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "xpct/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "xpct/fresnel.hpp"

namespace xpct {
namespace {
  constexpr double kUm = units::kMicrometer;
  constexpr double kSicDelta = 1.67e-6;
  constexpr double kSicBeta = 4.77e-9;
  constexpr double kVoxel = 0.3225 * kUm;
  constexpr double kPitch = 0.645 * kUm;

  // Center of detector pixel m (counted from the middle) on the 0.645 um grid.
  constexpr double grid_center(int m) { return (m + 0.5) * kPitch; }

  double centered(std::size_t i, std::size_t n, double step) {
    return (static_cast<double>(i) - 0.5 * static_cast<double>(n - 1)) * step;
  }

  struct SplitMix64 {
    using result_type = std::uint64_t;
    std::uint64_t state;

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }

    result_type operator()() {
      std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      return z ^ (z >> 31);
    }
  };

  std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    SplitMix64 g{a ^ (b * 0xd1b54a32d192ed03ULL)};
    g();
    return g();
  }

  std::size_t integer_ratio(double pitch, double voxel) {
    const double k = pitch / voxel;
    const double rounded = std::round(k);
    if (rounded < 1.0 || std::abs(k - rounded) > 1e-6 * k)
      throw InvalidArgument(
          "project_volume: pixel pitch must be an integer multiple of the "
          "voxel width");
    return static_cast<std::size_t>(rounded);
  }
} // namespace

void PhantomSpec::validate() const {
  if (n_slices == 0 || n_rows == 0 || n_cols == 0)
    throw InvalidArgument("phantom: empty volume");
  if (!(voxel_width > 0.0))
    throw InvalidArgument("phantom: voxel width must be > 0");
  const double hu = 0.5 * static_cast<double>(n_slices) * voxel_width;
  const double hr = 0.5 * static_cast<double>(n_rows) * voxel_width;
  const double hc = 0.5 * static_cast<double>(n_cols) * voxel_width;
  for (std::size_t i = 0; i < spheres.size(); ++i) {
    const Sphere &s = spheres[i];
    const std::string tag = "phantom: sphere " + std::to_string(i);
    if (!(s.radius > 0.0))
      throw InvalidArgument(tag + " radius must be > 0");
    if (!(s.delta >= 0.0) || !(s.beta >= 0.0))
      throw InvalidArgument(tag + " delta and beta must be >= 0");
    if (std::abs(s.u) + s.radius > hu || std::abs(s.v) + s.radius > hc
        || std::abs(s.w) + s.radius > hr)
      throw InvalidArgument(tag + " extends outside the volume");
  }
}

PhantomSpec single_material_phantom() {
  PhantomSpec spec;
  spec.n_slices = 96;
  spec.n_rows = 128;
  spec.n_cols = 128;
  spec.voxel_width = kVoxel;
  const double u = grid_center(0);
  // Two spheres share a row of the central slice, the largest sits above
  // them; all three stay clear of each other's bounding boxes and keep
  // about ten pixels from the detector edge at every angle.
  spec.spheres = {
      {u, grid_center(-12), grid_center(-9), 4.0 * kUm, kSicDelta, kSicBeta},
      {u, grid_center(0), grid_center(14), 6.0 * kUm, kSicDelta, kSicBeta},
      {u, grid_center(12), grid_center(-9), 5.0 * kUm, kSicDelta, kSicBeta},
  };
  return spec;
}

PhantomSpec multi_material_phantom() {
  PhantomSpec spec = single_material_phantom();
  spec.spheres[0].beta *= 10.0;
  spec.spheres[2].delta *= 2.0;
  return spec;
}

AcquisitionGeometry default_geometry() {
  AcquisitionGeometry g;
  g.wavelength = wavelength_from_energy(20.0);
  g.distance = 100.0 * units::kMillimeter;
  g.pixel_pitch = kPitch;
  g.n_u = 48;
  g.n_v = 64;
  g.angles = equally_spaced_angles(64);
  return g;
}

PhantomVolumes build_phantom(const PhantomSpec &spec) {
  spec.validate();
  const double vw = spec.voxel_width;
  PhantomVolumes out{
      Volume(spec.n_slices, spec.n_rows, spec.n_cols, vw, Quantity::Delta),
      Volume(spec.n_slices, spec.n_rows, spec.n_cols, vw, Quantity::Beta)};
  constexpr double kOffsets[2] = {-0.25, 0.25};
  const std::size_t n_spheres = spec.spheres.size();
  std::vector<int> hits(n_spheres);

  for (std::size_t s = 0; s < spec.n_slices; ++s) {
    const double u0 = centered(s, spec.n_slices, vw);
    for (std::size_t r = 0; r < spec.n_rows; ++r) {
      const double w0 = centered(r, spec.n_rows, vw);
      for (std::size_t c = 0; c < spec.n_cols; ++c) {
        const double v0 = centered(c, spec.n_cols, vw);
        std::fill(hits.begin(), hits.end(), 0);
        for (double du : kOffsets)
          for (double dw : kOffsets)
            for (double dv : kOffsets) {
              const double u = u0 + du * vw;
              const double w = w0 + dw * vw;
              const double v = v0 + dv * vw;
              std::size_t last = n_spheres;
              for (std::size_t i = 0; i < n_spheres; ++i) {
                const Sphere &sp = spec.spheres[i];
                const double x = u - sp.u;
                const double y = v - sp.v;
                const double z = w - sp.w;
                if (x * x + y * y + z * z <= sp.radius * sp.radius)
                  last = i;
              }
              if (last < n_spheres)
                ++hits[last];
            }
        double d = 0.0;
        double b = 0.0;
        for (std::size_t i = 0; i < n_spheres; ++i) {
          if (hits[i] == 0)
            continue;
          const double fraction = static_cast<double>(hits[i]) / 8.0;
          d += spec.spheres[i].delta * fraction;
          b += spec.spheres[i].beta * fraction;
        }
        out.delta(s, r, c) = d;
        out.beta(s, r, c) = b;
      }
    }
  }
  return out;
}

RealImage project_volume(const Volume &volume, double angle,
                         const AcquisitionGeometry &geometry) {
  if (volume.empty())
    throw InvalidArgument("project_volume: empty volume");
  const double vw = volume.voxel_width();
  const std::size_t k = integer_ratio(geometry.pixel_pitch, vw);
  const std::size_t fine_rows = geometry.n_u * k;
  const std::size_t fine_cols = geometry.n_v * k;
  if (fine_rows != volume.slices())
    throw InvalidArgument("project_volume: detector rows x " + std::to_string(k)
                          + " must equal the number of slices");

  const std::size_t nr = volume.rows();
  const std::size_t nc = volume.cols();
  const double half_diag =
      0.5 * std::hypot(static_cast<double>(nr), static_cast<double>(nc));
  const auto n_samples = static_cast<std::size_t>(2.0 * std::ceil(half_diag)) + 1;
  const double cos_t = std::cos(angle);
  const double sin_t = std::sin(angle);

  // Interpolation taps are identical for every slice; build them once.
  struct Tap {
    std::size_t offset;
    double weight;
  };
  std::vector<std::vector<Tap>> taps(fine_cols);
  for (std::size_t col = 0; col < fine_cols; ++col) {
    const double t = centered(col, fine_cols, 1.0);
    auto &list = taps[col];
    for (std::size_t i = 0; i < n_samples; ++i) {
      const double s = centered(i, n_samples, 1.0);
      const double fx = t * cos_t - s * sin_t + 0.5 * static_cast<double>(nc - 1);
      const double fy = t * sin_t + s * cos_t + 0.5 * static_cast<double>(nr - 1);
      const double x0 = std::floor(fx);
      const double y0 = std::floor(fy);
      const double ax = fx - x0;
      const double ay = fy - y0;
      for (int dy = 0; dy < 2; ++dy)
        for (int dx = 0; dx < 2; ++dx) {
          const double xi = x0 + dx;
          const double yi = y0 + dy;
          if (xi < 0 || yi < 0 || xi > static_cast<double>(nc - 1)
              || yi > static_cast<double>(nr - 1))
            continue;
          const double wgt = (dx ? ax : 1.0 - ax) * (dy ? ay : 1.0 - ay);
          if (wgt == 0.0)
            continue;
          list.push_back({static_cast<std::size_t>(yi) * nc
                              + static_cast<std::size_t>(xi),
                          wgt});
        }
    }
  }

  Grid2D<double> fine(fine_rows, fine_cols);
  const auto values = volume.values();
  for (std::size_t s = 0; s < volume.slices(); ++s) {
    const double *plane = values.data() + s * nr * nc;
    for (std::size_t col = 0; col < fine_cols; ++col) {
      double acc = 0.0;
      for (const Tap &tap : taps[col])
        acc += tap.weight * plane[tap.offset];
      fine(s, col) = acc * vw;
    }
  }

  RealImage out(geometry.n_u, geometry.n_v);
  const double inv = 1.0 / static_cast<double>(k * k);
  for (std::size_t r = 0; r < geometry.n_u; ++r)
    for (std::size_t c = 0; c < geometry.n_v; ++c) {
      double acc = 0.0;
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
          acc += fine(r * k + i, c * k + j);
      out(r, c) = acc * inv;
    }
  return out;
}

ProjectionPair projections_from_phantom(const PhantomVolumes &volumes,
                                        double angle,
                                        const AcquisitionGeometry &geometry) {
  const double wavenumber = 2.0 * kPi / geometry.wavelength;
  ProjectionPair pair{project_volume(volumes.beta, angle, geometry),
                      project_volume(volumes.delta, angle, geometry)};
  for (auto &a : pair.absorption.values())
    a *= wavenumber;
  for (auto &p : pair.phase.values())
    p *= wavenumber;
  pair.absorption.set_role(ImageRole::Absorption);
  pair.phase.set_role(ImageRole::Phase);
  return pair;
}

ProjectionPair projections_from_phantom(const PhantomSpec &spec, double angle,
                                        const AcquisitionGeometry &geometry) {
  return projections_from_phantom(build_phantom(spec), angle, geometry);
}

ProjectionPair analytic_projections(const PhantomSpec &spec, double angle,
                                    const AcquisitionGeometry &geometry,
                                    std::size_t supersample) {
  spec.validate();
  if (supersample == 0)
    throw InvalidArgument("analytic_projections: supersample must be >= 1");
  const double wavenumber = 2.0 * kPi / geometry.wavelength;
  const double pitch = geometry.pixel_pitch;
  const double cos_t = std::cos(angle);
  const double sin_t = std::sin(angle);
  ProjectionPair pair{
      RealImage(geometry.n_u, geometry.n_v, 0.0, ImageRole::Absorption),
      RealImage(geometry.n_u, geometry.n_v, 0.0, ImageRole::Phase)};
  const double m = static_cast<double>(supersample);
  const double inv = 1.0 / (m * m);

  for (std::size_t r = 0; r < geometry.n_u; ++r) {
    const double u0 = centered(r, geometry.n_u, pitch);
    for (std::size_t c = 0; c < geometry.n_v; ++c) {
      const double t0 = centered(c, geometry.n_v, pitch);
      double a = 0.0;
      double p = 0.0;
      for (std::size_t i = 0; i < supersample; ++i)
        for (std::size_t j = 0; j < supersample; ++j) {
          const double u = u0 + ((static_cast<double>(i) + 0.5) / m - 0.5) * pitch;
          const double t = t0 + ((static_cast<double>(j) + 0.5) / m - 0.5) * pitch;
          for (const Sphere &sp : spec.spheres) {
            const double tc = sp.v * cos_t + sp.w * sin_t;
            const double rho2 = (u - sp.u) * (u - sp.u) + (t - tc) * (t - tc);
            const double h2 = sp.radius * sp.radius - rho2;
            if (h2 <= 0.0)
              continue;
            const double chord = 2.0 * std::sqrt(h2);
            a += sp.beta * chord;
            p += sp.delta * chord;
          }
        }
      pair.absorption(r, c) = wavenumber * a * inv;
      pair.phase(r, c) = wavenumber * p * inv;
    }
  }
  return pair;
}

ComplexField transmission_from_projections(const ProjectionPair &pair) {
  if (!pair.absorption.same_shape(pair.phase))
    throw InvalidArgument("transmission: projection shapes differ");
  ComplexField t(pair.absorption.rows(), pair.absorption.cols());
  for (std::size_t i = 0; i < t.size(); ++i)
    t[i] = std::exp(Complex(-pair.absorption[i], -pair.phase[i]));
  return t;
}

RealImage forward_intensity(const ComplexField &transmission,
                            const AcquisitionGeometry &geometry, double flux,
                            double pad_factor) {
  if (!(flux > 0.0))
    throw InvalidArgument("forward_intensity: flux must be > 0");
  auto padded = pad_edge(transmission, pad_factor);
  const auto kernel =
      cached_kernel(geometry, padded.image.rows(), padded.image.cols());
  propagate_inplace(padded.image, *kernel);
  const ComplexField det = crop(padded.image, padded.window);
  RealImage out(det.rows(), det.cols(), 0.0, ImageRole::Raw);
  for (std::size_t i = 0; i < det.size(); ++i)
    out[i] = flux * std::norm(det[i]);
  return out;
}

RealImage apply_poisson_noise(const RealImage &intensity, std::uint64_t seed,
                              std::uint64_t view) {
  RealImage out(intensity.rows(), intensity.cols(), 0.0, intensity.role());
  const std::uint64_t view_key = mix(mix(seed, 0x5eed), view);
  for (std::size_t i = 0; i < intensity.size(); ++i) {
    const double mean = intensity[i];
    if (!(mean >= 0.0) || !std::isfinite(mean))
      throw InvalidArgument("apply_poisson_noise: negative or non-finite mean at "
                            "pixel " + std::to_string(i));
    if (mean == 0.0)
      continue;
    SplitMix64 rng{mix(view_key, i)};
    std::poisson_distribution<long long> draw(mean);
    out[i] = static_cast<double>(draw(rng));
  }
  return out;
}

RealImage normalize(const RealImage &raw, const RealImage &bright,
                    const RealImage &dark) {
  if (!raw.same_shape(bright) || !raw.same_shape(dark))
    throw InvalidArgument("normalize: raw, bright, dark shapes differ");
  RealImage y(raw.rows(), raw.cols(), 0.0, ImageRole::NormalizedSqrt);
  for (std::size_t r = 0; r < raw.rows(); ++r)
    for (std::size_t c = 0; c < raw.cols(); ++c) {
      const double span = bright(r, c) - dark(r, c);
      if (!(span > 0.0))
        throw InvalidData("normalize: bright <= dark at pixel (" + std::to_string(r)
                          + ", " + std::to_string(c) + ")");
      y(r, c) = std::sqrt(std::max(0.0, (raw(r, c) - dark(r, c)) / span));
    }
  return y;
}

Volume downsample2(const Volume &volume) {
  if (volume.slices() % 2 || volume.rows() % 2 || volume.cols() % 2)
    throw InvalidArgument("downsample2: dims must be even");
  Volume out(volume.slices() / 2, volume.rows() / 2, volume.cols() / 2,
             2.0 * volume.voxel_width(), volume.quantity());
  for (std::size_t s = 0; s < out.slices(); ++s)
    for (std::size_t r = 0; r < out.rows(); ++r)
      for (std::size_t c = 0; c < out.cols(); ++c) {
        double acc = 0.0;
        for (std::size_t i = 0; i < 2; ++i)
          for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t k = 0; k < 2; ++k)
              acc += volume(2 * s + i, 2 * r + j, 2 * c + k);
        out(s, r, c) = acc / 8.0;
      }
  return out;
}

} // namespace xpct
