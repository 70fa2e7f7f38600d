//
// xpct - Copyright 2026 The xpct Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "xpct/array.hpp"
#include "xpct/core.hpp"

namespace xpct {

/// Homogeneous sphere. Center coordinates are meters relative to the volume
/// center: u vertical (slices), v along columns, w along rows. At angle 0 the
/// beam travels along w and the detector column axis coincides with v.
struct Sphere {
  double u = 0.0;
  double v = 0.0;
  double w = 0.0;
  double radius = 0.0;
  double delta = 0.0;
  double beta = 0.0;
};

struct PhantomSpec {
  std::vector<Sphere> spheres;
  std::size_t n_slices = 0;
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  double voxel_width = 0.0;

  void validate() const;
};

/// Three SiC spheres (r = 4, 6, 5 um) on a 96x128x128 grid of 0.3225 um voxels.
PhantomSpec single_material_phantom();
/// Same layout with beta x10 on sphere 1 and delta x2 on sphere 3
/// (delta/beta = 35, 350, 700).
PhantomSpec multi_material_phantom();

/// Detector geometry matching the phantoms: 48x64 at 0.645 um, R = 100 mm,
/// 20 keV, 64 views over 180 degrees.
AcquisitionGeometry default_geometry();

struct PhantomVolumes {
  Volume delta;
  Volume beta;
};

/// Partial-volume voxelization by 2x2x2 supersampling; where spheres overlap
/// the later sphere wins.
PhantomVolumes build_phantom(const PhantomSpec &spec);

/// Parallel-beam line integrals (meters x voxel value) after rotating the
/// volume by `angle` about the vertical axis. The pixel pitch must be an
/// integer multiple k of the voxel width; the ray-driven result at voxel
/// resolution is area-averaged k x k down to the detector grid.
RealImage project_volume(const Volume &volume, double angle,
                         const AcquisitionGeometry &geometry);

struct ProjectionPair {
  RealImage absorption; // A
  RealImage phase;      // phi, rad
};

ProjectionPair projections_from_phantom(const PhantomVolumes &volumes,
                                        double angle,
                                        const AcquisitionGeometry &geometry);
ProjectionPair projections_from_phantom(const PhantomSpec &spec, double angle,
                                        const AcquisitionGeometry &geometry);

/// Exact chord-length projections, summed per sphere. Each detector pixel
/// averages supersample x supersample point samples (1 = pixel center).
ProjectionPair analytic_projections(const PhantomSpec &spec, double angle,
                                    const AcquisitionGeometry &geometry,
                                    std::size_t supersample = 1);

/// T = exp(-A - i phi).
ComplexField transmission_from_projections(const ProjectionPair &pair);

/// flux * |propagate(pad(T))|^2 cropped to the detector grid.
RealImage forward_intensity(const ComplexField &transmission,
                            const AcquisitionGeometry &geometry, double flux,
                            double pad_factor);

/// Per-pixel Poisson draw. The stream for each pixel is derived from
/// (seed, view, pixel index) only, so the output is independent of the
/// order or thread in which views are processed.
RealImage apply_poisson_noise(const RealImage &intensity, std::uint64_t seed,
                              std::uint64_t view = 0);

/// y = sqrt(max(0, (raw - dark) / (bright - dark))).
RealImage normalize(const RealImage &raw, const RealImage &bright,
                    const RealImage &dark);

/// 2x2x2 block average; all dims must be even.
Volume downsample2(const Volume &volume);

} // namespace xpct
