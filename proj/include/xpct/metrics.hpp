//
// xpct - Copyright 2026 The xpct Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "xpct/array.hpp"

namespace xpct {

double rmse(std::span<const double> a, std::span<const double> b);
/// RMSE over entries where mask is true.
double rmse_within(std::span<const double> a, std::span<const double> b,
                   const std::vector<bool> &mask);

struct Roi {
  std::size_t row0 = 0;
  std::size_t col0 = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;

  bool fits(std::size_t image_rows, std::size_t image_cols) const {
    return rows > 0 && cols > 0 && row0 + rows <= image_rows
           && col0 + cols <= image_cols;
  }
};

inline constexpr std::size_t kOtsuBins = 256;

/// Otsu threshold of the ROI: 256 equal-width bins over [min, max], returns
/// the bin edge maximizing between-class variance (lowest edge on ties).
double otsu_threshold(const RealImage &image, const Roi &roi);

/// Number of ROI pixels strictly above threshold times pitch^2.
double segmented_area(const RealImage &image, const Roi &roi, double threshold,
                      double pixel_pitch);

struct MtfCurve {
  std::vector<double> frequency;  // cycles / m
  std::vector<double> modulation; // MTF(0) = 1
};

/// Disk-edge MTF: radial ESF (bins of pitch/4 over radius +- 4 pitch),
/// central-difference LSF, |DFT| normalized at DC, reported up to Nyquist.
/// center_row/center_col are pixel coordinates, radius in meters.
MtfCurve mtf_from_disk(const RealImage &image, double center_row,
                       double center_col, double radius, double pixel_pitch);

enum class ProfileAxis { Row, Column };

struct LineProfile {
  std::vector<double> coordinate; // m, relative to the image center
  std::vector<double> value;
};

/// Row `index` (or column) restricted to [begin, end).
LineProfile line_profile(const RealImage &image, ProfileAxis axis,
                         std::size_t index, std::size_t begin, std::size_t end,
                         double pixel_pitch);

/// "coordinate,value" header, one row per sample.
std::string to_csv(const LineProfile &profile);
std::string to_csv(const MtfCurve &curve);

/// Circle region on one reconstructed slice.
struct CircleRoi {
  std::size_t slice = 0;
  Roi box;
  double center_row = 0.0; // pixels
  double center_col = 0.0; // pixels
  double radius = 0.0;     // m
};

struct MethodInput {
  std::string name;
  Volume delta;
  std::vector<RealImage> phases; // may be empty
};

struct TruthInput {
  Volume delta;
  std::vector<RealImage> phases; // may be empty
};

struct MethodMetrics {
  std::string name;
  std::optional<double> rmse_phase;
  std::optional<double> rmse_delta;
  std::vector<double> areas;                     // m^2, one per circle
  std::vector<std::optional<double>> circle_rmse; // delta RMSE inside each box
  std::vector<std::optional<MtfCurve>> mtf;      // per circle, when measurable
  std::vector<LineProfile> profiles;             // row through each circle center
};

struct EvaluationReport {
  std::vector<CircleRoi> rois;
  std::optional<std::vector<double>> truth_areas;
  std::vector<MethodMetrics> methods;
};

EvaluationReport build_report(const std::optional<TruthInput> &truth,
                              const std::vector<MethodInput> &methods,
                              const std::vector<CircleRoi> &rois,
                              double pixel_pitch);

nlohmann::json to_json(const EvaluationReport &report);
nlohmann::json to_json(const CircleRoi &roi);
CircleRoi circle_roi_from_json(const nlohmann::json &j);

} // namespace xpct
