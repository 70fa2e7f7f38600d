//
// xpct - Copyright 2026 The xpct Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "xpct/core.hpp"
#include "xpct/dataset.hpp"
#include "xpct/lbfgs.hpp"
#include "xpct/metrics.hpp"
#include "xpct/simulate.hpp"

namespace xpct {

struct SimulationOptions {
  double flux = 1e4; // counts / pixel
  std::uint64_t seed = 1;
  bool noise = true;
  double pad_factor = 1.5;
  std::size_t workers = 1;
};

/// Per-view detector frames in memory (float64).
struct MeasurementSet {
  AcquisitionGeometry geometry;
  std::uint64_t rng_seed = 0;
  std::vector<RealImage> raw;
  std::vector<RealImage> bright;
  std::vector<RealImage> dark;
  std::vector<RealImage> normalized;
  std::vector<ProjectionPair> truth; // noiseless projections per view
};

/// Sphere bounding boxes on the 2x-downsampled truth grid, on the slice
/// through each sphere center.
std::vector<CircleRoi> default_rois(const PhantomSpec &spec,
                                    const AcquisitionGeometry &geometry);

nlohmann::json to_json(const PhantomSpec &spec);
PhantomSpec phantom_from_json(const nlohmann::json &j);

/// Full measurement pipeline for every view. Writes the dataset when
/// `out` is set (frames, truth projections, truth volumes, ROIs).
MeasurementSet simulate_dataset(const PhantomSpec &spec,
                                const AcquisitionGeometry &geometry,
                                const SimulationOptions &options,
                                const std::optional<std::filesystem::path> &out);

enum class RetrievalMethod { Lpr, LprSharp, Nlpr };

RetrievalMethod parse_method(const std::string &name);
const char *to_string(RetrievalMethod method);

/// R assumed by LPR-Sharp unless overridden.
inline constexpr double kSharpDistance = 5.0 * units::kMillimeter;

struct RetrievalRequest {
  RetrievalMethod method = RetrievalMethod::Nlpr;
  RetrievalConfig config;
  std::size_t workers = 1;
  std::optional<double> distance_override; // m
  bool write_traces = true;
};

struct ViewRetrieval {
  RealImage transmission;
  RealImage phase;
  std::vector<TraceEntry> trace;
  double initial_objective = 0.0;
  double final_objective = 0.0;
  std::string status;
};

/// Retrieve one view with the requested method (no I/O).
ViewRetrieval retrieve_view(const RealImage &y,
                            const AcquisitionGeometry &geometry,
                            const RetrievalRequest &request);

/// Collected per-view failures, thrown after all other views are written.
class RetrievalFailure : public std::runtime_error {
public:
  RetrievalFailure(const std::string &what, std::vector<std::size_t> views)
      : std::runtime_error(what), views_(std::move(views)) {}
  const std::vector<std::size_t> &views() const noexcept { return views_; }

private:
  std::vector<std::size_t> views_;
};

struct RetrievalSummary {
  std::vector<double> initial_objective;
  std::vector<double> final_objective;
};

RetrievalSummary run_retrieval(const std::filesystem::path &in,
                               const std::filesystem::path &out,
                               const RetrievalRequest &request);

void run_reconstruct(const std::filesystem::path &in,
                     const std::filesystem::path &out, bool apodize,
                     std::size_t workers);

/// ROIs come from `rois` when given, else from the truth manifest.
EvaluationReport
run_evaluate(const std::optional<std::filesystem::path> &truth,
             const std::vector<std::filesystem::path> &recons,
             const std::optional<std::filesystem::path> &rois,
             const std::optional<std::filesystem::path> &report);

} // namespace xpct
