//
// xpct - Copyright 2026 The xpct Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "xpct/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "xpct/lpr.hpp"
#include "xpct/nlpr.hpp"
#include "xpct/parallel.hpp"
#include "xpct/tomo.hpp"

namespace xpct {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {
  constexpr const char *kTruthDelta = "truth_delta";
  constexpr const char *kTruthBeta = "truth_beta";
  constexpr const char *kDelta = "delta";

  std::string trace_csv(const std::vector<TraceEntry> &trace) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(17);
    os << "iteration,objective\n";
    for (const auto &e : trace)
      os << e.iteration << ',' << e.objective << '\n';
    return os.str();
  }

  json config_json(const RetrievalConfig &c) {
    return {{"alpha", c.alpha},
            {"gamma", c.gamma},
            {"xtol_rel", c.xtol_rel},
            {"max_iterations", c.max_iterations},
            {"lbfgs_memory", c.lbfgs_memory},
            {"lower_bound", c.lower_bound},
            {"pad_factor", c.pad_factor},
            {"upper_bound_one", c.upper_bound_one}};
  }

  std::vector<RealImage> read_views(const Dataset &ds, const std::string &prefix,
                                    ImageRole role) {
    std::vector<RealImage> out;
    for (std::size_t v = 0; v < ds.geometry().angles.size(); ++v)
      out.push_back(ds.read_image(view_array_name(prefix, v), role));
    return out;
  }

  bool has_views(const Dataset &ds, const std::string &prefix) {
    const std::size_t n = ds.geometry().angles.size();
    for (std::size_t v = 0; v < n; ++v)
      if (!ds.has_array(view_array_name(prefix, v)))
        return false;
    return n > 0;
  }
} // namespace

std::vector<CircleRoi> default_rois(const PhantomSpec &spec,
                                    const AcquisitionGeometry &geometry) {
  const double pitch = geometry.pixel_pitch;
  const double n = static_cast<double>(geometry.n_v);
  std::vector<CircleRoi> rois;
  for (const Sphere &s : spec.spheres) {
    CircleRoi roi;
    roi.center_col = s.v / pitch + 0.5 * (n - 1.0);
    roi.center_row = s.w / pitch + 0.5 * (n - 1.0);
    roi.radius = s.radius;
    roi.slice = static_cast<std::size_t>(std::clamp(
        std::lround(s.u / pitch + 0.5 * (static_cast<double>(geometry.n_u) - 1.0)),
        0L, static_cast<long>(geometry.n_u) - 1));
    const double half = std::ceil(s.radius / pitch) + 3.0;
    const auto lo = [&](double c) {
      return static_cast<std::size_t>(std::max(0.0, std::floor(c - half)));
    };
    const auto hi = [&](double c) {
      return static_cast<std::size_t>(std::min(n - 1.0, std::ceil(c + half)));
    };
    roi.box.row0 = lo(roi.center_row);
    roi.box.col0 = lo(roi.center_col);
    roi.box.rows = hi(roi.center_row) - roi.box.row0 + 1;
    roi.box.cols = hi(roi.center_col) - roi.box.col0 + 1;
    rois.push_back(roi);
  }
  return rois;
}

json to_json(const PhantomSpec &spec) {
  json spheres = json::array();
  for (const Sphere &s : spec.spheres)
    spheres.push_back({{"u", s.u},
                       {"v", s.v},
                       {"w", s.w},
                       {"radius", s.radius},
                       {"delta", s.delta},
                       {"beta", s.beta}});
  return {{"dims", {spec.n_slices, spec.n_rows, spec.n_cols}},
          {"voxel_width", spec.voxel_width},
          {"spheres", spheres}};
}

PhantomSpec phantom_from_json(const json &j) {
  PhantomSpec spec;
  const auto dims = j.at("dims").get<std::vector<std::size_t>>();
  if (dims.size() != 3)
    throw InvalidArgument("phantom spec: dims must have 3 entries");
  spec.n_slices = dims[0];
  spec.n_rows = dims[1];
  spec.n_cols = dims[2];
  spec.voxel_width = j.at("voxel_width").get<double>();
  for (const auto &s : j.at("spheres"))
    spec.spheres.push_back({s.at("u").get<double>(), s.at("v").get<double>(),
                            s.at("w").get<double>(), s.at("radius").get<double>(),
                            s.at("delta").get<double>(),
                            s.at("beta").get<double>()});
  spec.validate();
  return spec;
}

MeasurementSet simulate_dataset(const PhantomSpec &spec,
                                const AcquisitionGeometry &geometry,
                                const SimulationOptions &options,
                                const std::optional<fs::path> &out) {
  spec.validate();
  geometry.validate();
  if (!(options.flux > 0.0))
    throw InvalidArgument("simulate: flux must be > 0");
  const PhantomVolumes volumes = build_phantom(spec);
  const std::size_t views = geometry.angles.size();

  MeasurementSet ms;
  ms.geometry = geometry;
  ms.rng_seed = options.seed;
  ms.raw.resize(views);
  ms.bright.resize(views);
  ms.dark.resize(views);
  ms.normalized.resize(views);
  ms.truth.resize(views);

  parallel_for(views, options.workers, [&](std::size_t v) {
    ProjectionPair pair =
        projections_from_phantom(volumes, geometry.angles[v], geometry);
    const ComplexField t = transmission_from_projections(pair);
    RealImage mean = forward_intensity(t, geometry, options.flux,
                                       options.pad_factor);
    RealImage raw = options.noise ? apply_poisson_noise(mean, options.seed, v)
                                  : std::move(mean);
    raw.set_role(ImageRole::Raw);
    RealImage bright(geometry.n_u, geometry.n_v, options.flux, ImageRole::Bright);
    RealImage dark(geometry.n_u, geometry.n_v, 0.0, ImageRole::Dark);
    ms.normalized[v] = normalize(raw, bright, dark);
    ms.raw[v] = std::move(raw);
    ms.bright[v] = std::move(bright);
    ms.dark[v] = std::move(dark);
    ms.truth[v] = std::move(pair);
  });

  if (!out)
    return ms;

  DatasetManifest manifest;
  manifest.geometry = geometry;
  manifest.stages = {stage::kRaw, stage::kNormalized};
  manifest.provenance = {{"seed", options.seed},
                         {"flux", options.flux},
                         {"noise", options.noise},
                         {"pad_factor", options.pad_factor},
                         {"phantom", to_json(spec)}};
  json rois = json::array();
  for (const auto &roi : default_rois(spec, geometry))
    rois.push_back(to_json(roi));
  manifest.extra["rois"] = rois;

  DatasetWriter writer(*out, std::move(manifest));
  parallel_for(views, options.workers, [&](std::size_t v) {
    writer.write_image(view_array_name("raw", v), ms.raw[v]);
    writer.write_image(view_array_name("bright", v), ms.bright[v]);
    writer.write_image(view_array_name("dark", v), ms.dark[v]);
    writer.write_image(view_array_name("y", v), ms.normalized[v]);
    writer.write_image(view_array_name("truth_phase", v), ms.truth[v].phase);
    writer.write_image(view_array_name("truth_absorption", v),
                       ms.truth[v].absorption);
  });
  // Truth volumes are compared on the detector grid.
  const double ratio = geometry.pixel_pitch / spec.voxel_width;
  if (std::abs(ratio - 2.0) < 1e-6) {
    writer.write_volume(kTruthDelta, downsample2(volumes.delta));
    writer.write_volume(kTruthBeta, downsample2(volumes.beta));
  } else if (std::abs(ratio - 1.0) < 1e-6) {
    writer.write_volume(kTruthDelta, volumes.delta);
    writer.write_volume(kTruthBeta, volumes.beta);
  }
  writer.finish();
  return ms;
}

RetrievalMethod parse_method(const std::string &name) {
  if (name == "lpr")
    return RetrievalMethod::Lpr;
  if (name == "lpr-sharp")
    return RetrievalMethod::LprSharp;
  if (name == "nlpr")
    return RetrievalMethod::Nlpr;
  throw InvalidArgument("unknown retrieval method '" + name
                        + "' (expected lpr, lpr-sharp or nlpr)");
}

const char *to_string(RetrievalMethod method) {
  switch (method) {
  case RetrievalMethod::Lpr:
    return "lpr";
  case RetrievalMethod::LprSharp:
    return "lpr-sharp";
  case RetrievalMethod::Nlpr:
    return "nlpr";
  }
  return "unknown";
}

namespace {
  AcquisitionGeometry retrieval_geometry(const AcquisitionGeometry &geometry,
                                         const RetrievalRequest &request) {
    if (request.method == RetrievalMethod::LprSharp)
      return geometry.with_distance(
          request.distance_override.value_or(kSharpDistance));
    if (request.distance_override)
      return geometry.with_distance(*request.distance_override);
    return geometry;
  }
} // namespace

ViewRetrieval retrieve_view(const RealImage &y,
                            const AcquisitionGeometry &geometry,
                            const RetrievalRequest &request) {
  const AcquisitionGeometry g = retrieval_geometry(geometry, request);
  ViewRetrieval out;
  if (request.method == RetrievalMethod::Nlpr) {
    NlprResult res = nlpr_retrieve(y, g, request.config);
    out.transmission = std::move(res.x);
    out.trace = std::move(res.trace);
    out.initial_objective = res.initial_objective;
    out.final_objective = res.final_objective;
    out.status = request.config.max_iterations == 0 ? "lpr_only"
                                                    : to_string(res.status);
  } else {
    out.transmission = lpr_retrieve(y, g, request.config);
    out.status = "closed_form";
  }
  out.phase = phase_from_transmission(out.transmission, request.config);
  return out;
}

RetrievalSummary run_retrieval(const fs::path &in, const fs::path &out,
                               const RetrievalRequest &request) {
  request.config.validate();
  const Dataset ds = Dataset::load(in);
  if (!ds.manifest().has_stage(stage::kNormalized))
    throw DatasetError(in.string() + ": missing stage '" + stage::kNormalized
                       + "' (normalized frames y_NNNN are required)");
  if (!has_views(ds, "y"))
    throw DatasetError(in.string() + ": stage '" + stage::kNormalized
                       + "' is listed but y_NNNN arrays are missing");

  const AcquisitionGeometry &geometry = ds.geometry();
  const std::size_t views = geometry.angles.size();

  DatasetManifest manifest;
  manifest.geometry = geometry;
  manifest.stages = {stage::kTransmission, stage::kPhase};
  manifest.provenance = ds.manifest().provenance;
  manifest.provenance["method"] = to_string(request.method);
  manifest.extra = ds.manifest().extra;
  json retrieval = config_json(request.config);
  retrieval["method"] = to_string(request.method);
  retrieval["distance_used"] =
      retrieval_geometry(geometry, request).distance;
  manifest.extra["retrieval"] = retrieval;

  DatasetWriter writer(out, std::move(manifest));
  RetrievalSummary summary;
  summary.initial_objective.assign(views, 0.0);
  summary.final_objective.assign(views, 0.0);
  std::vector<std::string> errors(views);
  std::vector<json> per_view(views);

  parallel_for(views, request.workers, [&](std::size_t v) {
    try {
      const RealImage y =
          ds.read_image(view_array_name("y", v), ImageRole::NormalizedSqrt);
      ViewRetrieval r = retrieve_view(y, geometry, request);
      writer.write_image(view_array_name("x", v), r.transmission);
      writer.write_image(view_array_name("phase", v), r.phase);
      if (request.write_traces && !r.trace.empty())
        writer.write_text(view_array_name("trace", v) + ".csv",
                          trace_csv(r.trace));
      summary.initial_objective[v] = r.initial_objective;
      summary.final_objective[v] = r.final_objective;
      per_view[v] = {{"view", v},
                     {"status", r.status},
                     {"iterations", r.trace.empty() ? 0 : r.trace.back().iteration},
                     {"initial_objective", r.initial_objective},
                     {"final_objective", r.final_objective}};
    } catch (const OptimizationFailure &e) {
      errors[v] = e.what();
      writer.write_text(view_array_name("trace", v) + ".csv",
                        trace_csv(e.trace()));
    } catch (const std::exception &e) {
      errors[v] = e.what();
    }
  });

  std::vector<std::size_t> failed;
  std::string message;
  for (std::size_t v = 0; v < views; ++v)
    if (!errors[v].empty()) {
      failed.push_back(v);
      message += "\n  view " + std::to_string(v) + ": " + errors[v];
    }
  writer.manifest().extra["views"] = per_view;
  if (!failed.empty()) {
    writer.manifest().stages.clear();
    writer.finish();
    throw RetrievalFailure("retrieval failed for " + std::to_string(failed.size())
                               + " view(s):" + message,
                           failed);
  }
  writer.finish();
  return summary;
}

void run_reconstruct(const fs::path &in, const fs::path &out, bool apodize,
                     std::size_t workers) {
  const Dataset ds = Dataset::load(in);
  if (!ds.manifest().has_stage(stage::kPhase) || !has_views(ds, "phase"))
    throw DatasetError(in.string() + ": missing stage '" + stage::kPhase
                       + "' (phase_NNNN arrays are required)");
  const AcquisitionGeometry &geometry = ds.geometry();
  std::vector<RealImage> phases = read_views(ds, "phase", ImageRole::Phase);
  const Sinogram sino =
      Sinogram::from_projections(phases, geometry.angles, geometry.pixel_pitch);
  const Volume delta = reconstruct_delta(sino, geometry.wavelength, apodize,
                                         workers);

  DatasetManifest manifest;
  manifest.geometry = geometry;
  manifest.stages = {stage::kPhase, stage::kVolume};
  manifest.provenance = ds.manifest().provenance;
  manifest.extra = ds.manifest().extra;
  manifest.extra["reconstruction"] = {{"filter", "ram-lak"},
                                      {"apodize", apodize}};
  DatasetWriter writer(out, std::move(manifest));
  for (std::size_t v = 0; v < phases.size(); ++v)
    writer.write_image(view_array_name("phase", v), phases[v]);
  writer.write_volume(kDelta, delta);
  writer.finish();
}

EvaluationReport run_evaluate(const std::optional<fs::path> &truth,
                              const std::vector<fs::path> &recons,
                              const std::optional<fs::path> &rois,
                              const std::optional<fs::path> &report) {
  if (recons.empty())
    throw InvalidArgument("evaluate: at least one --recon dataset is required");

  std::optional<Dataset> truth_ds;
  std::optional<TruthInput> truth_in;
  if (truth) {
    truth_ds = Dataset::load(*truth);
    if (!truth_ds->has_array(kTruthDelta))
      throw DatasetError(truth->string() + ": no '" + kTruthDelta + "' volume");
    TruthInput t;
    t.delta = truth_ds->read_volume(kTruthDelta,
                                    truth_ds->geometry().pixel_pitch,
                                    Quantity::Delta);
    if (has_views(*truth_ds, "truth_phase"))
      t.phases = read_views(*truth_ds, "truth_phase", ImageRole::Phase);
    truth_in = std::move(t);
  }

  std::vector<MethodInput> methods;
  std::vector<Dataset> recon_ds;
  for (const auto &path : recons) {
    Dataset ds = Dataset::load(path);
    if (!ds.has_array(kDelta))
      throw DatasetError(path.string() + ": missing stage '" + stage::kVolume
                         + "' (no 'delta' volume)");
    MethodInput m;
    const auto &prov = ds.manifest().provenance;
    m.name = prov.contains("method") ? prov.at("method").get<std::string>()
                                     : path.filename().string();
    m.delta = ds.read_volume(kDelta, ds.geometry().pixel_pitch, Quantity::Delta);
    if (has_views(ds, "phase"))
      m.phases = read_views(ds, "phase", ImageRole::Phase);
    if (truth_in && m.delta.size() != truth_in->delta.size())
      throw DatasetError(path.string()
                         + ": reconstruction shape differs from truth volume");
    methods.push_back(std::move(m));
    recon_ds.push_back(std::move(ds));
  }

  std::vector<CircleRoi> circle_rois;
  json roi_json;
  if (rois) {
    std::ifstream in(*rois);
    if (!in)
      throw DatasetError("cannot open ROI file " + rois->string());
    try {
      roi_json = json::parse(in);
    } catch (const json::exception &e) {
      throw DatasetError(rois->string() + ": malformed ROI file: " + e.what());
    }
    if (roi_json.is_object())
      roi_json = roi_json.at("rois");
  } else if (truth_ds && truth_ds->manifest().extra.contains("rois")) {
    roi_json = truth_ds->manifest().extra.at("rois");
  } else if (recon_ds.front().manifest().extra.contains("rois")) {
    roi_json = recon_ds.front().manifest().extra.at("rois");
  }
  if (roi_json.is_array())
    for (const auto &r : roi_json)
      circle_rois.push_back(circle_roi_from_json(r));

  const double pitch = truth_ds ? truth_ds->geometry().pixel_pitch
                                : recon_ds.front().geometry().pixel_pitch;
  EvaluationReport result = build_report(truth_in, methods, circle_rois, pitch);
  if (report) {
    std::ofstream out(*report, std::ios::trunc);
    out << to_json(result).dump(2) << '\n';
    if (!out)
      throw IoError("failed writing report " + report->string());
  }
  return result;
}

} // namespace xpct
