//
// xpct - Copyright 2026 The xpct Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "xpct/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "xpct/core.hpp"
#include "xpct/fft.hpp"

namespace xpct {

double rmse(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw InvalidArgument("rmse: shape mismatch (" + std::to_string(a.size())
                          + " vs " + std::to_string(b.size()) + ")");
  if (a.empty())
    throw InvalidArgument("rmse: empty input");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    acc += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(acc / static_cast<double>(a.size()));
}

double rmse_within(std::span<const double> a, std::span<const double> b,
                   const std::vector<bool> &mask) {
  if (a.size() != b.size() || a.size() != mask.size())
    throw InvalidArgument("rmse_within: shape mismatch");
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!mask[i])
      continue;
    acc += (a[i] - b[i]) * (a[i] - b[i]);
    ++count;
  }
  if (count == 0)
    throw InvalidArgument("rmse_within: empty mask");
  return std::sqrt(acc / static_cast<double>(count));
}

double otsu_threshold(const RealImage &image, const Roi &roi) {
  if (!roi.fits(image.rows(), image.cols()))
    throw InvalidArgument("otsu_threshold: ROI outside image");
  double lo = image(roi.row0, roi.col0);
  double hi = lo;
  for (std::size_t r = roi.row0; r < roi.row0 + roi.rows; ++r)
    for (std::size_t c = roi.col0; c < roi.col0 + roi.cols; ++c) {
      lo = std::min(lo, image(r, c));
      hi = std::max(hi, image(r, c));
    }
  if (!(hi > lo))
    throw DegenerateInput("otsu_threshold: ROI is constant");

  const double width = (hi - lo) / static_cast<double>(kOtsuBins);
  std::vector<double> hist(kOtsuBins, 0.0);
  for (std::size_t r = roi.row0; r < roi.row0 + roi.rows; ++r)
    for (std::size_t c = roi.col0; c < roi.col0 + roi.cols; ++c) {
      const auto bin = static_cast<std::size_t>(
          std::min(static_cast<double>(kOtsuBins - 1),
                   std::floor((image(r, c) - lo) / width)));
      hist[bin] += 1.0;
    }

  // Candidate k splits bins [0, k) from [k, 256); k = 0 is the trivial split.
  std::size_t best_k = 0;
  double best = -1.0;
  for (std::size_t k = 0; k < kOtsuBins; ++k) {
    double n0 = 0.0, s0 = 0.0, n1 = 0.0, s1 = 0.0;
    for (std::size_t b = 0; b < kOtsuBins; ++b) {
      const double center = lo + (static_cast<double>(b) + 0.5) * width;
      if (b < k) {
        n0 += hist[b];
        s0 += hist[b] * center;
      } else {
        n1 += hist[b];
        s1 += hist[b] * center;
      }
    }
    double between = 0.0;
    if (n0 > 0.0 && n1 > 0.0) {
      const double d = s0 / n0 - s1 / n1;
      between = n0 * n1 * d * d;
    }
    if (between > best) {
      best = between;
      best_k = k;
    }
  }
  return lo + static_cast<double>(best_k) * width;
}

double segmented_area(const RealImage &image, const Roi &roi, double threshold,
                      double pixel_pitch) {
  if (!roi.fits(image.rows(), image.cols()))
    throw InvalidArgument("segmented_area: ROI outside image");
  std::size_t count = 0;
  for (std::size_t r = roi.row0; r < roi.row0 + roi.rows; ++r)
    for (std::size_t c = roi.col0; c < roi.col0 + roi.cols; ++c)
      if (image(r, c) > threshold)
        ++count;
  return static_cast<double>(count) * pixel_pitch * pixel_pitch;
}

MtfCurve mtf_from_disk(const RealImage &image, double center_row,
                       double center_col, double radius, double pixel_pitch) {
  if (!(pixel_pitch > 0.0) || !(radius > 0.0))
    throw InvalidArgument("mtf_from_disk: radius and pitch must be > 0");
  const double r_px = radius / pixel_pitch;
  constexpr double kMargin = 5.0;
  const double reach = r_px + kMargin;
  if (center_row - reach < 0.0 || center_col - reach < 0.0
      || center_row + reach > static_cast<double>(image.rows() - 1)
      || center_col + reach > static_cast<double>(image.cols() - 1))
    throw InvalidArgument(
        "mtf_from_disk: disk needs a 5-pixel background margin inside the image");

  // Edge spread function over [r - 4, r + 4] pixels in quarter-pixel bins.
  constexpr std::size_t kBins = 32;
  constexpr double kBinWidth = 0.25;
  const double start = r_px - 4.0;
  std::vector<double> sum(kBins, 0.0), count(kBins, 0.0);
  for (std::size_t r = 0; r < image.rows(); ++r)
    for (std::size_t c = 0; c < image.cols(); ++c) {
      const double d = std::hypot(static_cast<double>(r) - center_row,
                                  static_cast<double>(c) - center_col);
      const double pos = (d - start) / kBinWidth;
      if (pos < 0.0 || pos >= static_cast<double>(kBins))
        continue;
      const auto b = static_cast<std::size_t>(pos);
      sum[b] += image(r, c);
      count[b] += 1.0;
    }

  std::vector<double> esf(kBins);
  std::vector<std::size_t> filled;
  for (std::size_t b = 0; b < kBins; ++b)
    if (count[b] > 0.0) {
      esf[b] = sum[b] / count[b];
      filled.push_back(b);
    }
  if (filled.size() < 2)
    throw DegenerateInput("mtf_from_disk: too few samples near the edge");
  for (std::size_t b = 0; b < kBins; ++b) {
    if (count[b] > 0.0)
      continue;
    const auto hi = std::lower_bound(filled.begin(), filled.end(), b);
    if (hi == filled.begin())
      esf[b] = esf[*hi];
    else if (hi == filled.end())
      esf[b] = esf[filled.back()];
    else {
      const std::size_t b0 = *(hi - 1), b1 = *hi;
      const double t = static_cast<double>(b - b0) / static_cast<double>(b1 - b0);
      esf[b] = (1.0 - t) * esf[b0] + t * esf[b1];
    }
  }

  std::vector<double> lsf(kBins);
  lsf[0] = esf[1] - esf[0];
  lsf[kBins - 1] = esf[kBins - 1] - esf[kBins - 2];
  for (std::size_t b = 1; b + 1 < kBins; ++b)
    lsf[b] = 0.5 * (esf[b + 1] - esf[b - 1]);

  std::vector<Complex> spec(lsf.begin(), lsf.end());
  fft::forward_1d(spec);
  const double dc = std::abs(spec[0]);
  if (!(dc > 0.0))
    throw DegenerateInput("mtf_from_disk: no edge contrast");

  const double sample = kBinWidth * pixel_pitch;
  const double df = 1.0 / (static_cast<double>(kBins) * sample);
  const double nyquist = 0.5 / pixel_pitch;
  MtfCurve curve;
  for (std::size_t k = 0; k <= kBins / 2; ++k) {
    const double f = static_cast<double>(k) * df;
    if (f > nyquist * (1.0 + 1e-12))
      break;
    curve.frequency.push_back(f);
    curve.modulation.push_back(std::abs(spec[k]) / dc);
  }
  return curve;
}

LineProfile line_profile(const RealImage &image, ProfileAxis axis,
                         std::size_t index, std::size_t begin, std::size_t end,
                         double pixel_pitch) {
  const std::size_t lines = axis == ProfileAxis::Row ? image.rows() : image.cols();
  const std::size_t length = axis == ProfileAxis::Row ? image.cols() : image.rows();
  if (index >= lines)
    throw InvalidArgument("line_profile: index " + std::to_string(index)
                          + " out of bounds");
  if (begin > end || end > length)
    throw InvalidArgument("line_profile: range out of bounds");
  LineProfile p;
  const double center = 0.5 * static_cast<double>(length - 1);
  for (std::size_t k = begin; k < end; ++k) {
    p.coordinate.push_back((static_cast<double>(k) - center) * pixel_pitch);
    p.value.push_back(axis == ProfileAxis::Row ? image(index, k)
                                               : image(k, index));
  }
  return p;
}

namespace {
  std::string two_column_csv(const char *header, const std::vector<double> &a,
                             const std::vector<double> &b) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(17);
    os << header << '\n';
    for (std::size_t i = 0; i < a.size(); ++i)
      os << a[i] << ',' << b[i] << '\n';
    return os.str();
  }
} // namespace

std::string to_csv(const LineProfile &profile) {
  return two_column_csv("coordinate,value", profile.coordinate, profile.value);
}

std::string to_csv(const MtfCurve &curve) {
  return two_column_csv("frequency,modulation", curve.frequency,
                        curve.modulation);
}

EvaluationReport build_report(const std::optional<TruthInput> &truth,
                              const std::vector<MethodInput> &methods,
                              const std::vector<CircleRoi> &rois,
                              double pixel_pitch) {
  EvaluationReport report;
  report.rois = rois;

  auto box_mask = [](const RealImage &img, const Roi &roi) {
    std::vector<bool> mask(img.size(), false);
    for (std::size_t r = roi.row0; r < roi.row0 + roi.rows; ++r)
      for (std::size_t c = roi.col0; c < roi.col0 + roi.cols; ++c)
        mask[r * img.cols() + c] = true;
    return mask;
  };
  auto areas_of = [&](const Volume &vol) {
    std::vector<double> areas;
    for (const CircleRoi &roi : rois) {
      const RealImage slice = vol.slice(roi.slice);
      areas.push_back(segmented_area(slice, roi.box,
                                     otsu_threshold(slice, roi.box),
                                     pixel_pitch));
    }
    return areas;
  };

  if (truth)
    report.truth_areas = areas_of(truth->delta);

  for (const MethodInput &m : methods) {
    MethodMetrics mm;
    mm.name = m.name;
    if (truth) {
      mm.rmse_delta = rmse(m.delta.values(), truth->delta.values());
      if (!m.phases.empty() && m.phases.size() == truth->phases.size()) {
        double acc = 0.0;
        std::size_t n = 0;
        for (std::size_t v = 0; v < m.phases.size(); ++v) {
          const double e = rmse(m.phases[v].values(), truth->phases[v].values());
          acc += e * e * static_cast<double>(m.phases[v].size());
          n += m.phases[v].size();
        }
        mm.rmse_phase = std::sqrt(acc / static_cast<double>(n));
      }
    }
    mm.areas = areas_of(m.delta);
    for (const CircleRoi &roi : rois) {
      const RealImage slice = m.delta.slice(roi.slice);
      if (truth) {
        const RealImage ts = truth->delta.slice(roi.slice);
        mm.circle_rmse.emplace_back(
            rmse_within(slice.values(), ts.values(), box_mask(slice, roi.box)));
      } else {
        mm.circle_rmse.emplace_back(std::nullopt);
      }
      try {
        mm.mtf.emplace_back(mtf_from_disk(slice, roi.center_row, roi.center_col,
                                          roi.radius, pixel_pitch));
      } catch (const InvalidArgument &) {
        mm.mtf.emplace_back(std::nullopt);
      } catch (const DegenerateInput &) {
        mm.mtf.emplace_back(std::nullopt);
      }
      const auto row = static_cast<std::size_t>(std::lround(roi.center_row));
      mm.profiles.push_back(line_profile(slice, ProfileAxis::Row,
                                         std::min(row, slice.rows() - 1), 0,
                                         slice.cols(), pixel_pitch));
    }
    report.methods.push_back(std::move(mm));
  }
  return report;
}

nlohmann::json to_json(const CircleRoi &roi) {
  return {{"slice", roi.slice},
          {"row0", roi.box.row0},
          {"col0", roi.box.col0},
          {"rows", roi.box.rows},
          {"cols", roi.box.cols},
          {"center_row", roi.center_row},
          {"center_col", roi.center_col},
          {"radius", roi.radius}};
}

CircleRoi circle_roi_from_json(const nlohmann::json &j) {
  CircleRoi roi;
  roi.slice = j.at("slice").get<std::size_t>();
  roi.box.row0 = j.at("row0").get<std::size_t>();
  roi.box.col0 = j.at("col0").get<std::size_t>();
  roi.box.rows = j.at("rows").get<std::size_t>();
  roi.box.cols = j.at("cols").get<std::size_t>();
  roi.center_row = j.at("center_row").get<double>();
  roi.center_col = j.at("center_col").get<double>();
  roi.radius = j.at("radius").get<double>();
  return roi;
}

nlohmann::json to_json(const EvaluationReport &report) {
  using nlohmann::json;
  auto opt = [](const std::optional<double> &v) {
    return v ? json(*v) : json(nullptr);
  };
  json j;
  j["rois"] = json::array();
  for (const auto &roi : report.rois)
    j["rois"].push_back(to_json(roi));
  j["truth_areas_m2"] = report.truth_areas ? json(*report.truth_areas)
                                           : json(nullptr);
  j["methods"] = json::array();
  for (const auto &m : report.methods) {
    json jm;
    jm["name"] = m.name;
    jm["rmse_phase"] = opt(m.rmse_phase);
    jm["rmse_delta"] = opt(m.rmse_delta);
    jm["areas_m2"] = m.areas;
    jm["circle_rmse_delta"] = json::array();
    for (const auto &v : m.circle_rmse)
      jm["circle_rmse_delta"].push_back(opt(v));
    jm["mtf"] = json::array();
    for (const auto &c : m.mtf)
      jm["mtf"].push_back(c ? json{{"frequency", c->frequency},
                                   {"modulation", c->modulation}}
                            : json(nullptr));
    jm["profiles"] = json::array();
    for (const auto &p : m.profiles)
      jm["profiles"].push_back(
          json{{"coordinate", p.coordinate}, {"value", p.value}});
    j["methods"].push_back(std::move(jm));
  }
  return j;
}

} // namespace xpct
