//
// xpct - Copyright 2026 The xpct Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "xpct/lpr.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "xpct/fft.hpp"

namespace xpct {

RealImage paganin_filter(const RealImage &intensity,
                         const AcquisitionGeometry &geometry, double gamma) {
  if (!(gamma >= 0.0))
    throw InvalidArgument("paganin_filter: gamma must be >= 0");
  const std::size_t rows = intensity.rows();
  const std::size_t cols = intensity.cols();
  const double coeff = kPi * geometry.wavelength * geometry.distance * gamma;
  RealImage out(rows, cols);
  if (coeff == 0.0) {
    out.storage() = intensity.storage();
    return out;
  }
  const FrequencyGrid grid(geometry.pixel_pitch, rows, cols);
  ComplexField spec(rows, cols);
  for (std::size_t i = 0; i < spec.size(); ++i)
    spec[i] = intensity[i];
  fft::forward(spec);
  for (std::size_t p = 0; p < rows; ++p)
    for (std::size_t q = 0; q < cols; ++q)
      spec(p, q) /= 1.0 + coeff * grid.radial_sq(p, q);
  fft::inverse(spec);
  for (std::size_t i = 0; i < spec.size(); ++i)
    out[i] = spec[i].real();
  return out;
}

TransmissionMap lpr_retrieve_padded(const RealImage &y_padded,
                                    const AcquisitionGeometry &geometry,
                                    const RetrievalConfig &config) {
  config.validate();
  RealImage intensity(y_padded.rows(), y_padded.cols());
  for (std::size_t i = 0; i < intensity.size(); ++i) {
    if (!(y_padded[i] >= 0.0))
      throw InvalidData("lpr: negative or non-finite measurement at pixel "
                        + std::to_string(i));
    intensity[i] = y_padded[i] * y_padded[i];
  }
  RealImage m = paganin_filter(intensity, geometry, config.gamma);
  const double floor_sq = config.lower_bound * config.lower_bound;
  TransmissionMap x(m.rows(), m.cols(), 0.0, ImageRole::Transmission);
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] = std::sqrt(std::max(m[i], floor_sq));
  return x;
}

TransmissionMap lpr_retrieve(const RealImage &y,
                             const AcquisitionGeometry &geometry,
                             const RetrievalConfig &config) {
  const auto padded = pad_edge(y, config.pad_factor);
  return crop(lpr_retrieve_padded(padded.image, geometry, config),
              padded.window);
}

RealImage phase_from_transmission(const TransmissionMap &x,
                                  const RetrievalConfig &config) {
  RealImage phi(x.rows(), x.cols(), 0.0, ImageRole::Phase);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0))
      throw InvalidData("phase_from_transmission: x <= 0 at pixel "
                        + std::to_string(i));
    phi[i] = -config.gamma * std::log(x[i]);
  }
  return phi;
}

RealImage absorption_from_transmission(const TransmissionMap &x,
                                       const RetrievalConfig &config) {
  RealImage a(x.rows(), x.cols(), 0.0, ImageRole::Absorption);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0))
      throw InvalidData("absorption_from_transmission: x <= 0 at pixel "
                        + std::to_string(i));
    a[i] = -config.alpha * std::log(x[i]);
  }
  return a;
}

} // namespace xpct
