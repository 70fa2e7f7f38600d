//
// xpct - Copyright 2026 The xpct Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include "xpct/array.hpp"
#include "xpct/core.hpp"

namespace xpct {

/// Real transmission x on the detector grid; x > 0.
using TransmissionMap = RealImage;

/// Paganin single-distance filter applied to a (padded) intensity frame:
///   M = IDFT( DFT(intensity) / (1 + pi lambda R gamma (mu^2 + nu^2)) ).
/// No clamping; this is the linear part of the retrieval.
RealImage paganin_filter(const RealImage &intensity,
                         const AcquisitionGeometry &geometry, double gamma);

/// LPR on an already padded frame y: x = sqrt(max(M, lb^2)) with M the
/// filtered y^2. Result stays on the padded grid.
TransmissionMap lpr_retrieve_padded(const RealImage &y_padded,
                                    const AcquisitionGeometry &geometry,
                                    const RetrievalConfig &config);

/// Edge-pad y by config.pad_factor, filter, clamp, and crop back.
TransmissionMap lpr_retrieve(const RealImage &y,
                             const AcquisitionGeometry &geometry,
                             const RetrievalConfig &config);

/// phi = -gamma log x.
RealImage phase_from_transmission(const TransmissionMap &x,
                                  const RetrievalConfig &config);

/// A = -alpha log x.
RealImage absorption_from_transmission(const TransmissionMap &x,
                                       const RetrievalConfig &config);

} // namespace xpct
