//
// xpct - Copyright 2026 The xpct Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <span>

#include "xpct/array.hpp"

// Thin FFTW wrapper. Plans are created once per shape under a lock and
// executed concurrently on caller-owned buffers.
namespace xpct::fft {

/// Unnormalized in-place forward 2D DFT of a row-major rows x cols buffer.
void forward_2d(std::span<Complex> data, std::size_t rows, std::size_t cols);
/// In-place inverse 2D DFT scaled by 1/(rows*cols).
void inverse_2d(std::span<Complex> data, std::size_t rows, std::size_t cols);

void forward_1d(std::span<Complex> data);
void inverse_1d(std::span<Complex> data);

inline void forward(ComplexField &f) { forward_2d(f.values(), f.rows(), f.cols()); }
inline void inverse(ComplexField &f) { inverse_2d(f.values(), f.rows(), f.cols()); }

} // namespace xpct::fft
