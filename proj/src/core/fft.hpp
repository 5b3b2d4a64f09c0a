#pragma once

#include <complex>
#include <vector>

namespace becmirror {

// Thin FFTW front end. Plans are created under a global mutex with
// FFTW_ESTIMATE, so results do not depend on runtime measurements or on
// how many threads are convolving different grids concurrently.

/// In-place 2-D transform of row-major data (rows x cols).
/// sign = -1 forward, +1 backward (unnormalized, FFTW convention).
void fft_2d(std::complex<double>* data, int rows, int cols, int sign);

/// In-place length-n transform of every row (rows x cols row-major).
void fft_rows(std::complex<double>* data, int rows, int cols, int sign);

/// In-place transform of every column.
void fft_cols(std::complex<double>* data, int rows, int cols, int sign);

/// Smallest power of two >= n.
int next_pow2(int n);

}  // namespace becmirror
