#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace modvar::fft {

using cplx = std::complex<double>;

// Unitary in-place transforms (forward uses exp(-i k x)). Plans are cached
// per size; execution is safe from concurrent threads.
void forward(std::span<cplx> data);
void inverse(std::span<cplx> data);

// Row-major n1 x n2 arrays.
void forward_2d(std::span<cplx> data, std::size_t n1, std::size_t n2);
void inverse_2d(std::span<cplx> data, std::size_t n1, std::size_t n2);

/// Signed frequency index of FFT output slot `index` for length `n`.
inline std::ptrdiff_t signed_index(std::size_t index, std::size_t n) {
  return index < (n + 1) / 2 ? static_cast<std::ptrdiff_t>(index)
                             : static_cast<std::ptrdiff_t>(index) - static_cast<std::ptrdiff_t>(n);
}

}  // namespace modvar::fft
