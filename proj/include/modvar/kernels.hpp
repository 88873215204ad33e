#pragma once

// Data-parallel inner loops. `serial` is the reference implementation kept
// for testing and benchmarking; `parallel` is the OpenMP version the
// library calls. Both produce the same results up to summation order (the
// sampling and bootstrap kernels are bit-identical because every draw is a
// pure function of its counter).

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace modvar::kernels {

using cplx = std::complex<double>;

/// Sums of |a_i|^2, |a_i|^2 v_i and |a_i|^2 v_i^2.
struct DiagonalMoments {
  double m0 = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
};

struct TermView {
  cplx coeff;
  std::span<const cplx> first;
  std::span<const cplx> second;
};

#define MODVAR_KERNEL_DECLARATIONS                                                              \
  DiagonalMoments diagonal_moments(std::span<const cplx> amp, std::span<const double> values);  \
  cplx inner(std::span<const cplx> f, std::span<const cplx> g);                                 \
  cplx weighted_inner(std::span<const cplx> f, std::span<const cplx> g,                         \
                      std::span<const double> weights);                                         \
  void scale_pointwise(std::span<cplx> amp, std::span<const double> values);                    \
  void expand_product(std::span<const TermView> terms, std::span<cplx> out);                    \
  void sample_cdf(std::span<const double> cdf, std::uint64_t key, std::uint64_t first_index,    \
                  std::span<std::size_t> cells, std::span<double> offsets);                     \
  void bootstrap_variances(std::span<const double> values, std::uint64_t key,                   \
                           std::span<double> variances);

namespace serial {
MODVAR_KERNEL_DECLARATIONS
}  // namespace serial

namespace parallel {
MODVAR_KERNEL_DECLARATIONS
}  // namespace parallel

#undef MODVAR_KERNEL_DECLARATIONS

// Library code goes through these.
using parallel::bootstrap_variances;
using parallel::diagonal_moments;
using parallel::expand_product;
using parallel::inner;
using parallel::sample_cdf;
using parallel::scale_pointwise;
using parallel::weighted_inner;

}  // namespace modvar::kernels
