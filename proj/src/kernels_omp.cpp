#include <algorithm>
#include <numeric>

#include "modvar/kernels.hpp"
#include "modvar/rng.hpp"

namespace modvar::kernels::parallel {

namespace {
using index_t = std::ptrdiff_t;
}

DiagonalMoments diagonal_moments(std::span<const cplx> amp, std::span<const double> values) {
  const auto n = static_cast<index_t>(amp.size());
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
#pragma omp parallel for reduction(+ : m0, m1, m2) schedule(static)
  for (index_t i = 0; i < n; ++i) {
    const double w = std::norm(amp[i]);
    m0 += w;
    m1 += w * values[i];
    m2 += w * values[i] * values[i];
  }
  return {m0, m1, m2};
}

cplx inner(std::span<const cplx> f, std::span<const cplx> g) {
  const auto n = static_cast<index_t>(f.size());
  double re = 0.0, im = 0.0;
#pragma omp parallel for reduction(+ : re, im) schedule(static)
  for (index_t i = 0; i < n; ++i) {
    const cplx v = std::conj(f[i]) * g[i];
    re += v.real();
    im += v.imag();
  }
  return {re, im};
}

cplx weighted_inner(std::span<const cplx> f, std::span<const cplx> g,
                    std::span<const double> weights) {
  const auto n = static_cast<index_t>(f.size());
  double re = 0.0, im = 0.0;
#pragma omp parallel for reduction(+ : re, im) schedule(static)
  for (index_t i = 0; i < n; ++i) {
    const cplx v = std::conj(f[i]) * weights[i] * g[i];
    re += v.real();
    im += v.imag();
  }
  return {re, im};
}

void scale_pointwise(std::span<cplx> amp, std::span<const double> values) {
  const auto n = static_cast<index_t>(amp.size());
#pragma omp parallel for schedule(static)
  for (index_t i = 0; i < n; ++i) amp[i] *= values[i];
}

void expand_product(std::span<const TermView> terms, std::span<cplx> out) {
  if (terms.empty()) {
    std::fill(out.begin(), out.end(), cplx{});
    return;
  }
  const auto n1 = static_cast<index_t>(terms.front().first.size());
  const std::size_t n2 = terms.front().second.size();
#pragma omp parallel for schedule(static)
  for (index_t i = 0; i < n1; ++i) {
    cplx* row = out.data() + i * n2;
    std::fill(row, row + n2, cplx{});
    for (const auto& t : terms) {
      const cplx a = t.coeff * t.first[i];
      for (std::size_t j = 0; j < n2; ++j) row[j] += a * t.second[j];
    }
  }
}

void sample_cdf(std::span<const double> cdf, std::uint64_t key, std::uint64_t first_index,
                std::span<std::size_t> cells, std::span<double> offsets) {
  const double total = cdf.back();
  const auto n = static_cast<index_t>(cells.size());
#pragma omp parallel for schedule(static)
  for (index_t k = 0; k < n; ++k) {
    const double target = rng::uniform(key, first_index + k) * total;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
    if (it == cdf.end()) --it;
    const auto cell = static_cast<std::size_t>(it - cdf.begin());
    const double lower = cell == 0 ? 0.0 : cdf[cell - 1];
    const double mass = cdf[cell] - lower;
    cells[k] = cell;
    offsets[k] = mass > 0.0 ? std::clamp((target - lower) / mass, 0.0, 1.0) : 0.5;
  }
}

void bootstrap_variances(std::span<const double> values, std::uint64_t key,
                         std::span<double> variances) {
  const std::size_t n = values.size();
  const double shift = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  const auto resamples = static_cast<index_t>(variances.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (index_t r = 0; r < resamples; ++r) {
    const std::uint64_t rkey = rng::stream_key(key, static_cast<std::uint64_t>(r));
    double s1 = 0.0;
    double s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double y = values[rng::below(rkey, i, n)] - shift;
      s1 += y;
      s2 += y * y;
    }
    const double mean = s1 / static_cast<double>(n);
    variances[r] = s2 / static_cast<double>(n) - mean * mean;
  }
}

}  // namespace modvar::kernels::parallel
