#include "modvar/grid.hpp"

#include <cmath>
#include <string>

#include "modvar/error.hpp"
#include "modvar/fft.hpp"
#include "modvar/kernels.hpp"
#include "modvar/units.hpp"

namespace modvar {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

GridSpec::GridSpec(std::size_t points, double min, double max)
    : points_(points), min_(min), max_(max) {
  require(points >= 16 && is_power_of_two(points), ErrorCode::invalid_argument,
          "grid points must be a power of two >= 16, got " + std::to_string(points));
  require(std::isfinite(min) && std::isfinite(max) && max > min, ErrorCode::invalid_argument,
          "grid domain must satisfy min < max");
}

GridSpec GridSpec::commensurate(double center, double ell, std::size_t periods,
                                std::size_t points_per_period) {
  require(ell > 0.0 && periods >= 1 && points_per_period >= 1, ErrorCode::invalid_argument,
          "commensurate grid needs ell > 0 and at least one period");
  const double start_cell = std::round(center / ell) - std::floor(static_cast<double>(periods) / 2.0);
  const double min = (start_cell - 0.5) * ell;
  return GridSpec(periods * points_per_period, min, min + static_cast<double>(periods) * ell);
}

std::vector<double> GridSpec::nodes() const {
  std::vector<double> x(points_);
  for (std::size_t i = 0; i < points_; ++i) x[i] = node(i);
  return x;
}

double GridSpec::dk() const { return 2.0 * kPi / box(); }

double GridSpec::momentum(std::size_t index) const {
  return dk() * static_cast<double>(fft::signed_index(index, points_));
}

double GridSpec::nyquist() const { return kPi / dx(); }

std::optional<std::int64_t> GridSpec::periods_of(double ell) const {
  const double ratio = box() / ell;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * ratio) return std::nullopt;
  return static_cast<std::int64_t>(rounded);
}

GridState::GridState(GridSpec spec, std::vector<cplx> amplitudes)
    : spec_(spec), amp_(std::move(amplitudes)) {
  require(amp_.size() == spec_.points(), ErrorCode::invalid_argument,
          "grid state size does not match its spec");
}

double GridState::norm() const {
  return std::sqrt(kernels::inner(amp_, amp_).real() * spec_.dx());
}

GridState GridState::normalized() const {
  const double n = norm();
  require(n > 0.0 && std::isfinite(n), ErrorCode::invalid_argument, "cannot normalize zero state");
  std::vector<cplx> a(amp_);
  for (auto& v : a) v /= n;
  return GridState(spec_, std::move(a));
}

std::vector<double> GridState::density() const {
  std::vector<double> d(amp_.size());
  for (std::size_t i = 0; i < amp_.size(); ++i) d[i] = std::norm(amp_[i]);
  return d;
}

std::vector<double> GridState::momentum_probabilities() const {
  std::vector<cplx> a(amp_);
  fft::forward(a);
  std::vector<double> p(a.size());
  const double dx = spec_.dx();
  for (std::size_t i = 0; i < a.size(); ++i) p[i] = std::norm(a[i]) * dx;
  return p;
}

ProductGridState::ProductGridState(GridSpec spec1, GridSpec spec2, std::vector<Term> terms)
    : spec1_(spec1), spec2_(spec2), terms_(std::move(terms)) {
  require(!terms_.empty(), ErrorCode::invalid_argument, "product grid state needs a term");
  for (const auto& t : terms_)
    require(t.first.size() == spec1_.points() && t.second.size() == spec2_.points(),
            ErrorCode::invalid_argument, "product term size does not match its spec");
}

double ProductGridState::norm() const {
  const double w = spec1_.dx() * spec2_.dx();
  cplx total = 0.0;
  for (const auto& a : terms_)
    for (const auto& b : terms_)
      total += std::conj(a.coeff) * b.coeff * kernels::inner(a.first, b.first) *
               kernels::inner(a.second, b.second);
  return std::sqrt(std::max(total.real(), 0.0) * w);
}

ProductGridState ProductGridState::normalized() const {
  const double n = norm();
  require(n > 0.0 && std::isfinite(n), ErrorCode::invalid_argument, "cannot normalize zero state");
  auto terms = terms_;
  for (auto& t : terms) t.coeff /= n;
  return ProductGridState(spec1_, spec2_, std::move(terms));
}

DenseGrid2D::DenseGrid2D(GridSpec spec1, GridSpec spec2, std::vector<cplx> amplitudes)
    : spec1_(spec1), spec2_(spec2), amp_(std::move(amplitudes)) {
  require(spec1_.points() <= kMaxAxisPoints && spec2_.points() <= kMaxAxisPoints,
          ErrorCode::invalid_argument, "dense two-particle grids are capped at 2048 x 2048");
  require(amp_.size() == spec1_.points() * spec2_.points(), ErrorCode::invalid_argument,
          "dense grid size does not match its specs");
}

DenseGrid2D DenseGrid2D::from_product(const ProductGridState& state) {
  const auto& s1 = state.spec1();
  const auto& s2 = state.spec2();
  require(s1.points() <= kMaxAxisPoints && s2.points() <= kMaxAxisPoints,
          ErrorCode::invalid_argument, "dense two-particle grids are capped at 2048 x 2048");
  std::vector<kernels::TermView> views;
  views.reserve(state.terms().size());
  for (const auto& t : state.terms()) views.push_back({t.coeff, t.first, t.second});
  std::vector<cplx> amp(s1.points() * s2.points());
  kernels::expand_product(views, amp);
  return DenseGrid2D(s1, s2, std::move(amp));
}

double DenseGrid2D::norm() const {
  double sum = 0.0;
  for (const auto& v : amp_) sum += std::norm(v);
  return std::sqrt(sum * spec1_.dx() * spec2_.dx());
}

std::vector<double> DenseGrid2D::density() const {
  std::vector<double> d(amp_.size());
  for (std::size_t i = 0; i < amp_.size(); ++i) d[i] = std::norm(amp_[i]);
  return d;
}

std::vector<double> DenseGrid2D::momentum_probabilities() const {
  std::vector<cplx> a(amp_);
  fft::forward_2d(a, spec1_.points(), spec2_.points());
  std::vector<double> p(a.size());
  const double w = spec1_.dx() * spec2_.dx();
  for (std::size_t i = 0; i < a.size(); ++i) p[i] = std::norm(a[i]) * w;
  return p;
}

}  // namespace modvar
