#include "modvar/states.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "modvar/error.hpp"
#include "modvar/modular.hpp"
#include "modvar/units.hpp"

namespace modvar {

namespace {

constexpr double kTailTolerance = 1e-8;
constexpr cplx kI{0.0, 1.0};

double sinc_value(double y) { return std::abs(y) < 1e-8 ? 1.0 - y * y / 6.0 : std::sin(y) / y; }

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Squared L2 norm of the piecewise-linear interpolant of the samples.
double interpolant_norm2(const std::vector<cplx>& v, double dx) {
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i)
    sum += std::norm(v[i]) + (v[i] * std::conj(v[i + 1])).real() + std::norm(v[i + 1]);
  return sum * dx / 3.0;
}

// Composite Simpson rule on [lo, hi] with at least `min_intervals` intervals.
template <class F>
cplx simpson(F&& f, double lo, double hi, double max_step) {
  auto intervals = static_cast<std::size_t>(std::ceil((hi - lo) / max_step));
  intervals = std::max<std::size_t>(intervals + (intervals % 2), 2);
  const double h = (hi - lo) / static_cast<double>(intervals);
  cplx sum = f(lo) + f(hi);
  for (std::size_t i = 1; i < intervals; ++i)
    sum += (i % 2 == 1 ? 4.0 : 2.0) * f(lo + static_cast<double>(i) * h);
  return sum * h / 3.0;
}

struct Interval {
  double lo;
  double hi;
};

Interval position_support(const WavePacket& p) {
  const Envelope& e = p.envelope;
  if (const auto* t = e.table()) {
    return {p.x0 + t->x_min, p.x0 + t->x_min + t->dx * static_cast<double>(t->samples.size() - 1)};
  }
  return {p.x0 - 14.0 * e.width(), p.x0 + 14.0 * e.width()};
}

double fine_step(const WavePacket& a, const WavePacket& b) {
  double step = std::min(a.envelope.width(), b.envelope.width()) / 40.0;
  for (const auto* t : {a.envelope.table(), b.envelope.table()})
    if (t) step = std::min(step, t->dx / 8.0);
  const double kmax = std::max(std::abs(a.p0) + a.envelope.momentum_extent(),
                               std::abs(b.p0) + b.envelope.momentum_extent());
  return std::min(step, kPi / (8.0 * kmax));
}

void require_rank(int n) {
  require(n >= 1, ErrorCode::invalid_argument, "superposition rank N must be >= 1");
}

double max_abs_momentum(const SuperposedState& s) {
  double m = 0.0;
  for (const auto& t : s.terms)
    m = std::max(m, std::abs(t.packet.p0) + t.packet.envelope.momentum_extent());
  return m;
}

void check_grid(const GridSpec& grid, double tail_bound, double max_momentum, double fringe_scale) {
  require(tail_bound < kTailTolerance, ErrorCode::grid_too_small,
          "grid does not cover the state (tail mass bound " + std::to_string(tail_bound) + ")");
  require(max_momentum <= grid.nyquist(), ErrorCode::grid_too_coarse,
          "grid spacing does not resolve the state's momenta");
  require(fringe_scale <= 0.0 || grid.dx() <= fringe_scale / 8.0 * (1.0 + 1e-12),
          ErrorCode::grid_too_coarse, "grid spacing coarser than fringe scale / 8");
}

std::vector<cplx> sample(const WavePacket& p, const GridSpec& grid) {
  std::vector<cplx> v(grid.points());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = p.amplitude(grid.node(i));
  return v;
}

}  // namespace

// ---------------------------------------------------------------- Envelope

Envelope Envelope::gaussian(double sigma_x) {
  require(std::isfinite(sigma_x) && sigma_x > 0.0, ErrorCode::invalid_argument,
          "gaussian envelope needs sigma_x > 0");
  return Envelope(Kind::gaussian, sigma_x, nullptr);
}

Envelope Envelope::sinc(double d) {
  require(std::isfinite(d) && d > 0.0, ErrorCode::invalid_argument, "sinc envelope needs d > 0");
  return Envelope(Kind::sinc, d, nullptr);
}

Envelope Envelope::tabulated(double x_min, double dx, std::vector<cplx> samples) {
  require(samples.size() >= 2 && dx > 0.0 && std::isfinite(x_min), ErrorCode::invalid_argument,
          "tabulated envelope needs >= 2 samples and dx > 0");
  const double n2 = interpolant_norm2(samples, dx);
  require(n2 > 0.0 && std::isfinite(n2), ErrorCode::invalid_argument,
          "tabulated envelope has zero norm");
  const double scale = 1.0 / std::sqrt(n2);
  for (auto& v : samples) v *= scale;
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double x = x_min + dx * static_cast<double>(i);
    m1 += std::norm(samples[i]) * x * dx;
    m2 += std::norm(samples[i]) * x * x * dx;
  }
  const double width = std::sqrt(std::max(m2 - m1 * m1, dx * dx));
  return Envelope(Kind::tabulated, width,
                  std::make_shared<const Table>(Table{x_min, dx, std::move(samples)}));
}

cplx Envelope::amplitude(double x) const {
  switch (kind_) {
    case Kind::gaussian: {
      const double s = width_;
      return std::pow(2.0 * kPi * s * s, -0.25) * std::exp(-x * x / (4.0 * s * s));
    }
    case Kind::sinc:
      return sinc_value(kPi * x / width_) / std::sqrt(width_);
    case Kind::tabulated: {
      const Table& t = *table_;
      const double u = (x - t.x_min) / t.dx;
      if (u < 0.0) return 0.0;
      const auto i = static_cast<std::size_t>(u);
      if (i + 1 >= t.samples.size()) return i + 1 == t.samples.size() && u == i ? t.samples[i] : 0.0;
      const double f = u - static_cast<double>(i);
      return (1.0 - f) * t.samples[i] + f * t.samples[i + 1];
    }
  }
  return 0.0;
}

cplx Envelope::momentum_amplitude(double p) const {
  switch (kind_) {
    case Kind::gaussian: {
      const double s = width_;
      return std::pow(2.0 * s * s / kPi, 0.25) * std::exp(-s * s * p * p);
    }
    case Kind::sinc: {
      const double edge = kPi / width_;
      const double a = std::abs(p);
      if (a > edge) return 0.0;
      const double value = std::sqrt(width_ / (2.0 * kPi));
      return a == edge ? 0.5 * value : value;
    }
    case Kind::tabulated: {
      // Linear interpolation is a convolution with a triangle of half-width dx.
      const Table& t = *table_;
      cplx sum = 0.0;
      for (std::size_t i = 0; i < t.samples.size(); ++i) {
        const double x = t.x_min + t.dx * static_cast<double>(i);
        sum += t.samples[i] * std::exp(-kI * p * x);
      }
      const double kernel = sinc_value(0.5 * p * t.dx);
      return sum * t.dx * kernel * kernel / std::sqrt(2.0 * kPi);
    }
  }
  return 0.0;
}

double Envelope::momentum_extent() const {
  switch (kind_) {
    case Kind::gaussian: return 9.0 / (2.0 * width_);
    case Kind::sinc: return kPi / width_;
    case Kind::tabulated: return kPi / table_->dx;
  }
  return 0.0;
}

double Envelope::tail_mass_outside(double lo, double hi) const {
  switch (kind_) {
    case Kind::gaussian: {
      const double s = std::sqrt(2.0) * width_;
      return 0.5 * std::erfc(hi / s) + 0.5 * std::erfc(-lo / s);
    }
    case Kind::sinc:
      if (!(lo < 0.0 && hi > 0.0)) return 1.0;
      return width_ / (kPi * kPi) * (1.0 / hi - 1.0 / lo);
    case Kind::tabulated: {
      const Table& t = *table_;
      double mass = 0.0;
      for (std::size_t i = 0; i < t.samples.size(); ++i) {
        const double x = t.x_min + t.dx * static_cast<double>(i);
        if (x < lo || x > hi) mass += std::norm(t.samples[i]) * t.dx;
      }
      return mass;
    }
  }
  return 1.0;
}

bool Envelope::same_shape(const Envelope& other) const {
  return kind_ == other.kind_ && width_ == other.width_ && table_ == other.table_;
}

// -------------------------------------------------------------- WavePacket

cplx WavePacket::amplitude(double x) const {
  return envelope.amplitude(x - x0) * std::exp(kI * p0 * (x - phase_ref));
}

cplx WavePacket::momentum_amplitude(double p) const {
  return std::exp(-kI * p0 * phase_ref) * std::exp(-kI * (p - p0) * x0) *
         envelope.momentum_amplitude(p - p0);
}

cplx overlap(const WavePacket& a, const WavePacket& b) {
  const Envelope& ea = a.envelope;
  const Envelope& eb = b.envelope;
  const cplx phase = std::exp(kI * (a.p0 * a.phase_ref - b.p0 * b.phase_ref));

  if (ea.kind() == Envelope::Kind::gaussian && ea.same_shape(eb)) {
    const double s = ea.width();
    const double q = b.p0 - a.p0;
    const double sep = a.x0 - b.x0;
    const double c = 0.5 * (a.x0 + b.x0);
    return std::exp(-sep * sep / (8.0 * s * s) - 0.5 * s * s * q * q) * std::exp(kI * q * c) *
           phase;
  }

  if (ea.kind() == Envelope::Kind::sinc && eb.kind() == Envelope::Kind::sinc) {
    const double lo = std::max(a.p0 - kPi / ea.width(), b.p0 - kPi / eb.width());
    const double hi = std::min(a.p0 + kPi / ea.width(), b.p0 + kPi / eb.width());
    if (hi <= lo) return 0.0;
    const cplx k = std::sqrt(ea.width() * eb.width()) / (2.0 * kPi) * phase *
                   std::exp(kI * (-a.p0 * a.x0 + b.p0 * b.x0));
    const double delta = a.x0 - b.x0;
    if (std::abs(delta) * (hi - lo) < 1e-12) return k * (hi - lo);
    return k * (std::exp(kI * hi * delta) - std::exp(kI * lo * delta)) / (kI * delta);
  }

  if (ea.kind() == Envelope::Kind::sinc || eb.kind() == Envelope::Kind::sinc) {
    const WavePacket& s = ea.kind() == Envelope::Kind::sinc ? a : b;
    const double edge = kPi / s.envelope.width();
    const double spread = std::max(std::abs(a.x0), std::abs(b.x0)) +
                          std::max(a.envelope.width(), b.envelope.width());
    const double step = std::min(edge / 2000.0, kPi / (8.0 * spread));
    return simpson([&](double p) { return std::conj(a.momentum_amplitude(p)) * b.momentum_amplitude(p); },
                   s.p0 - edge, s.p0 + edge, step);
  }

  const Interval ia = position_support(a);
  const Interval ib = position_support(b);
  const double lo = std::max(ia.lo, ib.lo);
  const double hi = std::min(ia.hi, ib.hi);
  if (hi <= lo) return 0.0;
  return simpson([&](double x) { return std::conj(a.amplitude(x)) * b.amplitude(x); }, lo, hi,
                 fine_step(a, b));
}

// ---------------------------------------------------------------- builders

double norm_squared(const SuperposedState& state) {
  cplx total = 0.0;
  for (const auto& s : state.terms)
    for (const auto& t : state.terms)
      total += std::conj(s.amplitude) * t.amplitude * overlap(s.packet, t.packet);
  return total.real();
}

double norm_squared(const TwoParticleState& state) {
  cplx total = 0.0;
  for (const auto& s : state.terms)
    for (const auto& t : state.terms)
      total += std::conj(s.amplitude) * t.amplitude * overlap(s.first, t.first) *
               overlap(s.second, t.second);
  return total.real();
}

SuperposedState normalized(SuperposedState state) {
  const double n2 = norm_squared(state);
  require(n2 > 0.0 && std::isfinite(n2), ErrorCode::invalid_argument, "state has zero norm");
  const double scale = 1.0 / std::sqrt(n2);
  for (auto& t : state.terms) t.amplitude *= scale;
  return state;
}

TwoParticleState normalized(TwoParticleState state) {
  const double n2 = norm_squared(state);
  require(n2 > 0.0 && std::isfinite(n2), ErrorCode::invalid_argument, "state has zero norm");
  const double scale = 1.0 / std::sqrt(n2);
  for (auto& t : state.terms) t.amplitude *= scale;
  return state;
}

SuperposedState build_multislit(int n, double slit_separation, const Envelope& envelope) {
  require_rank(n);
  require(std::isfinite(slit_separation) && slit_separation > 0.0, ErrorCode::invalid_argument,
          "slit separation must be positive");
  SuperposedState s;
  s.fringe_scale = slit_separation;
  const double amp = 1.0 / std::sqrt(static_cast<double>(n));
  for (int k = 0; k < n; ++k)
    s.terms.push_back({amp, WavePacket{envelope, -k * slit_separation, 0.0, 0.0}});
  if (envelope.width() / slit_separation > 0.2)
    s.warnings.push_back("packet width exceeds 0.2 L; components are not spatially distinct");
  return normalized(std::move(s));
}

SuperposedState build_smp(int n, double x0, int base_index, double lambda,
                          const Envelope& envelope, std::optional<double> phase_ref) {
  require_rank(n);
  require(std::isfinite(lambda) && lambda > 0.0, ErrorCode::invalid_argument,
          "lambda must be positive");
  const double ref = phase_ref.value_or(modular_decompose(x0, lambda).modular_part);
  SuperposedState s;
  s.fringe_scale = lambda;
  const double amp = 1.0 / std::sqrt(static_cast<double>(n));
  for (int k = 0; k < n; ++k)
    s.terms.push_back({amp, WavePacket{envelope, x0, (base_index + k) * kPlanck / lambda, ref}});
  if (envelope.width() / lambda < 5.0)
    s.warnings.push_back("packet width below 5 lambda; momentum components may overlap");
  return normalized(std::move(s));
}

TwoParticleState build_mpe(int n, double x0, int base_index, double lambda,
                           const Envelope& envelope, std::optional<double> phase_ref) {
  require_rank(n);
  require(std::isfinite(lambda) && lambda > 0.0, ErrorCode::invalid_argument,
          "lambda must be positive");
  // Both particles share the fringe phase reference so the pattern depends
  // on x1 - x2 only.
  const double ref = phase_ref.value_or(modular_decompose(x0, lambda).modular_part);
  TwoParticleState s;
  s.fringe_scale = lambda;
  const double amp = 1.0 / std::sqrt(static_cast<double>(n));
  for (int k = 0; k < n; ++k) {
    const double p = (base_index + k) * kPlanck / lambda;
    s.terms.push_back({amp, WavePacket{envelope, x0, p, ref}, WavePacket{envelope, -x0, -p, ref}});
  }
  if (envelope.width() / lambda < 5.0)
    s.warnings.push_back("packet width below 5 lambda; momentum components may overlap");
  return normalized(std::move(s));
}

MixtureState build_classical_correlated(int n, double x0, int base_index, double lambda,
                                        const Envelope& envelope,
                                        std::optional<double> phase_ref) {
  const TwoParticleState pure = build_mpe(n, x0, base_index, lambda, envelope, phase_ref);
  MixtureState m;
  for (const auto& t : pure.terms) {
    TwoParticleState component;
    component.fringe_scale = pure.fringe_scale;
    component.terms.push_back({1.0, t.first, t.second});
    m.components.push_back({1.0 / n, normalized(std::move(component))});
  }
  return m;
}

MixtureState mix(std::vector<MixtureState::Component> components) {
  require(!components.empty(), ErrorCode::invalid_argument, "mix: empty component list");
  double total = 0.0;
  for (const auto& c : components) {
    require(std::isfinite(c.weight) && c.weight >= 0.0, ErrorCode::invalid_argument,
            "mix: weights must be non-negative");
    total += c.weight;
  }
  require(total > 0.0, ErrorCode::invalid_argument, "mix: all weights are zero");
  MixtureState m;
  for (auto& c : components)
    if (c.weight > 0.0) m.components.push_back({c.weight / total, std::move(c.state)});
  return m;
}

MixtureState admix(const TwoParticleState& pure, const MixtureState& admixture, double epsilon) {
  require(epsilon >= 0.0 && epsilon <= 1.0, ErrorCode::invalid_argument,
          "admixture fraction must lie in [0, 1]");
  std::vector<MixtureState::Component> parts;
  parts.push_back({1.0 - epsilon, pure});
  for (const auto& c : admixture.components) parts.push_back({epsilon * c.weight, c.state});
  return mix(std::move(parts));
}

MixtureState as_mixture(const TwoParticleState& pure) { return mix({{1.0, pure}}); }

// --------------------------------------------------------------- densities

cplx position_amplitude(const SuperposedState& state, double x) {
  cplx sum = 0.0;
  for (const auto& t : state.terms) sum += t.amplitude * t.packet.amplitude(x);
  return sum;
}

cplx momentum_amplitude(const SuperposedState& state, double p) {
  cplx sum = 0.0;
  for (const auto& t : state.terms) sum += t.amplitude * t.packet.momentum_amplitude(p);
  return sum;
}

double position_density(const SuperposedState& state, double x) {
  return std::norm(position_amplitude(state, x));
}

double momentum_density(const SuperposedState& state, double p) {
  return std::norm(momentum_amplitude(state, p));
}

double joint_position_density(const TwoParticleState& state, double x1, double x2) {
  cplx sum = 0.0;
  for (const auto& t : state.terms) sum += t.amplitude * t.first.amplitude(x1) * t.second.amplitude(x2);
  return std::norm(sum);
}

double joint_momentum_density(const TwoParticleState& state, double p1, double p2) {
  cplx sum = 0.0;
  for (const auto& t : state.terms)
    sum += t.amplitude * t.first.momentum_amplitude(p1) * t.second.momentum_amplitude(p2);
  return std::norm(sum);
}

double joint_position_density(const MixtureState& state, double x1, double x2) {
  double sum = 0.0;
  for (const auto& c : state.components) sum += c.weight * joint_position_density(c.state, x1, x2);
  return sum;
}

double joint_momentum_density(const MixtureState& state, double p1, double p2) {
  double sum = 0.0;
  for (const auto& c : state.components) sum += c.weight * joint_momentum_density(c.state, p1, p2);
  return sum;
}

double marginal_position_density(const TwoParticleState& state, int particle, double x) {
  require(particle == 0 || particle == 1, ErrorCode::invalid_argument, "particle index is 0 or 1");
  cplx sum = 0.0;
  for (const auto& s : state.terms) {
    for (const auto& t : state.terms) {
      const WavePacket& ps = particle == 0 ? s.first : s.second;
      const WavePacket& pt = particle == 0 ? t.first : t.second;
      const WavePacket& os = particle == 0 ? s.second : s.first;
      const WavePacket& ot = particle == 0 ? t.second : t.first;
      sum += std::conj(s.amplitude * ps.amplitude(x)) * t.amplitude * pt.amplitude(x) *
             overlap(os, ot);
    }
  }
  return std::max(sum.real(), 0.0);
}

// ------------------------------------------------------------------- grids

Support support_of(const SuperposedState& state) {
  require(!state.terms.empty(), ErrorCode::invalid_argument, "state has no terms");
  Support s{state.terms.front().packet.x0, state.terms.front().packet.x0, 0.0};
  for (const auto& t : state.terms) {
    s.lo = std::min(s.lo, t.packet.x0);
    s.hi = std::max(s.hi, t.packet.x0);
    s.width = std::max(s.width, t.packet.envelope.width());
  }
  return s;
}

Support support_of(const TwoParticleState& state, int particle) {
  require(!state.terms.empty(), ErrorCode::invalid_argument, "state has no terms");
  SuperposedState single;
  for (const auto& t : state.terms) single.terms.push_back({1.0, particle == 0 ? t.first : t.second});
  return support_of(single);
}

GridSpec default_grid(const Support& support, double ell, std::size_t min_points) {
  const double span = support.hi - support.lo + 16.0 * support.width;
  const auto periods = next_pow2(static_cast<std::size_t>(std::ceil(span / ell)) + 2);
  const auto per_period = std::max<std::size_t>(8, next_pow2((min_points + periods - 1) / periods));
  return GridSpec::commensurate(0.5 * (support.lo + support.hi), ell, periods, per_period);
}

GridSpec make_grid(const Support& support, double ell, const GridOptions& options) {
  const GridSpec base = default_grid(support, ell, options.min_points);
  const auto base_periods = static_cast<std::size_t>(std::llround(base.box() / ell));
  const std::size_t m = options.periods.value_or(base_periods);
  const std::size_t ppp = options.points_per_period.value_or(base.points() / base_periods);
  return GridSpec::commensurate(0.5 * (support.lo + support.hi), ell, m, ppp);
}

Support merge(const Support& a, const Support& b) {
  return {std::min(a.lo, b.lo), std::max(a.hi, b.hi), std::max(a.width, b.width)};
}

GridState discretize(const SuperposedState& state, const GridSpec& grid) {
  double amp2 = 0.0;
  double tail = 0.0;
  for (const auto& t : state.terms) {
    amp2 += std::norm(t.amplitude);
    tail += t.packet.envelope.tail_mass_outside(grid.min() - t.packet.x0, grid.max() - t.packet.x0);
  }
  check_grid(grid, amp2 * tail, max_abs_momentum(state), state.fringe_scale);
  std::vector<cplx> v(grid.points());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = position_amplitude(state, grid.node(i));
  return GridState(grid, std::move(v)).normalized();
}

ProductGridState discretize(const TwoParticleState& state, const GridSpec& grid1,
                            const GridSpec& grid2) {
  require(!state.terms.empty(), ErrorCode::invalid_argument, "state has no terms");
  double amp2 = 0.0, tail1 = 0.0, tail2 = 0.0, pmax1 = 0.0, pmax2 = 0.0;
  for (const auto& t : state.terms) {
    amp2 += std::norm(t.amplitude);
    tail1 += t.first.envelope.tail_mass_outside(grid1.min() - t.first.x0, grid1.max() - t.first.x0);
    tail2 += t.second.envelope.tail_mass_outside(grid2.min() - t.second.x0, grid2.max() - t.second.x0);
    pmax1 = std::max(pmax1, std::abs(t.first.p0) + t.first.envelope.momentum_extent());
    pmax2 = std::max(pmax2, std::abs(t.second.p0) + t.second.envelope.momentum_extent());
  }
  check_grid(grid1, amp2 * tail1, pmax1, state.fringe_scale);
  check_grid(grid2, amp2 * tail2, pmax2, state.fringe_scale);
  std::vector<ProductGridState::Term> terms;
  terms.reserve(state.terms.size());
  for (const auto& t : state.terms) terms.push_back({t.amplitude, sample(t.first, grid1), sample(t.second, grid2)});
  return ProductGridState(grid1, grid2, std::move(terms)).normalized();
}

MixtureGrid discretize(const MixtureState& state, const GridSpec& grid1, const GridSpec& grid2) {
  MixtureGrid m;
  for (const auto& c : state.components) m.components.push_back({c.weight, discretize(c.state, grid1, grid2)});
  return m;
}

}  // namespace modvar
