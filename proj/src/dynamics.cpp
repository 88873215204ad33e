#include "modvar/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "modvar/error.hpp"
#include "modvar/fft.hpp"
#include "modvar/state_io.hpp"
#include "modvar/units.hpp"

namespace modvar {

namespace {

void check_params(const PropagationParams& params) {
  require(std::isfinite(params.mass) && std::isfinite(params.time), ErrorCode::non_finite,
          "propagation parameters must be finite");
  require(params.mass > 0.0, ErrorCode::invalid_argument, "mass must be positive");
  require(params.time >= 0.0, ErrorCode::invalid_argument, "time must be non-negative");
}

std::size_t next_pow2(std::size_t v) {
  std::size_t p = 1;
  while (p < v) p <<= 1;
  return p;
}

}  // namespace

double significant_momentum(const GridState& state) {
  const std::vector<double> prob = state.momentum_probabilities();
  double total = 0.0;
  for (double p : prob) total += p;
  double pmax = 0.0;
  for (std::size_t i = 0; i < prob.size(); ++i)
    if (prob[i] > 1e-14 * total) pmax = std::max(pmax, std::abs(state.spec().momentum(i)));
  return pmax;
}

GridState free_propagate(const GridState& state, const PropagationParams& params) {
  check_params(params);
  if (params.time == 0.0) return state;
  const GridSpec& grid = state.spec();
  require(significant_momentum(state) < 0.5 * grid.nyquist(), ErrorCode::aliasing,
          "momentum content exceeds half the Nyquist wavenumber; refine the grid");
  std::vector<cplx> a(state.amplitudes().begin(), state.amplitudes().end());
  fft::forward(a);
  const double factor = params.time / (2.0 * params.mass);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double k = grid.momentum(i);
    a[i] *= std::polar(1.0, -k * k * factor);
  }
  fft::inverse(a);
  return GridState(grid, std::move(a));
}

GridState propagate_in_steps(const GridState& state, const PropagationParams& params, int steps,
                             const std::function<void(int, int)>& progress) {
  require(steps >= 0, ErrorCode::invalid_argument, "steps must be non-negative");
  GridState current = state;
  for (int s = 1; s <= steps; ++s) {
    current = free_propagate(current, params);
    if (progress) progress(s, steps);
  }
  return current;
}

double far_field_map(double x, double mean_x, const PropagationParams& params) {
  check_params(params);
  require(params.time > 0.0, ErrorCode::invalid_argument, "far-field map needs t > 0");
  return params.mass * (x - mean_x) / params.time;
}

FarFieldProfile far_field_profile(const GridState& propagated, const PropagationParams& params) {
  const std::vector<double> rho = propagated.density();
  const GridSpec& grid = propagated.spec();
  double m0 = 0.0, m1 = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    m0 += rho[i];
    m1 += rho[i] * grid.node(i);
  }
  require(m0 > 0.0, ErrorCode::invalid_argument, "state has zero norm");
  const double mean = m1 / m0;
  const double jacobian = params.time / params.mass;
  FarFieldProfile out;
  out.momentum.resize(rho.size());
  out.density.resize(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) {
    out.momentum[i] = far_field_map(grid.node(i), mean, params);
    out.density[i] = rho[i] / (m0 * grid.dx()) * jacobian;
  }
  return out;
}

void validate(const ProtocolSpec& spec) {
  require(spec.n >= 2, ErrorCode::invalid_argument, "protocol needs N >= 2");
  require(static_cast<int>(spec.emission_times.size()) == spec.n, ErrorCode::invalid_argument,
          "protocol needs one emission time per component");
  for (double t : spec.emission_times)
    require(std::isfinite(t), ErrorCode::non_finite, "emission times must be finite");
  require(std::is_sorted(spec.emission_times.begin(), spec.emission_times.end()),
          ErrorCode::invalid_argument, "emission times must be non-decreasing");
  require(spec.lambda > 0.0 && std::isfinite(spec.lambda), ErrorCode::invalid_argument,
          "lambda must be positive");
  require(spec.mass > 0.0 && std::isfinite(spec.mass), ErrorCode::invalid_argument,
          "mass must be positive");
}

ProtocolSpec protocol_from_json(const nlohmann::json& j) {
  require(j.is_object(), ErrorCode::parse, "protocol spec must be a JSON object");
  static const char* allowed[] = {"N", "emission_times", "lambda", "envelope", "mass", "N0"};
  for (const auto& [key, value] : j.items()) {
    require(std::find_if(std::begin(allowed), std::end(allowed),
                         [&](const char* a) { return key == a; }) != std::end(allowed),
            ErrorCode::parse, "unknown key '" + key + "' in protocol spec");
  }
  ProtocolSpec s;
  try {
    s.emission_times = j.at("emission_times").get<std::vector<double>>();
    s.n = j.value("N", static_cast<int>(s.emission_times.size()));
    s.lambda = j.at("lambda").get<double>();
    s.mass = j.value("mass", 1.0);
    s.base_index = j.value("N0", 0);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse, std::string("protocol spec: ") + e.what());
  }
  require(j.contains("envelope"), ErrorCode::parse, "protocol spec is missing 'envelope'");
  s.envelope = envelope_from_json(j.at("envelope"));
  validate(s);
  return s;
}

nlohmann::json to_json(const ProtocolSpec& s) {
  return {{"N", s.n},
          {"emission_times", s.emission_times},
          {"lambda", s.lambda},
          {"envelope", to_json(s.envelope)},
          {"mass", s.mass},
          {"N0", s.base_index}};
}

double protocol_visibility(const ProtocolSpec& spec, double meeting_time) {
  validate(spec);
  require(meeting_time >= spec.emission_times.back(), ErrorCode::invalid_argument,
          "meeting time precedes the last emission");
  const int n = spec.n;
  const double w = spec.envelope.width();
  const double pext = spec.envelope.momentum_extent();

  double widest = w;
  for (double t : spec.emission_times) {
    const double tau = meeting_time - t;
    widest = std::max(widest, w * std::hypot(1.0, tau / (2.0 * spec.mass * w * w)));
  }
  const double dx_max = 0.9 * kPi / (2.0 * pext);
  const std::size_t ppp =
      std::max<std::size_t>(16, next_pow2(static_cast<std::size_t>(std::ceil(spec.lambda / dx_max))));
  const std::size_t periods =
      next_pow2(static_cast<std::size_t>(std::ceil(24.0 * widest / spec.lambda)) + 2);
  require(ppp * periods <= (std::size_t{1} << 22), ErrorCode::grid_too_small,
          "protocol grid would exceed 2^22 points");
  const GridSpec grid = GridSpec::commensurate(0.0, spec.lambda, periods, ppp);
  const std::size_t np = grid.points();
  const double dx = grid.dx();

  std::vector<cplx> base(np);
  for (std::size_t i = 0; i < np; ++i) base[i] = spec.envelope.amplitude(grid.node(i));
  const GridState start = GridState(grid, std::move(base)).normalized();
  std::vector<GridState> packets;
  for (double t : spec.emission_times)
    packets.push_back(free_propagate(start, {spec.mass, meeting_time - t}));

  // C_nm(r) = int u(x) u(x - r) dx with u = conj(phi_n) phi_m, on a
  // zero-padded grid so that lags in [-box, box) do not wrap.
  const std::size_t len = 2 * np;
  auto correlation = [&](const GridState& a, const GridState& b) {
    std::vector<cplx> u(len), uc(len);
    for (std::size_t i = 0; i < np; ++i) {
      u[i] = std::conj(a[i]) * b[i];
      uc[i] = std::conj(u[i]);
    }
    fft::forward(u);
    fft::forward(uc);
    for (std::size_t q = 0; q < len; ++q) u[q] = std::conj(uc[q]) * u[q];
    fft::inverse(u);
    // u now holds int u(x) u(x + r) dx; flip the lag.
    const double s = std::sqrt(static_cast<double>(len)) * dx;
    std::vector<cplx> c(len);
    for (std::size_t k = 0; k < len; ++k) c[k] = s * u[(len - k) % len];
    return c;  // slot k holds lag signed_index(k) * dx
  };

  std::vector<double> coherent(len, 0.0), incoherent(len, 0.0);
  const double dp = 2.0 * kPi / spec.lambda;
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      const std::vector<cplx> c = correlation(packets[a], packets[b]);
      for (std::size_t k = 0; k < len; ++k) {
        const double r = static_cast<double>(fft::signed_index(k, len)) * dx;
        if (a == b) {
          incoherent[k] += c[k].real() / n;
          coherent[k] += c[k].real() / n;
        } else {
          coherent[k] += 2.0 / n * (std::polar(1.0, (b - a) * dp * r) * c[k]).real();
        }
      }
    }
  }

  double e0 = 0.0, e2 = 0.0;
  for (std::size_t k = 0; k < len; ++k) {
    const double r = static_cast<double>(fft::signed_index(k, len)) * dx;
    e0 += incoherent[k];
    e2 += incoherent[k] * r * r;
  }
  const double spread = std::sqrt(e2 / e0);
  const std::size_t max_periods = periods;
  const std::size_t window =
      std::clamp<std::size_t>(static_cast<std::size_t>(2.0 * spread / spec.lambda), 1, max_periods);

  // Harmonics of the coherent/incoherent ratio over `window` periods.
  const auto half = static_cast<std::ptrdiff_t>(window * ppp / 2);
  std::vector<cplx> harm(n, cplx{});
  for (std::ptrdiff_t k = -half; k < half; ++k) {
    const std::size_t slot = k < 0 ? static_cast<std::size_t>(k + static_cast<std::ptrdiff_t>(len))
                                   : static_cast<std::size_t>(k);
    const double ratio = coherent[slot] / incoherent[slot];
    const double r = static_cast<double>(k) * dx;
    for (int j = 0; j < n; ++j) harm[j] += ratio * std::polar(1.0, -j * dp * r);
  }
  for (auto& h : harm) h /= static_cast<double>(2 * half);

  // Fit a F_N + b: F_N has harmonic amplitudes 2 (N - j) / N.
  double num = 0.0, den = 0.0;
  for (int j = 1; j < n; ++j) {
    const double target = 2.0 * (n - j) / n;
    num += 2.0 * std::abs(harm[j]) * target;
    den += target * target;
  }
  const double a = num / den;
  const double b = harm[0].real() - a;
  const double vis = a * n / (a * n + 2.0 * b);
  return std::isfinite(vis) ? std::clamp(vis, 0.0, 1.0) : 0.0;
}

std::vector<SweepPoint> stagger_sweep(ProtocolSpec spec, double flight_time,
                                      const std::vector<double>& staggers) {
  require(flight_time >= 0.0, ErrorCode::invalid_argument, "flight time must be non-negative");
  std::vector<SweepPoint> out;
  for (double s : staggers) {
    require(s >= 0.0, ErrorCode::invalid_argument, "stagger must be non-negative");
    spec.emission_times.resize(spec.n);
    for (int i = 0; i < spec.n; ++i) spec.emission_times[i] = i * s;
    out.push_back({s, protocol_visibility(spec, spec.emission_times.back() + flight_time)});
  }
  return out;
}

std::string to_csv(const std::vector<SweepPoint>& sweep) {
  std::ostringstream out;
  out << "stagger,visibility\n";
  char buf[64];
  for (const auto& p : sweep) {
    std::snprintf(buf, sizeof buf, "%.10g,%.10g\n", p.stagger, p.visibility);
    out << buf;
  }
  return out.str();
}

}  // namespace modvar
