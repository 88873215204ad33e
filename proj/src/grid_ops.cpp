#include "modvar/grid_ops.hpp"

#include <algorithm>
#include <cmath>

#include "modvar/error.hpp"
#include "modvar/fft.hpp"
#include "modvar/kernels.hpp"

namespace modvar {

namespace {

struct Split {
  Observable single;
  double sign;
};

Split split_two_particle(Observable obs) {
  switch (obs) {
    case Observable::x_bar_rel: return {Observable::x_bar, -1.0};
    case Observable::n_p_tot: return {Observable::n_p, 1.0};
    case Observable::n_x_tot: return {Observable::n_x, 1.0};
    case Observable::p_bar_rel: return {Observable::p_bar, -1.0};
    default: break;
  }
  throw Error(ErrorCode::invalid_argument,
              std::string("observable ") + to_string(obs) + " is not a two-particle observable");
}

std::int64_t require_periods(const GridSpec& grid, const ModularScale& scale) {
  const auto periods = grid.periods_of(scale.ell());
  require(periods.has_value(), ErrorCode::incommensurate_grid,
          "box length is not an integer multiple of ell");
  return *periods;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::vector<cplx> to_momentum(std::span<const cplx> amp) {
  std::vector<cplx> a(amp.begin(), amp.end());
  fft::forward(a);
  return a;
}

std::vector<double> powers(const std::vector<double>& values, int k) {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = k == 1 ? values[i] : values[i] * values[i];
  return out;
}

// Gram matrices <f_n| a^k |f_m> dx for k = 0, 1, 2.
struct Grams {
  std::size_t n;
  std::vector<cplx> g[3];
};

Grams gram_matrices(const std::vector<std::vector<cplx>>& funcs, const std::vector<double>& values,
                    double dx) {
  const std::size_t n = funcs.size();
  Grams out{n, {}};
  const std::vector<double> a1 = powers(values, 1);
  const std::vector<double> a2 = powers(values, 2);
  for (auto& g : out.g) g.assign(n * n, cplx{});
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = r; c < n; ++c) {
      const cplx v[3] = {kernels::inner(funcs[r], funcs[c]) * dx,
                         kernels::weighted_inner(funcs[r], funcs[c], a1) * dx,
                         kernels::weighted_inner(funcs[r], funcs[c], a2) * dx};
      for (int k = 0; k < 3; ++k) {
        out.g[k][r * n + c] = v[k];
        out.g[k][c * n + r] = std::conj(v[k]);
      }
    }
  }
  return out;
}

}  // namespace

bool is_two_particle(Observable obs) {
  switch (obs) {
    case Observable::x_bar_rel:
    case Observable::n_p_tot:
    case Observable::n_x_tot:
    case Observable::p_bar_rel: return true;
    default: return false;
  }
}

bool is_momentum_diagonal(Observable obs) {
  switch (obs) {
    case Observable::p:
    case Observable::n_p:
    case Observable::p_bar:
    case Observable::n_p_tot:
    case Observable::p_bar_rel: return true;
    default: return false;
  }
}

const char* to_string(Observable obs) {
  switch (obs) {
    case Observable::x: return "x";
    case Observable::p: return "p";
    case Observable::n_x: return "N_x";
    case Observable::n_p: return "N_p";
    case Observable::x_bar: return "x_bar";
    case Observable::p_bar: return "p_bar";
    case Observable::x_bar_rel: return "x_bar_rel";
    case Observable::n_p_tot: return "N_p_tot";
    case Observable::n_x_tot: return "N_x_tot";
    case Observable::p_bar_rel: return "p_bar_rel";
  }
  return "?";
}

std::vector<double> integer_momentum_lattice(const GridSpec& grid, const ModularScale& scale) {
  const std::int64_t m = require_periods(grid, scale);
  std::vector<double> out(grid.points());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto j = static_cast<std::int64_t>(fft::signed_index(i, grid.points()));
    out[i] = static_cast<double>(floor_div(2 * j + m, 2 * m));
  }
  return out;
}

std::vector<double> observable_values(const GridSpec& grid, Observable obs,
                                      const ModularScale& scale) {
  require(!is_two_particle(obs), ErrorCode::invalid_argument,
          std::string("observable ") + to_string(obs) + " needs a two-particle state");
  const std::size_t n = grid.points();
  std::vector<double> out(n);
  switch (obs) {
    case Observable::x:
      for (std::size_t i = 0; i < n; ++i) out[i] = grid.node(i);
      break;
    case Observable::n_x:
    case Observable::x_bar:
      for (std::size_t i = 0; i < n; ++i) {
        const ModularValue v = modular_decompose(grid.node(i), scale, Axis::position);
        out[i] = obs == Observable::n_x ? static_cast<double>(v.integer_part) : v.modular_part;
      }
      break;
    case Observable::p:
      for (std::size_t i = 0; i < n; ++i) out[i] = grid.momentum(i);
      break;
    case Observable::n_p:
      out = integer_momentum_lattice(grid, scale);
      break;
    case Observable::p_bar: {
      const std::int64_t m = require_periods(grid, scale);
      const std::vector<double> np = integer_momentum_lattice(grid, scale);
      for (std::size_t i = 0; i < n; ++i) {
        const auto j = static_cast<std::int64_t>(fft::signed_index(i, n));
        out[i] = grid.dk() * static_cast<double>(j - static_cast<std::int64_t>(np[i]) * m);
      }
      break;
    }
    default: break;
  }
  return out;
}

GridState apply_modular_operator(const GridState& state, Observable obs, const ModularScale& scale) {
  const std::vector<double> values = observable_values(state.spec(), obs, scale);
  std::vector<cplx> a(state.amplitudes().begin(), state.amplitudes().end());
  if (is_momentum_diagonal(obs)) {
    fft::forward(a);
    kernels::scale_pointwise(a, values);
    fft::inverse(a);
  } else {
    kernels::scale_pointwise(a, values);
  }
  return GridState(state.spec(), std::move(a));
}

Moments observable_moments(const GridState& state, Observable obs, const ModularScale& scale) {
  const std::vector<double> values = observable_values(state.spec(), obs, scale);
  kernels::DiagonalMoments m;
  if (is_momentum_diagonal(obs)) {
    const std::vector<cplx> a = to_momentum(state.amplitudes());
    m = kernels::diagonal_moments(a, values);
  } else {
    m = kernels::diagonal_moments(state.amplitudes(), values);
  }
  require(m.m0 > 0.0, ErrorCode::invalid_argument, "state has zero norm");
  return {m.m1 / m.m0, m.m2 / m.m0};
}

Moments observable_moments(const ProductGridState& state, Observable obs, const ModularScale& scale) {
  const Split split = split_two_particle(obs);
  const bool momentum = is_momentum_diagonal(obs);
  const std::vector<double> a1 = observable_values(state.spec1(), split.single, scale);
  const std::vector<double> a2 = observable_values(state.spec2(), split.single, scale);

  std::vector<std::vector<cplx>> f, g;
  for (const auto& t : state.terms()) {
    f.push_back(momentum ? to_momentum(t.first) : t.first);
    g.push_back(momentum ? to_momentum(t.second) : t.second);
  }
  const Grams g1 = gram_matrices(f, a1, state.spec1().dx());
  const Grams g2 = gram_matrices(g, a2, state.spec2().dx());

  const double s = split.sign;
  cplx norm = 0.0, first = 0.0, second = 0.0;
  const auto& terms = state.terms();
  const std::size_t n = terms.size();
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const std::size_t k = r * n + c;
      const cplx w = std::conj(terms[r].coeff) * terms[c].coeff;
      norm += w * g1.g[0][k] * g2.g[0][k];
      first += w * (g1.g[1][k] * g2.g[0][k] + s * g1.g[0][k] * g2.g[1][k]);
      second += w * (g1.g[2][k] * g2.g[0][k] + 2.0 * s * g1.g[1][k] * g2.g[1][k] +
                     g1.g[0][k] * g2.g[2][k]);
    }
  }
  require(norm.real() > 0.0, ErrorCode::invalid_argument, "state has zero norm");
  return {first.real() / norm.real(), second.real() / norm.real()};
}

Moments observable_moments(const DenseGrid2D& state, Observable obs, const ModularScale& scale) {
  const Split split = split_two_particle(obs);
  const std::vector<double> a1 = observable_values(state.spec1(), split.single, scale);
  const std::vector<double> a2 = observable_values(state.spec2(), split.single, scale);
  const std::vector<double> prob =
      is_momentum_diagonal(obs) ? state.momentum_probabilities() : state.density();
  const std::size_t n2 = state.spec2().points();
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < a1.size(); ++i) {
    for (std::size_t j = 0; j < n2; ++j) {
      const double w = prob[i * n2 + j];
      const double v = a1[i] + split.sign * a2[j];
      m0 += w;
      m1 += w * v;
      m2 += w * v * v;
    }
  }
  require(m0 > 0.0, ErrorCode::invalid_argument, "state has zero norm");
  return {m1 / m0, m2 / m0};
}

double observable_variance(const GridState& state, Observable obs, const ModularScale& scale) {
  return observable_moments(state, obs, scale).variance();
}

double observable_variance(const ProductGridState& state, Observable obs, const ModularScale& scale) {
  return observable_moments(state, obs, scale).variance();
}

double observable_variance(const DenseGrid2D& state, Observable obs, const ModularScale& scale) {
  return observable_moments(state, obs, scale).variance();
}

Moments combine_moments(const std::vector<double>& weights, const std::vector<Moments>& parts) {
  require(weights.size() == parts.size() && !parts.empty(), ErrorCode::invalid_argument,
          "combine_moments: size mismatch");
  double total = 0.0;
  Moments out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    total += weights[i];
    out.mean += weights[i] * parts[i].mean;
    out.second += weights[i] * parts[i].second;
  }
  out.mean /= total;
  out.second /= total;
  return out;
}

double observable_variance(const MixtureGrid& state, Observable obs, const ModularScale& scale) {
  std::vector<double> w;
  std::vector<Moments> parts;
  for (const auto& c : state.components) {
    w.push_back(c.weight);
    parts.push_back(observable_moments(c.state, obs, scale));
  }
  return combine_moments(w, parts).variance();
}

cplx commutator_expectation(const GridState& state, CommutatorPair pair, const ModularScale& scale) {
  const Observable a = pair == CommutatorPair::n_x_p_bar ? Observable::n_x : Observable::x_bar;
  const Observable b = pair == CommutatorPair::n_x_p_bar ? Observable::p_bar : Observable::n_p;
  const GridState ab = apply_modular_operator(apply_modular_operator(state, b, scale), a, scale);
  const GridState ba = apply_modular_operator(apply_modular_operator(state, a, scale), b, scale);
  const double dx = state.spec().dx();
  return (kernels::inner(state.amplitudes(), ab.amplitudes()) -
          kernels::inner(state.amplitudes(), ba.amplitudes())) *
         dx;
}

}  // namespace modvar
