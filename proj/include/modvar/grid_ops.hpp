#pragma once

#include <algorithm>
#include <complex>
#include <vector>

#include "modvar/grid.hpp"
#include "modvar/modular.hpp"

namespace modvar {

enum class Observable {
  // single particle
  x,
  p,
  n_x,
  n_p,
  x_bar,
  p_bar,
  // two particles
  x_bar_rel,  // x_bar_1 - x_bar_2
  n_p_tot,    // N_p1 + N_p2
  n_x_tot,    // N_x1 + N_x2
  p_bar_rel,  // p_bar_1 - p_bar_2
};

bool is_two_particle(Observable obs);
/// True for observables diagonal in momentum (p, N_p, p_bar and their
/// two-particle combinations).
bool is_momentum_diagonal(Observable obs);
const char* to_string(Observable obs);

enum class CommutatorPair { n_x_p_bar, x_bar_n_p };

struct Moments {
  double mean = 0.0;
  double second = 0.0;
  double variance() const { return std::max(second - mean * mean, 0.0); }
};

/// Values of a single-particle observable on the grid: position nodes for
/// x, N_x, x_bar; FFT momentum slots for p, N_p, p_bar. Momentum-side
/// modular observables need a box that is an integer multiple of ell.
std::vector<double> observable_values(const GridSpec& grid, Observable obs,
                                      const ModularScale& scale);

/// Integer momentum of each FFT slot, exact on a box of M ell:
/// N_p(j) = floor((2 j + M) / (2 M)) for signed slot index j.
std::vector<double> integer_momentum_lattice(const GridSpec& grid, const ModularScale& scale);

GridState apply_modular_operator(const GridState& state, Observable obs, const ModularScale& scale);

Moments observable_moments(const GridState& state, Observable obs, const ModularScale& scale);
Moments observable_moments(const ProductGridState& state, Observable obs, const ModularScale& scale);
Moments observable_moments(const DenseGrid2D& state, Observable obs, const ModularScale& scale);

double observable_variance(const GridState& state, Observable obs, const ModularScale& scale);
double observable_variance(const ProductGridState& state, Observable obs, const ModularScale& scale);
double observable_variance(const DenseGrid2D& state, Observable obs, const ModularScale& scale);
/// Law of total variance over the ensemble.
double observable_variance(const MixtureGrid& state, Observable obs, const ModularScale& scale);

/// Combines per-component moments with weights: sum w_i Var_i + Var_w(mean_i).
Moments combine_moments(const std::vector<double>& weights, const std::vector<Moments>& parts);

/// <[A, B]> = <A B> - <B A> with both orders applied on the grid.
cplx commutator_expectation(const GridState& state, CommutatorPair pair, const ModularScale& scale);

}  // namespace modvar
