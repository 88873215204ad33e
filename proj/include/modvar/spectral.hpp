#pragma once

#include <optional>
#include <string>
#include <vector>

#include "modvar/grid.hpp"
#include "modvar/modular.hpp"

namespace modvar {

enum class EigenMethod { kummer_shoot, brute_force, perturbative };
const char* to_string(EigenMethod method);

/// Smallest eigenvalue c of A = N_p^2 + x_bar^2 / ell^2 and how it was found.
struct EigenSolveReport {
  double c = 0.0;
  std::vector<double> mu_spectrum_head;
  EigenMethod method = EigenMethod::kummer_shoot;
  double residual = 0.0;
  int iterations = 0;
  /// Ground state on the brute-force grid (brute_force only).
  std::optional<GridState> ground_state;
};

/// Value quoted in the literature, for reports.
inline constexpr double kQuotedC = 0.078235;

/// d/dx_bar of exp(-pi u^2) M(-pi mu / 2 + 1/4, 1/2, 2 pi u^2) at
/// x_bar = ell / 2, u = x_bar / ell. Zero exactly at eigenvalues of the
/// even (Neumann) cell problem.
double boundary_mismatch(double mu, const ModularScale& scale);

/// Smallest root of the boundary mismatch. Bracket seeded at 7/90 +- 0.02;
/// results are cached per tolerance.
EigenSolveReport solve_c(double tolerance = 1e-12);

/// The first `count` roots of the boundary mismatch, ascending.
std::vector<double> shooting_spectrum(int count, double tolerance = 1e-12);

/// 1/12 (1 - 1/15) = 7/90.
double perturbative_c();

struct BruteForceOptions {
  int max_outer_iterations = 200;
  int max_cg_iterations = 500;
  double tolerance = 1e-12;
  /// Number of eigenvalues to report (block iteration with Rayleigh-Ritz).
  int eigenvalues = 1;
};

/// Smallest eigenvalue of A on a periodic grid of M ell (ell = 1) by
/// inverse power iteration with preconditioned conjugate-gradient solves.
EigenSolveReport brute_force_c(int periods, int points_per_period,
                               const BruteForceOptions& options = {});

}  // namespace modvar
