#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "modvar/modular.hpp"
#include "modvar/spectral.hpp"
#include "modvar/states.hpp"

namespace modvar {

/// Which pair enters the sum: N_p,tot with x_bar_rel (the default), or the
/// conjugate pair N_x,tot with p_bar_rel.
enum class CriterionAxis { momentum_integer, position_integer };
const char* to_string(CriterionAxis axis);

inline constexpr double kVerdictSlack = 1e-9;
inline constexpr double kMarginalBand = 1e-6;

struct CriterionReport {
  double var_N_tot = 0.0;
  /// Variance of the modular relative coordinate (length^2, or momentum^2
  /// on the conjugate axis).
  double var_mod_rel = 0.0;
  double lhs = 0.0;
  double bound = 0.0;
  bool violated = false;
  bool marginal = false;
  CriterionAxis axis = CriterionAxis::momentum_integer;
  double ell = 1.0;
  EigenSolveReport constant;
  std::vector<std::string> warnings;
};

/// Fills bound, verdict and flags from the two variances.
CriterionReport make_report(double var_n_tot, double var_mod_rel, const ModularScale& scale,
                            CriterionAxis axis);

CriterionReport evaluate_criterion(const TwoParticleState& state, const ModularScale& scale,
                                   CriterionAxis axis = CriterionAxis::momentum_integer,
                                   const GridOptions& grid = {});
CriterionReport evaluate_criterion(const MixtureState& state, const ModularScale& scale,
                                   CriterionAxis axis = CriterionAxis::momentum_integer,
                                   const GridOptions& grid = {});

nlohmann::json to_json(const CriterionReport& report);

struct RobustnessOptions {
  double lambda = 1.0;
  /// Gaussian packet width in units of lambda.
  double sigma_over_lambda = 2.0;
  GridOptions grid;
};

struct RobustnessReport {
  int n = 0;
  /// (12 c - 1 + S2) / S2 for ideal envelopes.
  double closed_form = 0.0;
  /// Bisection on the grid-evaluated mixture.
  double bisection = 0.0;
  double visibility = 0.0;
  bool discrepancy_flag = false;
};

/// Largest admixture epsilon of the classical correlated state to MPE that
/// keeps the criterion violated.
RobustnessReport robustness_threshold(int n, const RobustnessOptions& options = {});
double robustness_threshold_closed_form(int n);

nlohmann::json to_json(const RobustnessReport& report);

/// Fringe visibility of (1 - epsilon) F_N + epsilon, the relative-coordinate
/// density of the admixed state. Zero for N = 1.
double visibility_of_admixture(double epsilon, int n);

}  // namespace modvar
