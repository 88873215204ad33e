#include "modvar/criterion.hpp"

#include <algorithm>
#include <cmath>

#include "modvar/error.hpp"
#include "modvar/grid_ops.hpp"

namespace modvar {

const char* to_string(CriterionAxis axis) {
  return axis == CriterionAxis::momentum_integer ? "momentum-integer/position-modular"
                                                 : "position-integer/momentum-modular";
}

namespace {

struct Pair {
  Observable integer;
  Observable modular;
};

Pair observables(CriterionAxis axis) {
  return axis == CriterionAxis::momentum_integer
             ? Pair{Observable::n_p_tot, Observable::x_bar_rel}
             : Pair{Observable::n_x_tot, Observable::p_bar_rel};
}

double modular_period(const ModularScale& scale, CriterionAxis axis) {
  return axis == CriterionAxis::momentum_integer ? scale.ell() : scale.momentum_period();
}

struct Grids {
  GridSpec first;
  GridSpec second;
};

Grids grids_for(const std::vector<const TwoParticleState*>& states, const ModularScale& scale,
                const GridOptions& options) {
  Support s1 = support_of(*states.front(), 0);
  Support s2 = support_of(*states.front(), 1);
  for (const auto* st : states) {
    s1 = merge(s1, support_of(*st, 0));
    s2 = merge(s2, support_of(*st, 1));
  }
  return {make_grid(s1, scale.ell(), options), make_grid(s2, scale.ell(), options)};
}

struct PairMoments {
  Moments integer;
  Moments modular;
};

PairMoments moments_of(const ProductGridState& grid, const ModularScale& scale, CriterionAxis axis) {
  const Pair p = observables(axis);
  return {observable_moments(grid, p.integer, scale), observable_moments(grid, p.modular, scale)};
}

void append_warnings(std::vector<std::string>& out, const std::vector<std::string>& in) {
  for (const auto& w : in)
    if (std::find(out.begin(), out.end(), w) == out.end()) out.push_back(w);
}

}  // namespace

CriterionReport make_report(double var_n_tot, double var_mod_rel, const ModularScale& scale,
                            CriterionAxis axis) {
  require(std::isfinite(var_n_tot) && std::isfinite(var_mod_rel), ErrorCode::non_finite,
          "criterion variances must be finite");
  CriterionReport r;
  r.constant = solve_c();
  r.axis = axis;
  r.ell = scale.ell();
  r.var_N_tot = std::max(var_n_tot, 0.0);
  r.var_mod_rel = std::max(var_mod_rel, 0.0);
  const double period = modular_period(scale, axis);
  r.lhs = r.var_N_tot + r.var_mod_rel / (period * period);
  r.bound = 2.0 * r.constant.c;
  r.violated = r.lhs < r.bound - kVerdictSlack;
  r.marginal = std::abs(r.lhs - r.bound) < kMarginalBand;
  return r;
}

CriterionReport evaluate_criterion(const TwoParticleState& state, const ModularScale& scale,
                                   CriterionAxis axis, const GridOptions& grid) {
  const Grids g = grids_for({&state}, scale, grid);
  const ProductGridState pg = discretize(state, g.first, g.second);
  const PairMoments m = moments_of(pg, scale, axis);
  CriterionReport r = make_report(m.integer.variance(), m.modular.variance(), scale, axis);
  append_warnings(r.warnings, state.warnings);
  return r;
}

CriterionReport evaluate_criterion(const MixtureState& state, const ModularScale& scale,
                                   CriterionAxis axis, const GridOptions& grid) {
  require(!state.components.empty(), ErrorCode::invalid_argument, "mixture has no components");
  std::vector<const TwoParticleState*> members;
  for (const auto& c : state.components) members.push_back(&c.state);
  const Grids g = grids_for(members, scale, grid);

  std::vector<double> weights;
  std::vector<Moments> integer, modular;
  std::vector<std::string> warnings;
  for (const auto& c : state.components) {
    const PairMoments m = moments_of(discretize(c.state, g.first, g.second), scale, axis);
    weights.push_back(c.weight);
    integer.push_back(m.integer);
    modular.push_back(m.modular);
    append_warnings(warnings, c.state.warnings);
  }
  CriterionReport r = make_report(combine_moments(weights, integer).variance(),
                                  combine_moments(weights, modular).variance(), scale, axis);
  r.warnings = std::move(warnings);
  return r;
}

nlohmann::json to_json(const CriterionReport& r) {
  return {
      {"var_N_tot", r.var_N_tot},
      {"var_mod_rel", r.var_mod_rel},
      {"lhs", r.lhs},
      {"bound", r.bound},
      {"violated", r.violated},
      {"marginal", r.marginal},
      {"axis", to_string(r.axis)},
      {"ell", r.ell},
      {"c", {{"value", r.constant.c},
             {"method", to_string(r.constant.method)},
             {"residual", r.constant.residual},
             {"quoted", kQuotedC}}},
      {"warnings", r.warnings},
  };
}

double robustness_threshold_closed_form(int n) {
  require(n >= 2, ErrorCode::invalid_argument, "robustness threshold needs N >= 2");
  const double s2 = squeezing_s2(n);
  return std::min(1.0, (12.0 * solve_c().c - 1.0 + s2) / s2);
}

RobustnessReport robustness_threshold(int n, const RobustnessOptions& options) {
  require(n >= 2, ErrorCode::invalid_argument, "robustness threshold needs N >= 2");
  const ModularScale scale(options.lambda);
  const Envelope env = Envelope::gaussian(options.sigma_over_lambda * options.lambda);
  const TwoParticleState pure = build_mpe(n, 0.0, 0, options.lambda, env);
  const MixtureState classical = build_classical_correlated(n, 0.0, 0, options.lambda, env);

  std::vector<const TwoParticleState*> members{&pure};
  for (const auto& c : classical.components) members.push_back(&c.state);
  const Grids g = grids_for(members, scale, options.grid);
  const CriterionAxis axis = CriterionAxis::momentum_integer;

  const PairMoments pure_m = moments_of(discretize(pure, g.first, g.second), scale, axis);
  std::vector<PairMoments> classical_m;
  for (const auto& c : classical.components)
    classical_m.push_back(moments_of(discretize(c.state, g.first, g.second), scale, axis));

  auto violated_at = [&](double eps) {
    std::vector<double> w{1.0 - eps};
    std::vector<Moments> integer{pure_m.integer}, modular{pure_m.modular};
    for (std::size_t i = 0; i < classical_m.size(); ++i) {
      w.push_back(eps * classical.components[i].weight);
      integer.push_back(classical_m[i].integer);
      modular.push_back(classical_m[i].modular);
    }
    return make_report(combine_moments(w, integer).variance(),
                       combine_moments(w, modular).variance(), scale, axis)
        .violated;
  };

  RobustnessReport r;
  r.n = n;
  r.closed_form = robustness_threshold_closed_form(n);
  require(violated_at(0.0), ErrorCode::invalid_argument,
          "pure state does not violate the criterion on this grid");
  if (violated_at(1.0)) {
    r.bisection = 1.0;
  } else {
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (lo + hi);
      (violated_at(mid) ? lo : hi) = mid;
    }
    r.bisection = lo;
  }
  r.visibility = visibility_of_admixture(r.bisection, n);
  r.discrepancy_flag = std::abs(r.bisection - r.closed_form) > 1e-2;
  return r;
}

nlohmann::json to_json(const RobustnessReport& r) {
  return {{"N", r.n},
          {"epsilon_closed_form", r.closed_form},
          {"epsilon_bisection", r.bisection},
          {"visibility", r.visibility},
          {"discrepancy_flag", r.discrepancy_flag}};
}

double visibility_of_admixture(double epsilon, int n) {
  require(epsilon >= 0.0 && epsilon <= 1.0, ErrorCode::invalid_argument,
          "epsilon must lie in [0, 1]");
  require(n >= 1, ErrorCode::invalid_argument, "N must be positive");
  if (n == 1) return 0.0;
  const double coherent = (1.0 - epsilon) * n;
  return coherent / (coherent + 2.0 * epsilon);
}

}  // namespace modvar
