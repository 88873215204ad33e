#pragma once

#include <cstdint>

#include "modvar/error.hpp"
#include "modvar/units.hpp"

namespace modvar {

/// Partition length ell of the integer/modular split. Momentum is split
/// at h/ell.
class ModularScale {
 public:
  explicit ModularScale(double ell);

  double ell() const { return ell_; }
  double momentum_period() const { return kPlanck / ell_; }

 private:
  double ell_;
};

enum class Axis { position, momentum };

struct ModularValue {
  std::int64_t integer_part = 0;
  double modular_part = 0.0;
};

/// Splits `value` as integer_part * period + modular_part with
/// modular_part in [-period/2, period/2). The period is ell for positions
/// and h/ell for momenta.
ModularValue modular_decompose(double value, const ModularScale& scale, Axis axis);
ModularValue modular_decompose(double value, double period);

/// N-slit fringe function, period 1, mean 1, F_N(0) = N.
double fringe_function(int n, double x);

double squeezing_s1(int n);
double squeezing_s2(int n);

// Closed-form variances and commutator expectation (fringe phase zero).
double smp_modular_position_variance(int n, const ModularScale& scale);
double mpe_modular_relative_variance(int n, const ModularScale& scale);
double smp_integer_momentum_variance(int n);
double smp_commutator_expectation(int n, const ModularScale& scale);

}  // namespace modvar
