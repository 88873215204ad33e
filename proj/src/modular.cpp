#include "modvar/modular.hpp"

#include <cmath>
#include <string>

namespace modvar {

namespace {

void require_rank(int n, const char* what) {
  require(n >= 1, ErrorCode::invalid_argument,
          std::string(what) + ": N must be >= 1, got " + std::to_string(n));
}

}  // namespace

ModularScale::ModularScale(double ell) : ell_(ell) {
  require(std::isfinite(ell) && ell > 0.0, ErrorCode::invalid_argument,
          "modular scale must be positive and finite");
}

ModularValue modular_decompose(double value, double period) {
  require(std::isfinite(value), ErrorCode::non_finite, "modular_decompose: non-finite value");
  require(std::isfinite(period) && period > 0.0, ErrorCode::invalid_argument,
          "modular_decompose: period must be positive");
  const double half = 0.5 * period;
  auto k = static_cast<std::int64_t>(std::floor((value + half) / period));
  double rem = value - static_cast<double>(k) * period;
  // Round-off can push the remainder just outside [-half, half).
  if (rem >= half) {
    ++k;
    rem -= period;
  } else if (rem < -half) {
    --k;
    rem += period;
  }
  return {k, rem};
}

ModularValue modular_decompose(double value, const ModularScale& scale, Axis axis) {
  return modular_decompose(value, axis == Axis::position ? scale.ell() : scale.momentum_period());
}

double fringe_function(int n, double x) {
  require_rank(n, "fringe_function");
  double sum = 0.0;
  for (int j = n - 1; j >= 1; --j) sum += (n - j) * std::cos(2.0 * kPi * j * x);
  return 1.0 + 2.0 * sum / n;
}

// Both series are summed from the smallest terms upward.
double squeezing_s1(int n) {
  require_rank(n, "squeezing_s1");
  double sum = 0.0;
  for (int j = n - 1; j >= 1; --j) {
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    sum += sign * static_cast<double>(n - j) / (static_cast<double>(n) * j * j);
  }
  return sum == 0.0 ? 0.0 : -12.0 / (kPi * kPi) * sum;
}

double squeezing_s2(int n) {
  require_rank(n, "squeezing_s2");
  double sum = 0.0;
  for (int j = n - 1; j >= 1; --j)
    sum += static_cast<double>(n - j) / (static_cast<double>(n) * j * j);
  return 6.0 / (kPi * kPi) * sum;
}

double smp_modular_position_variance(int n, const ModularScale& scale) {
  const double ell = scale.ell();
  return ell * ell / 12.0 * (1.0 - squeezing_s1(n));
}

double mpe_modular_relative_variance(int n, const ModularScale& scale) {
  const double ell = scale.ell();
  return ell * ell / 6.0 * (1.0 - squeezing_s2(n));
}

double smp_integer_momentum_variance(int n) {
  require_rank(n, "smp_integer_momentum_variance");
  const double nn = n;
  return (nn * nn - 1.0) / 12.0;
}

double smp_commutator_expectation(int n, const ModularScale& scale) {
  require_rank(n, "smp_commutator_expectation");
  const double parity = (n % 2 == 1) ? 1.0 : -1.0;  // (-1)^(N+1)
  return scale.ell() / (2.0 * kPi) * (1.0 - (1.0 + parity) / (2.0 * n));
}

}  // namespace modvar
