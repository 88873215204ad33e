#include "modvar/kummer.hpp"

#include <cmath>

#include "modvar/error.hpp"

namespace modvar {

double kummer_m(double a, double b, double x, int max_terms) {
  require(std::isfinite(a) && std::isfinite(b) && std::isfinite(x), ErrorCode::non_finite,
          "kummer_m: non-finite argument");
  require(!(b <= 0.0 && b == std::floor(b)), ErrorCode::invalid_argument,
          "kummer_m: b must not be a non-positive integer");
  double term = 1.0;
  double sum = 1.0;
  for (int k = 0; k < max_terms; ++k) {
    term *= (a + k) / (b + k) * x / (k + 1);
    sum += term;
    if (term == 0.0) break;
    // Stop once the terms have turned monotonically decreasing and are
    // negligible against the sum.
    if (std::abs(term) < 1e-16 * std::abs(sum) && std::abs(x) < (k + 1 + std::abs(b)))
      break;
  }
  return sum;
}

double kummer_m_derivative(double a, double b, double x, int max_terms) {
  if (a == 0.0) return 0.0;
  return a / b * kummer_m(a + 1.0, b + 1.0, x, max_terms);
}

}  // namespace modvar
