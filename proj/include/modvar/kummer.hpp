#pragma once

namespace modvar {

/// Confluent hypergeometric function M(a, b; x) = sum_k (a)_k x^k / ((b)_k k!),
/// summed until a term drops below 1e-16 of the running sum or `max_terms`
/// is reached. Throws for b a non-positive integer.
double kummer_m(double a, double b, double x, int max_terms = 500);

/// d/dx M(a, b; x) = (a / b) M(a + 1, b + 1; x).
double kummer_m_derivative(double a, double b, double x, int max_terms = 500);

}  // namespace modvar
