#pragma once

#include <numbers>

namespace modvar {

// Canonical units: hbar = 1, so Planck's constant is 2*pi and the momentum
// partition belonging to a position partition ell is 2*pi/ell.
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kHbar = 1.0;
inline constexpr double kPlanck = 2.0 * kPi * kHbar;

namespace si {
inline constexpr double hbar = 1.054571817e-34;      // J s
inline constexpr double atomic_mass = 1.66053906660e-27;  // kg
inline constexpr double lithium7_mass = 7.0160034366 * atomic_mass;
}  // namespace si

/// Maps SI quantities onto canonical units with a chosen length unit and
/// the particle mass as mass unit. The time unit follows from hbar = 1.
struct SiScale {
  double length_m = 1.0;
  double mass_kg = 1.0;

  double time_unit_s() const { return mass_kg * length_m * length_m / si::hbar; }
  double length(double meters) const { return meters / length_m; }
  double time(double seconds) const { return seconds / time_unit_s(); }
  double mass(double kilograms) const { return kilograms / mass_kg; }
};

}  // namespace modvar
