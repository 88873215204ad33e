#pragma once

#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "modvar/grid.hpp"
#include "modvar/states.hpp"

namespace modvar {

struct PropagationParams {
  double mass = 1.0;
  double time = 0.0;
};

/// Largest |p| carrying momentum probability above 1e-14 of the total.
double significant_momentum(const GridState& state);

/// Free evolution exp(-i p^2 t / 2m) applied in momentum space. Requires
/// the momentum content to stay below half the Nyquist wavenumber.
GridState free_propagate(const GridState& state, const PropagationParams& params);

/// `steps` successive propagations by `params.time`; `progress(done, steps)`
/// is called after each one when set.
GridState propagate_in_steps(const GridState& state, const PropagationParams& params, int steps,
                             const std::function<void(int, int)>& progress = {});

/// p = m (x - mean_x) / t.
double far_field_map(double x, double mean_x, const PropagationParams& params);

struct FarFieldProfile {
  std::vector<double> momentum;
  std::vector<double> density;  // per unit momentum
};

/// Position density of a propagated state pushed through the far-field map.
FarFieldProfile far_field_profile(const GridState& propagated, const PropagationParams& params);

struct ProtocolSpec {
  int n = 2;
  std::vector<double> emission_times;
  double lambda = 1.0;
  Envelope envelope = Envelope::gaussian(1.0);
  double mass = 1.0;
  int base_index = 0;
};

/// Checks list length, ordering (non-decreasing) and positivity.
void validate(const ProtocolSpec& spec);

ProtocolSpec protocol_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ProtocolSpec& spec);

/// Fringe visibility of the relative-coordinate density when component n
/// has spread freely for meeting_time - emission_times[n].
double protocol_visibility(const ProtocolSpec& spec, double meeting_time);

struct SweepPoint {
  double stagger;
  double visibility;
};

/// Equally staggered emissions t_n = n * stagger, meeting a fixed
/// `flight_time` after the last one.
std::vector<SweepPoint> stagger_sweep(ProtocolSpec spec, double flight_time,
                                      const std::vector<double>& staggers);

std::string to_csv(const std::vector<SweepPoint>& sweep);

}  // namespace modvar
