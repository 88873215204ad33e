#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "json.hpp"
#include "modvar/grid.hpp"
#include "modvar/states.hpp"

namespace modvar {

// Envelope JSON:
//   {"kind": "gaussian", "sigma_x": s}
//   {"kind": "sinc", "d": d}
//   {"kind": "tabulated", "x_min": a, "dx": h, "re": [...], "im": [...]}
Envelope envelope_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Envelope& envelope);

enum class StateKind { multislit, smp, mpe, classical };
const char* to_string(StateKind kind);

/// Serializable recipe for one of the builder states. `scale` is the slit
/// separation L for multislit states and lambda otherwise.
struct StateDescriptor {
  StateKind kind = StateKind::mpe;
  int n = 2;
  double x0 = 0.0;
  int base_index = 0;
  double scale = 1.0;
  Envelope envelope = Envelope::gaussian(2.0);
  std::optional<double> phase_ref;
};

/// Unknown keys are rejected.
StateDescriptor descriptor_from_json(const nlohmann::json& j);
nlohmann::json to_json(const StateDescriptor& d);
/// FNV-1a 64 of the canonical JSON dump, as 16 hex digits.
std::string descriptor_hash(const StateDescriptor& d);

bool is_two_particle(StateKind kind);
SuperposedState build_single(const StateDescriptor& d);
/// Pure two-particle state; throws for the classical (mixed) kind.
TwoParticleState build_pair(const StateDescriptor& d);
/// Any two-particle kind as an ensemble.
MixtureState build_ensemble(const StateDescriptor& d);

// CSV with header "x,re,im" (one particle) or "x1,x2,re,im" (two).
void write_csv(std::ostream& out, const GridState& state);
void write_csv(std::ostream& out, const DenseGrid2D& state);
GridState read_grid_state_csv(std::istream& in);
DenseGrid2D read_dense_grid_csv(std::istream& in);

}  // namespace modvar
