#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "modvar/grid.hpp"

namespace modvar {

using cplx = std::complex<double>;

/// Normalized single-packet shape phi(x) centred at the origin.
class Envelope {
 public:
  enum class Kind { gaussian, sinc, tabulated };

  struct Table {
    double x_min;
    double dx;
    std::vector<cplx> samples;  // linear interpolation between samples
  };

  /// |phi|^2 is a normal density with standard deviation sigma_x.
  static Envelope gaussian(double sigma_x);
  /// phi(x) = sinc(pi x / d) / sqrt(d).
  static Envelope sinc(double d);
  static Envelope tabulated(double x_min, double dx, std::vector<cplx> samples);

  Kind kind() const { return kind_; }
  /// sigma_x for gaussian, d for sinc, rms width for tables.
  double width() const { return width_; }
  const Table* table() const { return table_.get(); }

  cplx amplitude(double x) const;
  /// (2 pi)^(-1/2) int phi(x) exp(-i p x) dx.
  cplx momentum_amplitude(double p) const;
  /// |p| beyond which the momentum density is negligible (< 1e-16 mass).
  double momentum_extent() const;
  /// Upper bound on the probability outside [lo, hi].
  double tail_mass_outside(double lo, double hi) const;

  bool same_shape(const Envelope& other) const;

 private:
  Envelope(Kind kind, double width, std::shared_ptr<const Table> table)
      : kind_(kind), width_(width), table_(std::move(table)) {}

  Kind kind_;
  double width_;
  std::shared_ptr<const Table> table_;
};

/// phi(x - x0) exp[i p0 (x - phase_ref)].
struct WavePacket {
  Envelope envelope;
  double x0 = 0.0;
  double p0 = 0.0;
  double phase_ref = 0.0;

  cplx amplitude(double x) const;
  cplx momentum_amplitude(double p) const;
};

cplx overlap(const WavePacket& a, const WavePacket& b);

struct SuperposedState {
  struct Term {
    cplx amplitude;
    WavePacket packet;
  };
  std::vector<Term> terms;
  /// Length the fringes live on (L or lambda); 0 when not applicable.
  double fringe_scale = 0.0;
  std::vector<std::string> warnings;
};

struct TwoParticleState {
  struct Term {
    cplx amplitude;
    WavePacket first;
    WavePacket second;
  };
  std::vector<Term> terms;
  double fringe_scale = 0.0;
  std::vector<std::string> warnings;
};

struct MixtureState {
  struct Component {
    double weight;
    TwoParticleState state;
  };
  std::vector<Component> components;
};

// Builders. All results are normalized including packet overlaps.
SuperposedState build_multislit(int n, double slit_separation, const Envelope& envelope);
SuperposedState build_smp(int n, double x0, int base_index, double lambda,
                          const Envelope& envelope, std::optional<double> phase_ref = {});
TwoParticleState build_mpe(int n, double x0, int base_index, double lambda,
                           const Envelope& envelope, std::optional<double> phase_ref = {});
MixtureState build_classical_correlated(int n, double x0, int base_index, double lambda,
                                        const Envelope& envelope,
                                        std::optional<double> phase_ref = {});

MixtureState mix(std::vector<MixtureState::Component> components);
/// (1 - epsilon) pure + epsilon admixture, flattened into one ensemble.
MixtureState admix(const TwoParticleState& pure, const MixtureState& admixture, double epsilon);
MixtureState as_mixture(const TwoParticleState& pure);

double norm_squared(const SuperposedState& state);
double norm_squared(const TwoParticleState& state);
SuperposedState normalized(SuperposedState state);
TwoParticleState normalized(TwoParticleState state);

cplx position_amplitude(const SuperposedState& state, double x);
cplx momentum_amplitude(const SuperposedState& state, double p);
double position_density(const SuperposedState& state, double x);
double momentum_density(const SuperposedState& state, double p);

double joint_position_density(const TwoParticleState& state, double x1, double x2);
double joint_momentum_density(const TwoParticleState& state, double p1, double p2);
double joint_position_density(const MixtureState& state, double x1, double x2);
double joint_momentum_density(const MixtureState& state, double p1, double p2);
/// Reduced density of particle 1 (`particle` = 0) or particle 2 (= 1).
double marginal_position_density(const TwoParticleState& state, int particle, double x);

/// Position window [lo, hi] holding all packet centres of a particle.
struct Support {
  double lo;
  double hi;
  double width;
};
Support support_of(const SuperposedState& state);
Support support_of(const TwoParticleState& state, int particle);

/// Commensurate grid covering the support with +-8 widths, box an integer
/// power-of-two number of ell periods, at least `min_points` nodes.
GridSpec default_grid(const Support& support, double ell, std::size_t min_points = 4096);

/// Overrides for default_grid; unset fields fall back to its choices.
struct GridOptions {
  std::size_t min_points = 4096;
  std::optional<std::size_t> periods;
  std::optional<std::size_t> points_per_period = 512;
};
GridSpec make_grid(const Support& support, double ell, const GridOptions& options);
/// Smallest window holding `a` and `b`.
Support merge(const Support& a, const Support& b);

GridState discretize(const SuperposedState& state, const GridSpec& grid);
ProductGridState discretize(const TwoParticleState& state, const GridSpec& grid1,
                            const GridSpec& grid2);
MixtureGrid discretize(const MixtureState& state, const GridSpec& grid1, const GridSpec& grid2);

}  // namespace modvar
