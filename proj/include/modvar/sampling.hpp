#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "modvar/grid.hpp"
#include "modvar/modular.hpp"
#include "modvar/states.hpp"

namespace modvar {

enum class MeasurementKind { position, momentum };
const char* to_string(MeasurementKind kind);
MeasurementKind measurement_kind_from_string(const std::string& s);

/// Joint detection records (x1, x2) or (p1, p2).
struct SampleSet {
  std::vector<std::array<double, 2>> records;
  std::uint64_t seed = 0;
  MeasurementKind kind = MeasurementKind::position;
  std::string state_hash;
};

struct SamplingOptions {
  /// Tabulation points per axis (power of two, at most 2048).
  std::size_t points = 2048;
  /// Position window beyond the outermost packet centres, in envelope
  /// widths. Momentum windows extend by the envelope's momentum extent.
  double margin = 8.0;
};

/// Inverse-CDF sampler over tabulated joint densities, one table per
/// mixture component. Records are a pure function of (state, seed, n).
class Sampler {
 public:
  Sampler(const MixtureState& state, MeasurementKind kind, const SamplingOptions& options = {});

  SampleSet sample(std::size_t n, std::uint64_t seed) const;

  MeasurementKind kind() const { return kind_; }

 private:
  struct Table {
    GridSpec axis1;
    GridSpec axis2;
    std::vector<double> cdf;  // flat row-major running sum
  };

  MeasurementKind kind_;
  std::vector<double> weight_cdf_;
  std::vector<Table> tables_;
};

SampleSet sample_measurements(const TwoParticleState& state, MeasurementKind kind, std::size_t n,
                              std::uint64_t seed, const SamplingOptions& options = {});
SampleSet sample_measurements(const MixtureState& state, MeasurementKind kind, std::size_t n,
                              std::uint64_t seed, const SamplingOptions& options = {});

enum class Verdict { violated, not_violated, inconclusive };
const char* to_string(Verdict v);

struct EstimateOptions {
  std::size_t resamples = 1000;
  double confidence = 0.95;
};

struct EstimateReport {
  double var_mod_rel_hat = 0.0;
  double var_N_tot_hat = 0.0;
  double lhs_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double ci_halfwidth = 0.0;
  double bound = 0.0;
  std::size_t n = 0;
  Verdict verdict = Verdict::inconclusive;
  /// Set when a variance estimate had to be clamped at zero.
  bool clamped = false;
};

/// Plug-in variances of x_bar_rel (from position records) and N_p,tot
/// (from momentum records), percentile bootstrap CI, verdict against 2c.
EstimateReport estimate_criterion(const SampleSet& positions, const SampleSet& momenta,
                                  const ModularScale& scale, const EstimateOptions& options = {});

nlohmann::json to_json(const EstimateReport& report);

// CSV "index,v1,v2" plus a JSON sidecar with seed, kind, count and state hash.
void write_csv(std::ostream& out, const SampleSet& samples);
nlohmann::json sidecar(const SampleSet& samples);
SampleSet read_samples(std::istream& csv, const nlohmann::json& sidecar);

}  // namespace modvar
