#include "modvar/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "modvar/error.hpp"
#include "modvar/kernels.hpp"
#include "modvar/rng.hpp"
#include "modvar/spectral.hpp"

namespace modvar {

const char* to_string(MeasurementKind kind) {
  return kind == MeasurementKind::position ? "position" : "momentum";
}

MeasurementKind measurement_kind_from_string(const std::string& s) {
  if (s == "position") return MeasurementKind::position;
  if (s == "momentum") return MeasurementKind::momentum;
  throw Error(ErrorCode::parse, "unknown measurement kind '" + s + "'");
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::violated: return "violated";
    case Verdict::not_violated: return "not_violated";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

const WavePacket& packet(const TwoParticleState::Term& t, int particle) {
  return particle == 0 ? t.first : t.second;
}

GridSpec sampling_axis(const TwoParticleState& state, int particle, MeasurementKind kind,
                       const SamplingOptions& options) {
  double lo = 0.0, hi = 0.0, pad = 0.0;
  bool first = true;
  for (const auto& t : state.terms) {
    const WavePacket& w = packet(t, particle);
    const double centre = kind == MeasurementKind::position ? w.x0 : w.p0;
    const double reach = kind == MeasurementKind::position ? options.margin * w.envelope.width()
                                                           : w.envelope.momentum_extent();
    lo = first ? centre : std::min(lo, centre);
    hi = first ? centre : std::max(hi, centre);
    pad = std::max(pad, reach);
    first = false;
  }
  return GridSpec(options.points, lo - pad, hi + pad);
}

std::vector<cplx> tabulate(const WavePacket& w, const GridSpec& axis, MeasurementKind kind) {
  std::vector<cplx> out(axis.points());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double v = axis.node(i);
    out[i] = kind == MeasurementKind::position ? w.amplitude(v) : w.momentum_amplitude(v);
  }
  return out;
}

}  // namespace

Sampler::Sampler(const MixtureState& state, MeasurementKind kind, const SamplingOptions& options)
    : kind_(kind) {
  require(!state.components.empty(), ErrorCode::invalid_argument, "mixture has no components");
  require(options.points >= 16 && options.points <= DenseGrid2D::kMaxAxisPoints,
          ErrorCode::invalid_argument, "sampling points per axis must lie in [16, 2048]");
  double running = 0.0;
  for (const auto& c : state.components) {
    require(!c.state.terms.empty(), ErrorCode::invalid_argument, "component has no terms");
    running += c.weight;
    weight_cdf_.push_back(running);

    Table table{sampling_axis(c.state, 0, kind, options), sampling_axis(c.state, 1, kind, options), {}};
    std::vector<ProductGridState::Term> terms;
    for (const auto& t : c.state.terms) {
      terms.push_back({t.amplitude, tabulate(t.first, table.axis1, kind),
                       tabulate(t.second, table.axis2, kind)});
    }
    const DenseGrid2D dense =
        DenseGrid2D::from_product(ProductGridState(table.axis1, table.axis2, std::move(terms)));
    const auto amp = dense.amplitudes();
    table.cdf.resize(amp.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < amp.size(); ++i) {
      sum += std::norm(amp[i]);
      table.cdf[i] = sum;
    }
    require(std::isfinite(sum) && sum > 0.0, ErrorCode::invalid_argument,
            "tabulated density cannot be normalized");
    tables_.push_back(std::move(table));
  }
  require(running > 0.0, ErrorCode::invalid_argument, "mixture weights sum to zero");
}

SampleSet Sampler::sample(std::size_t n, std::uint64_t seed) const {
  require(n >= 1, ErrorCode::invalid_argument, "need at least one sample");
  SampleSet out;
  out.seed = seed;
  out.kind = kind_;
  out.records.resize(n);

  const std::uint64_t choice_key = rng::stream_key(seed, 0);
  std::vector<std::uint32_t> component(n, 0);
  std::vector<std::size_t> counts(tables_.size(), 0);
  const double total = weight_cdf_.back();
  for (std::size_t k = 0; k < n; ++k) {
    if (tables_.size() > 1) {
      const double u = rng::uniform(choice_key, k) * total;
      const auto it = std::upper_bound(weight_cdf_.begin(), weight_cdf_.end(), u);
      component[k] = static_cast<std::uint32_t>(
          std::min<std::ptrdiff_t>(it - weight_cdf_.begin(), tables_.size() - 1));
    }
    ++counts[component[k]];
  }

  std::vector<std::vector<std::array<double, 2>>> drawn(tables_.size());
  for (std::size_t c = 0; c < tables_.size(); ++c) {
    const Table& t = tables_[c];
    const std::size_t m = counts[c];
    std::vector<std::size_t> cells(m);
    std::vector<double> offsets(m);
    kernels::sample_cdf(t.cdf, rng::stream_key(seed, 1 + 2 * c), 0, cells, offsets);
    const std::uint64_t jitter_key = rng::stream_key(seed, 2 + 2 * c);
    const std::size_t n2 = t.axis2.points();
    drawn[c].resize(m);
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t i1 = cells[j] / n2;
      const std::size_t i2 = cells[j] % n2;
      drawn[c][j] = {t.axis1.node(i1) + (rng::uniform(jitter_key, j) - 0.5) * t.axis1.dx(),
                     t.axis2.node(i2) + (offsets[j] - 0.5) * t.axis2.dx()};
    }
  }
  std::vector<std::size_t> next(tables_.size(), 0);
  for (std::size_t k = 0; k < n; ++k) out.records[k] = drawn[component[k]][next[component[k]]++];
  return out;
}

SampleSet sample_measurements(const TwoParticleState& state, MeasurementKind kind, std::size_t n,
                              std::uint64_t seed, const SamplingOptions& options) {
  return Sampler(as_mixture(state), kind, options).sample(n, seed);
}

SampleSet sample_measurements(const MixtureState& state, MeasurementKind kind, std::size_t n,
                              std::uint64_t seed, const SamplingOptions& options) {
  return Sampler(state, kind, options).sample(n, seed);
}

namespace {

struct Plugin {
  double variance;
  bool clamped;
};

Plugin plugin_variance(const std::vector<double>& v) {
  const double shift = v.front();
  double s1 = 0.0, s2 = 0.0;
  for (double x : v) {
    s1 += x - shift;
    s2 += (x - shift) * (x - shift);
  }
  const double n = static_cast<double>(v.size());
  const double mean = s1 / n;
  const double var = s2 / n - mean * mean;
  return {std::max(var, 0.0), var < 0.0};
}

double percentile(std::vector<double> sorted_copy, double q) {
  std::sort(sorted_copy.begin(), sorted_copy.end());
  const double pos = q * static_cast<double>(sorted_copy.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted_copy.size() - 1);
  return sorted_copy[lo] + (pos - static_cast<double>(lo)) * (sorted_copy[hi] - sorted_copy[lo]);
}

}  // namespace

EstimateReport estimate_criterion(const SampleSet& positions, const SampleSet& momenta,
                                  const ModularScale& scale, const EstimateOptions& options) {
  require(positions.kind == MeasurementKind::position, ErrorCode::invalid_argument,
          "first sample set must hold position records");
  require(momenta.kind == MeasurementKind::momentum, ErrorCode::invalid_argument,
          "second sample set must hold momentum records");
  require(positions.records.size() >= 100 && momenta.records.size() >= 100,
          ErrorCode::invalid_argument, "bootstrap needs at least 100 records per kind");
  require(options.resamples >= 10, ErrorCode::invalid_argument, "need at least 10 resamples");
  require(options.confidence > 0.0 && options.confidence < 1.0, ErrorCode::invalid_argument,
          "confidence must lie in (0, 1)");

  std::vector<double> rel(positions.records.size()), tot(momenta.records.size());
  for (std::size_t i = 0; i < rel.size(); ++i) {
    const auto& r = positions.records[i];
    rel[i] = modular_decompose(r[0], scale, Axis::position).modular_part -
             modular_decompose(r[1], scale, Axis::position).modular_part;
  }
  for (std::size_t i = 0; i < tot.size(); ++i) {
    const auto& r = momenta.records[i];
    tot[i] = static_cast<double>(modular_decompose(r[0], scale, Axis::momentum).integer_part +
                                 modular_decompose(r[1], scale, Axis::momentum).integer_part);
  }

  const double ell2 = scale.ell() * scale.ell();
  const Plugin vr = plugin_variance(rel);
  const Plugin vn = plugin_variance(tot);

  EstimateReport rep;
  rep.n = std::min(rel.size(), tot.size());
  rep.var_mod_rel_hat = vr.variance;
  rep.var_N_tot_hat = vn.variance;
  rep.clamped = vr.clamped || vn.clamped;
  rep.lhs_hat = rep.var_N_tot_hat + rep.var_mod_rel_hat / ell2;
  rep.bound = 2.0 * solve_c().c;

  const std::uint64_t boot = rng::stream_key(positions.seed ^ rng::mix(momenta.seed), 0xB007);
  std::vector<double> br(options.resamples), bn(options.resamples), lhs(options.resamples);
  kernels::bootstrap_variances(rel, rng::stream_key(boot, 1), br);
  kernels::bootstrap_variances(tot, rng::stream_key(boot, 2), bn);
  for (std::size_t r = 0; r < lhs.size(); ++r) {
    rep.clamped = rep.clamped || br[r] < 0.0 || bn[r] < 0.0;
    lhs[r] = std::max(bn[r], 0.0) + std::max(br[r], 0.0) / ell2;
  }
  const double tail = 0.5 * (1.0 - options.confidence);
  rep.ci_low = percentile(lhs, tail);
  rep.ci_high = percentile(lhs, 1.0 - tail);
  rep.ci_halfwidth = std::max(0.0, 0.5 * (rep.ci_high - rep.ci_low));
  if (rep.ci_high < rep.bound) rep.verdict = Verdict::violated;
  else if (rep.ci_low > rep.bound) rep.verdict = Verdict::not_violated;
  else rep.verdict = Verdict::inconclusive;
  return rep;
}

nlohmann::json to_json(const EstimateReport& r) {
  return {{"var_mod_rel_hat", r.var_mod_rel_hat},
          {"var_N_tot_hat", r.var_N_tot_hat},
          {"lhs_hat", r.lhs_hat},
          {"ci_low", r.ci_low},
          {"ci_high", r.ci_high},
          {"ci_halfwidth", r.ci_halfwidth},
          {"bound", r.bound},
          {"n", r.n},
          {"verdict", to_string(r.verdict)},
          {"clamped", r.clamped}};
}

void write_csv(std::ostream& out, const SampleSet& samples) {
  out << "index,v1,v2\n";
  char buf[96];
  for (std::size_t i = 0; i < samples.records.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", i, samples.records[i][0],
                  samples.records[i][1]);
    out << buf;
  }
}

nlohmann::json sidecar(const SampleSet& samples) {
  return {{"seed", samples.seed},
          {"kind", to_string(samples.kind)},
          {"n", samples.records.size()},
          {"state_hash", samples.state_hash}};
}

SampleSet read_samples(std::istream& csv, const nlohmann::json& meta) {
  SampleSet s;
  try {
    s.seed = meta.at("seed").get<std::uint64_t>();
    s.kind = measurement_kind_from_string(meta.at("kind").get<std::string>());
    s.state_hash = meta.value("state_hash", std::string{});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse, std::string("sample sidecar: ") + e.what());
  }
  std::string line;
  require(static_cast<bool>(std::getline(csv, line)) && line.rfind("index,v1,v2", 0) == 0,
          ErrorCode::parse, "expected CSV header 'index,v1,v2'");
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string a, b, c;
    require(std::getline(ss, a, ',') && std::getline(ss, b, ',') && std::getline(ss, c),
            ErrorCode::parse, "malformed sample row");
    try {
      s.records.push_back({std::stod(b), std::stod(c)});
    } catch (const std::exception&) {
      throw Error(ErrorCode::parse, "non-numeric sample row");
    }
  }
  if (meta.contains("n"))
    require(meta.at("n").get<std::size_t>() == s.records.size(), ErrorCode::parse,
            "sample count does not match the sidecar");
  return s;
}

}  // namespace modvar
