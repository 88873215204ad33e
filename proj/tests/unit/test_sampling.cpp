#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <sstream>

#include "modvar/error.hpp"
#include "modvar/sampling.hpp"

using namespace modvar;

namespace {

const Envelope kEnv = Envelope::gaussian(2.0);

double normal_pdf(double x, double s) { return std::exp(-0.5 * x * x / (s * s)) / (s * std::sqrt(2.0 * kPi)); }

// Density of u = x1 - x2 for the N=2 entangled state: N(0, 2 sigma^2) times
// 1 + cos(2 pi u), by Simpson integration per bin.
double bin_probability(double a, double b) {
  const double s = std::sqrt(2.0) * 2.0;
  const int panels = 64;
  const double h = (b - a) / panels;
  auto f = [s](double u) { return normal_pdf(u, s) * (1.0 + std::cos(2.0 * kPi * u)); };
  double sum = f(a) + f(b);
  for (int i = 1; i < panels; ++i) sum += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

}  // namespace

TEST_CASE("same seed gives identical records") {
  const MixtureState state = as_mixture(build_mpe(2, 0.0, 0, 1.0, kEnv));
  const SampleSet a = sample_measurements(state, MeasurementKind::position, 5000, 42);
  const SampleSet b = sample_measurements(state, MeasurementKind::position, 5000, 42);
  const SampleSet c = sample_measurements(state, MeasurementKind::position, 5000, 43);
  CHECK(a.records == b.records);
  CHECK(a.records != c.records);
  CHECK(a.seed == 42);
  CHECK(a.kind == MeasurementKind::position);
}

TEST_CASE("relative-coordinate histogram matches the fringe density") {
  const Sampler sampler(as_mixture(build_mpe(2, 0.0, 0, 1.0, kEnv)), MeasurementKind::position);
  const std::size_t n = 1000000;
  const SampleSet s = sampler.sample(n, 2024);

  const double lo = -12.0, width = 0.125;
  const int bins = 192;
  std::vector<double> observed(bins, 0.0);
  for (const auto& r : s.records) {
    const int k = static_cast<int>(std::floor((r[0] - r[1] - lo) / width));
    if (k >= 0 && k < bins) observed[k] += 1.0;
  }
  double chi2 = 0.0;
  int dof = -1;
  double pooled_obs = 0.0, pooled_exp = 0.0;
  for (int k = 0; k < bins; ++k) {
    pooled_obs += observed[k];
    pooled_exp += n * bin_probability(lo + k * width, lo + (k + 1) * width);
    if (pooled_exp >= 20.0) {
      chi2 += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
      ++dof;
      pooled_obs = pooled_exp = 0.0;
    }
  }
  REQUIRE(dof > 50);
  const double p = 1.0 - boost::math::cdf(boost::math::chi_squared(dof), chi2);
  CHECK(p > 0.01);
}

TEST_CASE("momentum records have zero total integer momentum") {
  const Sampler sampler(as_mixture(build_mpe(2, 0.0, 0, 1.0, kEnv)), MeasurementKind::momentum);
  const SampleSet s = sampler.sample(20000, 5);
  int nonzero = 0, upper = 0;
  for (const auto& r : s.records) {
    const auto n1 = modular_decompose(r[0], 2.0 * kPi).integer_part;
    const auto n2 = modular_decompose(r[1], 2.0 * kPi).integer_part;
    nonzero += (n1 + n2 != 0) ? 1 : 0;
    upper += n1 == 1 ? 1 : 0;
  }
  CHECK(nonzero == 0);
  CHECK(upper == doctest::Approx(10000).epsilon(0.03));
}

TEST_CASE("mixture components are chosen by weight") {
  const MixtureState c = build_classical_correlated(2, 0.0, 0, 1.0, kEnv);
  const MixtureState skew = mix({{0.2, c.components[0].state}, {0.8, c.components[1].state}});
  const SampleSet s = sample_measurements(skew, MeasurementKind::momentum, 40000, 9);
  int second = 0;
  for (const auto& r : s.records) second += r[0] > kPi ? 1 : 0;
  // Binomial sd is 80.
  CHECK(std::abs(second - 32000) < 400);
}

TEST_CASE("estimates for entangled and classical states") {
  const ModularScale scale(1.0);
  const MixtureState mpe = as_mixture(build_mpe(2, 0.0, 0, 1.0, kEnv));
  const EstimateReport r = estimate_criterion(sample_measurements(mpe, MeasurementKind::position, 100000, 7),
                                              sample_measurements(mpe, MeasurementKind::momentum, 100000, 8),
                                              scale);
  CHECK(r.verdict == Verdict::violated);
  CHECK(std::abs(r.lhs_hat - 0.116007) <= 3.0 * r.ci_halfwidth);
  CHECK(r.ci_low <= r.lhs_hat);
  CHECK(r.lhs_hat <= r.ci_high);
  CHECK_FALSE(r.clamped);

  const MixtureState cl = build_classical_correlated(2, 0.0, 0, 1.0, kEnv);
  const EstimateReport q = estimate_criterion(sample_measurements(cl, MeasurementKind::position, 100000, 7),
                                              sample_measurements(cl, MeasurementKind::momentum, 100000, 8),
                                              scale);
  CHECK(q.verdict == Verdict::not_violated);
  CHECK(q.lhs_hat == doctest::Approx(1.0 / 6.0).epsilon(0.02));
  CHECK(to_json(q).at("verdict").get<std::string>() == "not_violated");
}

TEST_CASE("estimator input checks") {
  const ModularScale scale(1.0);
  const MixtureState mpe = as_mixture(build_mpe(2, 0.0, 0, 1.0, kEnv));
  const SampleSet pos = sample_measurements(mpe, MeasurementKind::position, 50, 1);
  const SampleSet mom = sample_measurements(mpe, MeasurementKind::momentum, 500, 1);
  CHECK_THROWS_AS(estimate_criterion(pos, mom, scale), Error);
  CHECK_THROWS_AS(estimate_criterion(mom, mom, scale), Error);
}

TEST_CASE("CSV and sidecar round trip") {
  const MixtureState mpe = as_mixture(build_mpe(2, 0.0, 0, 1.0, kEnv));
  SampleSet s = sample_measurements(mpe, MeasurementKind::momentum, 300, 77);
  s.state_hash = "00000000deadbeef";
  std::stringstream csv;
  write_csv(csv, s);
  const auto meta = sidecar(s);
  const SampleSet back = read_samples(csv, meta);
  CHECK(back.records == s.records);
  CHECK(back.seed == 77);
  CHECK(back.kind == MeasurementKind::momentum);
  CHECK(back.state_hash == s.state_hash);

  std::stringstream bad("index,v1,v2\n0,1.0\n");
  CHECK_THROWS_AS(read_samples(bad, meta), Error);
  std::stringstream short_csv("index,v1,v2\n0,1.0,2.0\n");
  CHECK_THROWS_AS(read_samples(short_csv, meta), Error);
}
