// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "modvar/criterion.hpp"
#include "modvar/dynamics.hpp"
#include "modvar/grid_ops.hpp"
#include "modvar/modular.hpp"
#include "modvar/rng.hpp"
#include "modvar/sampling.hpp"
#include "modvar/spectral.hpp"
#include "modvar/states.hpp"
#include "modvar/units.hpp"

using namespace modvar;

namespace {

constexpr double kTwoPi = 2.0 * kPi;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

// ---------------------------------------------------------------- oracles

// |sum_k exp(2 pi i k u)|^2 / N, written out directly.
double fringe_oracle(int n, double u) {
  std::complex<double> s = 0.0;
  for (int k = 0; k < n; ++k) s += std::polar(1.0, kTwoPi * k * u);
  return std::norm(s) / n;
}

// Composite Simpson on [a, b] with an even number of panels.
double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Var(x_bar_1 - x_bar_2) when (x_bar_1, x_bar_2) has density F_N(a - b) on
// the unit torus: integral of u^2 (1 - |u|) F_N(u) over (-1, 1).
double mpe_lhs_oracle(int n) {
  const auto f = [n](double u) { return u * u * (1.0 - std::abs(u)) * fringe_oracle(n, u); };
  return simpson(f, -1.0, 0.0, 4000) + simpson(f, 0.0, 1.0, 4000);
}

// S2 recovered from the oracle variance: lhs = (1 - S2) / 6.
double s2_oracle(int n) { return 1.0 - 6.0 * mpe_lhs_oracle(n); }

double rand_in(std::uint64_t key, std::uint64_t& counter, double lo, double hi) {
  return lo + (hi - lo) * rng::uniform(key, counter++);
}

WavePacket random_packet(std::uint64_t key, std::uint64_t& counter) {
  const double sigma = std::exp(rand_in(key, counter, std::log(0.05), std::log(3.0)));
  const double x0 = rand_in(key, counter, -2.0, 2.0);
  const double p0 = rand_in(key, counter, -2.0 * kTwoPi, 2.0 * kTwoPi);
  return WavePacket{Envelope::gaussian(sigma), x0, p0, 0.0};
}

std::vector<SuperposedState::Term> random_terms(std::uint64_t key, std::uint64_t& counter) {
  const int count = 1 + static_cast<int>(rng::below(key, counter++, 3));
  std::vector<SuperposedState::Term> terms;
  for (int i = 0; i < count; ++i) {
    const cplx amp = std::polar(rand_in(key, counter, 0.2, 1.0), rand_in(key, counter, 0.0, kTwoPi));
    terms.push_back({amp, random_packet(key, counter)});
  }
  return terms;
}

TwoParticleState random_product(std::uint64_t key, std::uint64_t& counter) {
  const auto a = random_terms(key, counter);
  const auto b = random_terms(key, counter);
  TwoParticleState s;
  for (const auto& ta : a)
    for (const auto& tb : b) s.terms.push_back({ta.amplitude * tb.amplitude, ta.packet, tb.packet});
  return normalized(std::move(s));
}

std::vector<double> local_maxima(const std::vector<double>& x, const std::vector<double>& y,
                                 double lo, double hi, double floor) {
  std::vector<double> out;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    if (x[i] < lo || x[i] > hi || y[i] < floor) continue;
    if (y[i] > y[i - 1] && y[i] >= y[i + 1]) {
      const double d = y[i - 1] - 2.0 * y[i] + y[i + 1];
      const double shift = d != 0.0 ? 0.5 * (y[i - 1] - y[i + 1]) / d : 0.0;
      out.push_back(x[i] + shift * (x[i + 1] - x[i]));
    }
  }
  return out;
}

// -------------------------------------------------------------- criteria

Outcome table_one() {
  const int ns[] = {1, 2, 3, 4, 10, 100};
  const double s1[] = {0.00, 0.61, 0.71, 0.79, 0.92, 0.99};
  const double s2[] = {0.00, 0.30, 0.46, 0.55, 0.76, 0.96};
  bool ok = true;
  std::string detail;
  for (int i = 0; i < 6; ++i) {
    const double r1 = std::round(squeezing_s1(ns[i]) * 100.0) / 100.0;
    const double r2 = std::round(squeezing_s2(ns[i]) * 100.0) / 100.0;
    ok = ok && std::abs(r1 - s1[i]) < 1e-12 && std::abs(r2 - s2[i]) < 1e-12;
    detail += format("N=%d (%.2f, %.2f) ", ns[i], r1 + 0.0, r2 + 0.0);
  }
  return {ok, detail};
}

Outcome criterion_constant() {
  const double c = solve_c().c;
  const double pert = perturbative_c();
  const EigenSolveReport brute = brute_force_c(64, 256);
  const bool ok = std::abs(c - 0.078235) <= 1e-5 && pert == 7.0 / 90.0 &&
                  std::abs(brute.c - c) <= 2e-4;
  return {ok, format("kummer %.10f, perturbative %.10f (7/90 %s), brute M=64 %.10f (diff %.2e)", c,
                     pert, pert == 7.0 / 90.0 ? "exact" : "inexact", brute.c, brute.c - c)};
}

Outcome ordering_chain() {
  const double c = solve_c().c;
  return {7.0 / 90.0 < c && c < 1.0 / 12.0,
          format("7/90 = %.9f < c = %.9f < 1/12 = %.9f", 7.0 / 90.0, c, 1.0 / 12.0)};
}

Outcome mpe_sweep() {
  const double bound = 2.0 * solve_c().c;
  bool ok = true;
  double worst_margin = -1e300;
  for (int n = 2; n <= 50; ++n) {
    const double lhs = (1.0 - squeezing_s2(n)) / 6.0;
    ok = ok && lhs < bound;
    worst_margin = std::max(worst_margin, lhs - bound);
    if (n <= 10) ok = ok && std::abs(lhs - mpe_lhs_oracle(n)) < 1e-9;
  }
  std::string detail = format("closed form < 2c for N=2..50 (largest lhs - 2c %.4f); grid:", worst_margin);
  const ModularScale scale(1.0);
  for (int n = 2; n <= 4; ++n) {
    const CriterionReport r = evaluate_criterion(build_mpe(n, 0.0, 0, 1.0, Envelope::gaussian(2.0)), scale);
    const double rel = r.lhs / mpe_lhs_oracle(n) - 1.0;
    ok = ok && std::abs(rel) < 1e-4 && r.violated;
    detail += format(" N=%d rel %.1e", n, rel);
  }
  return {ok, detail};
}

Outcome separable_sanity() {
  const ModularScale scale(1.0);
  const std::uint64_t key = rng::stream_key(20240517, 5);
  std::uint64_t counter = 0;
  int violations = 0;
  double min_margin = 1e300;
  for (int i = 0; i < 200; ++i) {
    MixtureState state;
    if (i % 3 == 0) {
      // Single wide packets sit close to the bound.
      TwoParticleState s;
      WavePacket a = random_packet(key, counter), b = random_packet(key, counter);
      a.envelope = Envelope::gaussian(std::exp(rand_in(key, counter, std::log(0.3), std::log(3.0))));
      b.envelope = Envelope::gaussian(std::exp(rand_in(key, counter, std::log(0.3), std::log(3.0))));
      s.terms.push_back({1.0, a, b});
      state = as_mixture(std::move(s));
    } else if (i % 3 == 1) {
      state = as_mixture(random_product(key, counter));
    } else {
      const int parts = 2 + static_cast<int>(rng::below(key, counter++, 2));
      std::vector<MixtureState::Component> comps;
      double total = 0.0;
      for (int k = 0; k < parts; ++k) {
        const double w = rand_in(key, counter, 0.1, 1.0);
        total += w;
        comps.push_back({w, random_product(key, counter)});
      }
      for (auto& c : comps) c.weight /= total;
      state = mix(std::move(comps));
    }
    const CriterionReport r = evaluate_criterion(state, scale);
    violations += r.violated ? 1 : 0;
    min_margin = std::min(min_margin, r.lhs - r.bound);
  }
  return {violations == 0,
          format("%d violations in 200 states, smallest lhs - 2c = %.4f", violations, min_margin)};
}

Outcome robustness() {
  const double c = solve_c().c;
  const double s2 = s2_oracle(2);
  const double oracle = (12.0 * c - 1.0 + s2) / s2;
  const RobustnessReport r2 = robustness_threshold(2);
  bool ok = r2.closed_form >= 0.79 && r2.closed_form <= 0.80 && r2.bisection >= 0.79 &&
            r2.bisection <= 0.80 && std::abs(r2.closed_form - oracle) < 1e-9;

  // Visibility of (1 - eps) F_2 + eps read off the profile.
  double hi = -1e300, lo = 1e300;
  for (int i = 0; i <= 2000; ++i) {
    const double v = (1.0 - r2.closed_form) * fringe_oracle(2, i / 2000.0) + r2.closed_form;
    hi = std::max(hi, v);
    lo = std::min(lo, v);
  }
  const double vis = (hi - lo) / (hi + lo);
  ok = ok && std::abs(vis - 0.21) <= 0.01 && std::abs(r2.visibility - vis) < 1e-3;

  std::string chain;
  double prev_cf = r2.closed_form, prev_bi = r2.bisection;
  for (int n = 3; n <= 10; ++n) {
    const RobustnessReport r = robustness_threshold(n);
    ok = ok && r.closed_form > prev_cf && r.bisection > prev_bi;
    prev_cf = r.closed_form;
    prev_bi = r.bisection;
    chain += format(" %.4f", r.closed_form);
  }
  return {ok, format("eps*(2) closed %.5f (oracle %.5f) bisection %.5f, visibility %.4f; "
                     "eps*(3..10):%s",
                     r2.closed_form, oracle, r2.bisection, vis, chain.c_str())};
}

Outcome additive_floor() {
  const double c = solve_c().c;
  const ModularScale scale(1.0);
  const std::uint64_t key = rng::stream_key(777, 7);
  std::uint64_t counter = 0;
  double min_sum = 1e300;
  GridOptions opts;
  for (int i = 0; i < 100; ++i) {
    SuperposedState s;
    s.terms = random_terms(key, counter);
    s = normalized(std::move(s));
    const GridState g = discretize(s, make_grid(support_of(s), 1.0, opts));
    const double sum = observable_variance(g, Observable::n_p, scale) +
                       observable_variance(g, Observable::x_bar, scale);
    min_sum = std::min(min_sum, sum);
  }
  const EigenSolveReport brute = brute_force_c(64, 512);
  const GridState& ground = *brute.ground_state;
  const double sat = observable_variance(ground, Observable::n_p, scale) +
                     observable_variance(ground, Observable::x_bar, scale);
  const bool ok = min_sum >= c - 1e-4 && std::abs(sat - c) <= 1e-6;
  return {ok, format("min over 100 states %.6f (floor c - 1e-4 = %.6f); ground state %.10f "
                     "(c %.10f, diff %.1e)",
                     min_sum, c - 1e-4, sat, c, sat - c)};
}

Outcome commutator() {
  const ModularScale scale(1.0);
  bool ok = true;
  std::string detail;
  for (int n = 1; n <= 6; ++n) {
    const double oracle =
        1.0 / kTwoPi * (1.0 - (1.0 + (n % 2 == 1 ? 1.0 : -1.0)) / (2.0 * n));
    const SuperposedState s = build_smp(n, 0.0, 0, 1.0, Envelope::gaussian(2.0));
    const GridState g = discretize(s, GridSpec::commensurate(0.0, 1.0, 32, 512));
    const cplx v = commutator_expectation(g, CommutatorPair::x_bar_n_p, scale);
    const double err = std::abs(v) - oracle;
    ok = ok && std::abs(err) <= 1e-5 && std::abs(smp_commutator_expectation(n, scale) - oracle) < 1e-15;
    if (n == 1) ok = ok && std::abs(v) <= 1e-5;
    detail += format("N=%d %.6f (err %.1e) ", n, std::abs(v), err);
  }
  return {ok, detail};
}

Outcome far_field() {
  const double ell = 1.0, sigma = 0.1, mass = 1.0;
  const double t = 12.0;  // sigma(t) = 60 ell
  const double sigma_t = sigma * std::hypot(1.0, t / (2.0 * mass * sigma * sigma));
  bool ok = sigma_t > 50.0 * ell;
  std::string detail = format("sigma(t) = %.1f L;", sigma_t);
  for (int n = 2; n <= 3; ++n) {
    const SuperposedState s = build_multislit(n, ell, Envelope::gaussian(sigma));
    const Support sup = support_of(s);
    const double pmax = Envelope::gaussian(sigma).momentum_extent();
    const double span = sup.hi - sup.lo + 2.4 * pmax * t / mass;
    std::size_t points = 16;
    while (span / static_cast<double>(points) > 0.9 * kPi / (2.0 * pmax)) points <<= 1;
    const double mid = 0.5 * (sup.lo + sup.hi);
    const GridState g0 = discretize(s, GridSpec(points, mid - span / 2, mid + span / 2));
    const PropagationParams params{mass, t};
    const FarFieldProfile ff = far_field_profile(free_propagate(g0, params), params);

    std::vector<double> p, rho;
    const double window = 3.0 / sigma;
    for (int i = 0; i <= 60000; ++i) {
      p.push_back(-window + 2.0 * window * i / 60000.0);
      rho.push_back(momentum_density(s, p.back()));
    }
    const double peak = *std::max_element(rho.begin(), rho.end());
    const auto exact = local_maxima(p, rho, -window, window, 1e-3 * peak);
    const auto seen = local_maxima(ff.momentum, ff.density, -1.2 * window, 1.2 * window,
                                   1e-4 * peak);
    double worst = 0.0;
    for (double e : exact) {
      double best = 1e300;
      for (double q : seen) best = std::min(best, std::abs(q - e));
      worst = std::max(worst, best / (kTwoPi / ell));
    }
    ok = ok && !exact.empty() && worst <= 0.02;
    detail += format(" N=%d %zu maxima, worst offset %.2e of a fringe period;", n, exact.size(), worst);
  }
  return {ok, detail};
}

// Plug-in lhs from raw records, computed independently of the estimator.
double plug_in_lhs(const SampleSet& pos, const SampleSet& mom) {
  double a = 0.0, a2 = 0.0, b = 0.0, b2 = 0.0;
  for (const auto& r : pos.records) {
    const double v = modular_decompose(r[0], 1.0).modular_part - modular_decompose(r[1], 1.0).modular_part;
    a += v;
    a2 += v * v;
  }
  for (const auto& r : mom.records) {
    const double v = static_cast<double>(modular_decompose(r[0], kTwoPi).integer_part +
                                         modular_decompose(r[1], kTwoPi).integer_part);
    b += v;
    b2 += v * v;
  }
  const double n1 = static_cast<double>(pos.records.size());
  const double n2 = static_cast<double>(mom.records.size());
  return (a2 / n1 - a * a / n1 / n1) + (b2 / n2 - b * b / n2 / n2);
}

Outcome sampling_pipeline() {
  const double target = mpe_lhs_oracle(2);
  const MixtureState state = as_mixture(build_mpe(2, 0.0, 0, 1.0, Envelope::gaussian(2.0)));
  const Sampler pos_sampler(state, MeasurementKind::position);
  const Sampler mom_sampler(state, MeasurementKind::momentum);
  const ModularScale scale(1.0);

  int covered = 0, violated = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const std::uint64_t seed = rng::stream_key(1000, rep);
    const SampleSet pos = pos_sampler.sample(100000, seed);
    const SampleSet mom = mom_sampler.sample(100000, rng::mix(seed));
    const EstimateReport r = estimate_criterion(pos, mom, scale);
    covered += (r.ci_low <= target && target <= r.ci_high) ? 1 : 0;
    violated += r.verdict == Verdict::violated ? 1 : 0;
  }

  const std::size_t sizes[] = {1000, 10000, 100000, 1000000};
  const int reps = 40;
  std::vector<double> lx, ly;
  std::string errs;
  for (std::size_t n : sizes) {
    double mean_abs = 0.0;
    for (int rep = 0; rep < reps; ++rep) {
      const std::uint64_t seed = rng::stream_key(5000 + n, rep);
      mean_abs += std::abs(plug_in_lhs(pos_sampler.sample(n, seed), mom_sampler.sample(n, rng::mix(seed))) -
                           target);
    }
    mean_abs /= reps;
    lx.push_back(std::log10(static_cast<double>(n)));
    ly.push_back(std::log10(mean_abs));
    errs += format(" %.2e", mean_abs);
  }
  const double mx = (lx[0] + lx[1] + lx[2] + lx[3]) / 4.0, my = (ly[0] + ly[1] + ly[2] + ly[3]) / 4.0;
  double sxy = 0.0, sxx = 0.0;
  for (int i = 0; i < 4; ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  const double slope = sxy / sxx;
  const bool ok = violated == 200 && covered >= 186 && std::abs(slope + 0.5) <= 0.1;
  return {ok, format("violated %d/200, CI covers %.6f in %d/200 (%.1f%%); mean |error| at "
                     "n=1e3..1e6:%s, slope %.3f",
                     violated, target, covered, covered / 2.0, errs.c_str(), slope)};
}

Outcome dispersion_study() {
  ProtocolSpec spec;
  spec.n = 2;
  spec.lambda = 1.0;
  spec.envelope = Envelope::gaussian(3.0);
  std::vector<double> staggers;
  for (int i = 0; i <= 10; ++i) staggers.push_back(5.0 * i);
  const auto sweep = stagger_sweep(spec, 10.0, staggers);
  bool ok = std::abs(sweep.front().visibility - 1.0) <= 1e-9;
  for (std::size_t i = 1; i < sweep.size(); ++i) ok = ok && sweep[i].visibility < sweep[i - 1].visibility;

  // Lithium-7, lambda = 100 um, sigma = 10 um, emissions 25 ms apart, 50 ms flight.
  const SiScale si{1e-6, si::lithium7_mass};
  ProtocolSpec li;
  li.n = 2;
  li.lambda = si.length(100e-6);
  li.envelope = Envelope::gaussian(si.length(10e-6));
  li.emission_times = {0.0, si.time(25e-3)};
  const double v_li = protocol_visibility(li, si.time(25e-3) + si.time(50e-3));
  ok = ok && v_li >= 0.85;
  return {ok, format("V(0) = %.12f, strictly decreasing over %zu staggers to %.4f; lithium set "
                     "V = %.6f",
                     sweep.front().visibility, sweep.size(), sweep.back().visibility, v_li)};
}

}  // namespace

// Usage: acceptance [criterion numbers...]; all criteria by default.
int main(int argc, char** argv) {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
    double time_limit;  // seconds, 0 for none
  };
  const std::vector<Criterion> criteria = {
      {"Table I reproduction", table_one, 1.0},
      {"criterion constant", criterion_constant, 30.0},
      {"ordering chain", ordering_chain, 0.0},
      {"MPE violation sweep", mpe_sweep, 120.0},
      {"separable sanity", separable_sanity, 0.0},
      {"robustness threshold", robustness, 0.0},
      {"additive-UR floor", additive_floor, 0.0},
      {"commutator closed form", commutator, 0.0},
      {"far-field equivalence", far_field, 0.0},
      {"sampling pipeline", sampling_pipeline, 600.0},
      {"dispersion study", dispersion_study, 0.0},
  };
  int failures = 0;
  std::set<std::size_t> only;
  for (int a = 1; a < argc; ++a) only.insert(std::strtoul(argv[a], nullptr, 10));
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!only.empty() && !only.count(i + 1)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (criteria[i].time_limit > 0.0 && secs >= criteria[i].time_limit) {
      o.pass = false;
      o.detail += format(" [over the %.0f s limit]", criteria[i].time_limit);
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s [%zu] %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
