// Command-line front end: closed forms, the criterion constant, criterion
// evaluation, robustness, Monte Carlo sampling, propagation and the
// emission-stagger visibility study.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "json.hpp"
#include "modvar/criterion.hpp"
#include "modvar/dynamics.hpp"
#include "modvar/error.hpp"
#include "modvar/grid_ops.hpp"
#include "modvar/modular.hpp"
#include "modvar/rng.hpp"
#include "modvar/sampling.hpp"
#include "modvar/spectral.hpp"
#include "modvar/state_io.hpp"
#include "modvar/states.hpp"
#include "modvar/units.hpp"

using nlohmann::json;
using namespace modvar;

namespace {

// ---------------------------------------------------------------- quantities

enum class Dim { length, time, mass };

struct Quantity {
  double value;
  bool si;
};

Quantity parse_quantity(const std::string& text, Dim dim, const char* name) {
  static const std::map<std::string, double> lengths = {
      {"m", 1.0}, {"mm", 1e-3}, {"um", 1e-6}, {"nm", 1e-9}};
  static const std::map<std::string, double> times = {
      {"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}};
  static const std::map<std::string, double> masses = {{"kg", 1.0}, {"u", si::atomic_mass}};
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw Error(ErrorCode::parse, std::string(name) + ": not a number: '" + text + "'");
  }
  const std::string suffix = text.substr(used);
  if (suffix.empty()) return {v, false};
  const auto& table = dim == Dim::length ? lengths : dim == Dim::time ? times : masses;
  const auto it = table.find(suffix);
  require(it != table.end(), ErrorCode::parse,
          std::string(name) + ": unknown unit '" + suffix + "'");
  return {v * it->second, true};
}

/// Resolves SI-suffixed inputs against a length unit and the particle mass.
class Units {
 public:
  Units(const std::string& mass, const std::string& length_unit) {
    const Quantity m = parse_quantity(mass, Dim::mass, "--mass");
    si_ = m.si;
    if (si_) {
      const Quantity l = parse_quantity(length_unit, Dim::length, "--unit-length");
      require(l.si && l.value > 0.0, ErrorCode::parse, "--unit-length needs a length unit");
      scale_ = SiScale{l.value, m.value};
      mass_ = 1.0;
    } else {
      mass_ = m.value;
    }
  }

  double mass() const { return mass_; }

  double get(const std::string& text, Dim dim, const char* name) const {
    const Quantity q = parse_quantity(text, dim, name);
    if (!q.si) return q.value;
    require(si_, ErrorCode::parse,
            std::string(name) + ": SI units need --mass with a unit (kg or u)");
    return dim == Dim::length ? scale_.length(q.value) : scale_.time(q.value);
  }

  json describe() const {
    if (!si_) return {{"system", "canonical"}, {"hbar", 1.0}};
    return {{"system", "canonical"},
            {"hbar", 1.0},
            {"length_unit_m", scale_.length_m},
            {"mass_unit_kg", scale_.mass_kg},
            {"time_unit_s", scale_.time_unit_s()}};
  }

 private:
  bool si_ = false;
  double mass_ = 1.0;
  SiScale scale_;
};

// ------------------------------------------------------------------- options

struct Common {
  std::string config;
  std::string output;
  std::string format;
  std::uint64_t seed = 1;
  std::optional<std::size_t> grid_points;
  std::optional<std::size_t> periods;
  std::string mass = "1";
  std::string unit_length = "1um";
};

struct StateOpts {
  std::string file;
  std::string kind;
  int n = 2;
  std::string x0 = "0";
  int n0 = 0;
  std::optional<std::string> scale;
  std::optional<std::string> sigma;
  std::optional<std::string> sinc_d;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "key=value configuration file (flags override it)");
  app->add_option("--output,-o", c.output, "Output file (default: stdout)");
  app->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--seed", c.seed, "Random seed");
  app->add_option("--grid-points", c.grid_points, "Grid points per modular period");
  app->add_option("--periods", c.periods, "Grid box length in modular periods");
  app->add_option("--mass", c.mass, "Particle mass (canonical, or with unit kg/u)");
  app->add_option("--unit-length", c.unit_length, "Length unit for SI inputs");
}

void add_state(CLI::App* app, StateOpts& s, const std::string& default_kind) {
  s.kind = default_kind;
  app->add_option("--state", s.file, "State descriptor JSON file");
  app->add_option("--kind", s.kind, "State kind")
      ->check(CLI::IsMember({"multislit", "smp", "mpe", "classical"}));
  app->add_option("--N", s.n, "Number of superposed packets")->check(CLI::PositiveNumber);
  app->add_option("--x0", s.x0, "Packet centre offset");
  app->add_option("--N0", s.n0, "Base momentum index");
  app->add_option("--scale,--lambda,--L", s.scale, "Modular scale lambda (or slit spacing L)");
  app->add_option("--sigma", s.sigma, "Gaussian envelope width");
  app->add_option("--sinc-d", s.sinc_d, "Use a sinc envelope of width d");
}

StateDescriptor make_descriptor(const StateOpts& s, const Units& units) {
  if (!s.file.empty()) {
    std::ifstream in(s.file);
    require(in.good(), ErrorCode::io, "cannot open state file '" + s.file + "'");
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw Error(ErrorCode::parse, std::string("state file: ") + e.what());
    }
    return descriptor_from_json(j);
  }
  StateDescriptor d;
  if (s.kind == "multislit") d.kind = StateKind::multislit;
  else if (s.kind == "smp") d.kind = StateKind::smp;
  else if (s.kind == "classical") d.kind = StateKind::classical;
  else d.kind = StateKind::mpe;
  d.n = s.n;
  d.x0 = units.get(s.x0, Dim::length, "--x0");
  d.base_index = s.n0;
  d.scale = s.scale ? units.get(*s.scale, Dim::length, "--scale") : 1.0;
  require(d.scale > 0.0, ErrorCode::invalid_argument, "--scale must be positive");
  if (s.sinc_d) {
    d.envelope = Envelope::sinc(units.get(*s.sinc_d, Dim::length, "--sinc-d"));
  } else {
    const double fallback = d.kind == StateKind::multislit ? 0.1 * d.scale : 2.0 * d.scale;
    d.envelope = Envelope::gaussian(s.sigma ? units.get(*s.sigma, Dim::length, "--sigma") : fallback);
  }
  return d;
}

GridOptions grid_options(const Common& c) {
  GridOptions g;
  if (c.grid_points) g.points_per_period = *c.grid_points;
  if (c.periods) g.periods = *c.periods;
  return g;
}

/// Applies key=value items to options not given on the command line.
void apply_config(CLI::App* app, const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::io, "cannot open config file '" + path + "'");
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_config(in);
  } catch (const CLI::ParseError& e) {
    throw Error(ErrorCode::parse, "config: " + std::string(e.what()));
  }
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;  // section markers
    require(item.parents.empty(), ErrorCode::parse, "config: sections are not supported");
    require(item.name != "config", ErrorCode::parse, "config: nested config files");
    CLI::Option* opt = nullptr;
    try {
      opt = app->get_option("--" + item.name);
    } catch (const CLI::OptionNotFound&) {
      throw Error(ErrorCode::parse, "config: unknown key '" + item.name + "'");
    }
    if (opt->count() > 0) continue;
    try {
      for (const auto& v : item.inputs) opt->add_result(v);
      opt->run_callback();
    } catch (const CLI::ParseError& e) {
      throw Error(ErrorCode::parse, "config: " + item.name + ": " + e.what());
    }
  }
}

// -------------------------------------------------------------------- output

std::string fmt(double v, const char* spec = "%.10g") {
  if (v == 0.0) v = 0.0;  // no "-0"
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

void emit(const Common& c, const std::string& text) {
  if (c.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(c.output);
  require(out.good(), ErrorCode::io, "cannot write '" + c.output + "'");
  out << text;
}

void emit_json(const Common& c, const json& j) { emit(c, j.dump(2) + "\n"); }

std::string require_format(const Common& c, const std::string& fallback,
                           std::initializer_list<const char*> allowed) {
  const std::string f = c.format.empty() ? fallback : c.format;
  for (const char* a : allowed)
    if (f == a) return f;
  throw Error(ErrorCode::invalid_argument, "format '" + f + "' is not available here");
}

// ------------------------------------------------------------------ commands

void cmd_table1(const Common& c) {
  const std::string f = require_format(c, "csv", {"csv", "json"});
  const int rows[] = {1, 2, 3, 4, 10, 100};
  if (f == "csv") {
    std::string out = "N,S1,S2\n";
    for (int n : rows)
      out += std::to_string(n) + "," + fmt(squeezing_s1(n), "%.2f") + "," +
             fmt(squeezing_s2(n), "%.2f") + "\n";
    emit(c, out);
    return;
  }
  json arr = json::array();
  for (int n : rows)
    arr.push_back({{"N", n},
                   {"S1", std::round(squeezing_s1(n) * 100.0) / 100.0 + 0.0},
                   {"S2", std::round(squeezing_s2(n) * 100.0) / 100.0 + 0.0},
                   {"S1_exact", squeezing_s1(n)},
                   {"S2_exact", squeezing_s2(n)}});
  emit_json(c, {{"rows", arr}});
}

json eigen_json(const EigenSolveReport& r) {
  return {{"c", r.c},
          {"method", to_string(r.method)},
          {"residual", r.residual},
          {"mu_spectrum_head", r.mu_spectrum_head}};
}

void cmd_constant(const Common& c, const std::string& method) {
  require_format(c, "json", {"json"});
  json out = {{"quoted", kQuotedC}};
  if (method == "kummer" || method == "all") out["kummer"] = eigen_json(solve_c());
  if (method == "perturbative" || method == "all")
    out["perturbative"] = {{"c", perturbative_c()}, {"method", "perturbative"}};
  if (method == "brute" || method == "all") {
    const int m = static_cast<int>(c.periods.value_or(64));
    const int ppp = static_cast<int>(c.grid_points.value_or(256));
    json b = eigen_json(brute_force_c(m, ppp));
    b["periods"] = m;
    b["points_per_period"] = ppp;
    b["difference_from_kummer"] = b["c"].get<double>() - solve_c().c;
    out["brute"] = b;
  }
  emit_json(c, out);
}

void cmd_fringes(const Common& c, const StateOpts& so, std::string space, int points,
                 std::optional<double> lo, std::optional<double> hi) {
  require_format(c, "csv", {"csv"});
  require(points >= 2, ErrorCode::invalid_argument, "--points must be at least 2");
  const Units units(c.mass, c.unit_length);
  const StateDescriptor d = make_descriptor(so, units);
  const bool pair = is_two_particle(d.kind);
  if (space.empty()) space = pair ? "relative" : "position";

  std::function<double(double)> density;
  std::string header;
  double a = 0.0, b = 0.0;
  const double w = d.envelope.width();
  if (pair) {
    require(space == "relative", ErrorCode::invalid_argument,
            "two-particle states support --space relative only");
    const MixtureState m = build_ensemble(d);
    const double x0 = d.x0;
    // Cut through the joint density along x1 - x2 = r about the packet centres.
    density = [m, x0](double r) { return joint_position_density(m, x0 + r / 2, -x0 - r / 2); };
    header = "x_rel [length],joint_density [1/length^2]";
    a = -4.0 * w;
    b = 4.0 * w;
  } else {
    const SuperposedState s = build_single(d);
    const Support sup = support_of(s);
    if (space == "position") {
      density = [s](double x) { return position_density(s, x); };
      header = "x [length],density [1/length]";
      a = sup.lo - 4.0 * w;
      b = sup.hi + 4.0 * w;
    } else if (space == "momentum") {
      density = [s](double p) { return momentum_density(s, p); };
      header = "p [hbar/length],density [length/hbar]";
      double pmax = 0.0;
      for (const auto& t : s.terms)
        pmax = std::max(pmax, std::abs(t.packet.p0) + t.packet.envelope.momentum_extent());
      a = -pmax;
      b = pmax;
    } else {
      throw Error(ErrorCode::invalid_argument, "unknown --space '" + space + "'");
    }
  }
  if (lo) a = *lo;
  if (hi) b = *hi;
  require(b > a, ErrorCode::invalid_argument, "empty profile range");
  std::string out = header + "\n";
  for (int i = 0; i < points; ++i) {
    const double v = a + (b - a) * i / (points - 1);
    out += fmt(v) + "," + fmt(density(v), "%.10e") + "\n";
  }
  emit(c, out);
}

void cmd_criterion(const Common& c, const StateOpts& so, const std::string& axis_name,
                   double epsilon) {
  require_format(c, "json", {"json"});
  const Units units(c.mass, c.unit_length);
  const StateDescriptor d = make_descriptor(so, units);
  require(is_two_particle(d.kind), ErrorCode::invalid_argument,
          "the criterion needs a two-particle state (mpe or classical)");
  require(epsilon >= 0.0 && epsilon <= 1.0, ErrorCode::invalid_argument,
          "--epsilon must lie in [0, 1]");
  const CriterionAxis axis =
      axis_name == "position" ? CriterionAxis::position_integer : CriterionAxis::momentum_integer;
  const ModularScale scale(d.scale);
  CriterionReport r;
  if (epsilon > 0.0 && d.kind == StateKind::mpe) {
    const MixtureState classical = build_classical_correlated(d.n, d.x0, d.base_index, d.scale,
                                                              d.envelope, d.phase_ref);
    r = evaluate_criterion(admix(build_pair(d), classical, epsilon), scale, axis, grid_options(c));
  } else {
    r = evaluate_criterion(build_ensemble(d), scale, axis, grid_options(c));
  }
  json out = to_json(r);
  out["state"] = to_json(d);
  out["epsilon"] = epsilon;
  out["units"] = units.describe();
  emit_json(c, out);
}

void cmd_robustness(const Common& c, int n, std::optional<int> upto) {
  const std::string format = require_format(c, "json", {"json", "csv"});
  RobustnessOptions opts;
  opts.grid = grid_options(c);
  const int last = upto.value_or(n);
  require(last >= n, ErrorCode::invalid_argument, "--upto must be at least --N");
  std::vector<RobustnessReport> rows;
  for (int k = n; k <= last; ++k) rows.push_back(robustness_threshold(k, opts));
  if (format == "csv") {
    std::string text = "N,epsilon_closed_form,epsilon_bisection,visibility\n";
    for (const auto& r : rows)
      text += std::to_string(r.n) + "," + fmt(r.closed_form) + "," + fmt(r.bisection) + "," +
              fmt(r.visibility) + "\n";
    emit(c, text);
  } else if (!upto) {
    emit_json(c, to_json(rows.front()));
  } else {
    json arr = json::array();
    for (const auto& r : rows) arr.push_back(to_json(r));
    emit_json(c, {{"results", arr}});
  }
}

void cmd_sample(const Common& c, const StateOpts& so, std::size_t count, double epsilon,
                const std::string& save_prefix) {
  require_format(c, "json", {"json"});
  const Units units(c.mass, c.unit_length);
  const StateDescriptor d = make_descriptor(so, units);
  require(is_two_particle(d.kind), ErrorCode::invalid_argument,
          "sampling needs a two-particle state (mpe or classical)");
  MixtureState state = build_ensemble(d);
  if (epsilon > 0.0 && d.kind == StateKind::mpe)
    state = admix(build_pair(d), build_classical_correlated(d.n, d.x0, d.base_index, d.scale,
                                                            d.envelope, d.phase_ref),
                  epsilon);
  SampleSet pos = Sampler(state, MeasurementKind::position).sample(count, c.seed);
  SampleSet mom = Sampler(state, MeasurementKind::momentum).sample(count, rng::mix(c.seed + 1));
  pos.state_hash = mom.state_hash = descriptor_hash(d);
  if (!save_prefix.empty()) {
    for (const SampleSet* s : {&pos, &mom}) {
      const std::string base = save_prefix + "_" + to_string(s->kind);
      std::ofstream csv(base + ".csv"), meta(base + ".json");
      require(csv.good() && meta.good(), ErrorCode::io, "cannot write samples to " + base);
      write_csv(csv, *s);
      meta << sidecar(*s).dump(2) << "\n";
    }
  }
  const EstimateReport r = estimate_criterion(pos, mom, ModularScale(d.scale));
  json out = to_json(r);
  out["seed"] = c.seed;
  out["state"] = to_json(d);
  out["state_hash"] = pos.state_hash;
  emit_json(c, out);
}

void cmd_propagate(const Common& c, const StateOpts& so, const std::string& time_text,
                   bool far_field) {
  const std::string f = require_format(c, "json", {"json", "csv"});
  const Units units(c.mass, c.unit_length);
  const StateDescriptor d = make_descriptor(so, units);
  require(!is_two_particle(d.kind), ErrorCode::invalid_argument,
          "propagate works on single-particle states (multislit or smp)");
  const double t = units.get(time_text, Dim::time, "--time");
  const PropagationParams params{units.mass(), t};
  const SuperposedState s = build_single(d);

  // Box wide enough for the spread packet, fine enough for its momenta.
  const Support sup = support_of(s);
  double pmax = 0.0;
  for (const auto& term : s.terms)
    pmax = std::max(pmax, std::abs(term.packet.p0) + term.packet.envelope.momentum_extent());
  const double spread = sup.width + pmax * t / params.mass;
  const double span = sup.hi - sup.lo + 16.0 * spread;
  const double dx_max = 0.9 * kPi / (2.0 * pmax);
  std::size_t points = 16;
  while (span / static_cast<double>(points) > dx_max) points <<= 1;
  if (c.grid_points) points = std::max(points, *c.grid_points);
  require(points <= (std::size_t{1} << 24), ErrorCode::grid_too_small,
          "propagation grid would exceed 2^24 points");
  const double mid = 0.5 * (sup.lo + sup.hi);
  const GridSpec grid(points, mid - span / 2, mid + span / 2);
  const GridState start = discretize(s, grid);
  const GridState end = free_propagate(start, params);

  auto moments = [](const GridState& g) {
    double m0 = 0.0, m1 = 0.0, m2 = 0.0;
    const auto rho = g.density();
    for (std::size_t i = 0; i < rho.size(); ++i) {
      const double x = g.spec().node(i);
      m0 += rho[i];
      m1 += rho[i] * x;
      m2 += rho[i] * x * x;
    }
    return std::array<double, 3>{m0 * g.spec().dx(), m1 / m0, std::sqrt(m2 / m0 - m1 * m1 / m0 / m0)};
  };
  if (f == "csv") {
    std::string out = far_field ? "x [length],density [1/length],p_far [hbar/length],density_p [length/hbar]\n"
                                : "x [length],density [1/length]\n";
    const auto rho = end.density();
    std::optional<FarFieldProfile> ff;
    if (far_field) ff = far_field_profile(end, params);
    for (std::size_t i = 0; i < rho.size(); ++i) {
      out += fmt(grid.node(i)) + "," + fmt(rho[i], "%.10e");
      if (ff) out += "," + fmt(ff->momentum[i]) + "," + fmt(ff->density[i], "%.10e");
      out += "\n";
    }
    emit(c, out);
    return;
  }
  const auto m_start = moments(start);
  const auto m_end = moments(end);
  emit_json(c, {{"time", t},
                {"mass", params.mass},
                {"grid_points", points},
                {"norm", m_end[0]},
                {"norm_drift", m_end[0] - m_start[0]},
                {"mean_x", m_end[1]},
                {"width_initial", m_start[2]},
                {"width_final", m_end[2]},
                {"state", to_json(d)},
                {"units", units.describe()}});
}

std::vector<double> parse_list(const std::string& text, const Units& units, Dim dim,
                               const char* name) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(units.get(item, dim, name));
  return out;
}

void cmd_protocol(const Common& c, const std::string& spec_file, int n, const std::string& lambda,
                  const std::string& sigma, const std::string& times, const std::string& flight,
                  const std::string& sweep, int sweep_points) {
  const Units units(c.mass, c.unit_length);
  ProtocolSpec spec;
  if (!spec_file.empty()) {
    std::ifstream in(spec_file);
    require(in.good(), ErrorCode::io, "cannot open protocol file '" + spec_file + "'");
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw Error(ErrorCode::parse, std::string("protocol file: ") + e.what());
    }
    spec = protocol_from_json(j);
  } else {
    spec.n = n;
    spec.lambda = units.get(lambda, Dim::length, "--lambda");
    spec.envelope = Envelope::gaussian(units.get(sigma, Dim::length, "--sigma"));
    spec.mass = units.mass();
    spec.emission_times = times.empty() ? std::vector<double>(n, 0.0)
                                        : parse_list(times, units, Dim::time, "--times");
  }
  const double flight_time = units.get(flight, Dim::time, "--flight");

  if (!sweep.empty()) {
    const std::string f = require_format(c, "csv", {"csv", "json"});
    const double max_stagger = units.get(sweep, Dim::time, "--sweep");
    require(sweep_points >= 2, ErrorCode::invalid_argument, "--sweep-points must be at least 2");
    std::vector<double> staggers;
    for (int i = 0; i < sweep_points; ++i) staggers.push_back(max_stagger * i / (sweep_points - 1));
    const auto result = stagger_sweep(spec, flight_time, staggers);
    if (f == "csv") {
      emit(c, to_csv(result));
    } else {
      json arr = json::array();
      for (const auto& p : result) arr.push_back({{"stagger", p.stagger}, {"visibility", p.visibility}});
      emit_json(c, {{"sweep", arr}, {"units", units.describe()}});
    }
    return;
  }
  require_format(c, "json", {"json"});
  validate(spec);
  const double meeting = spec.emission_times.back() + flight_time;
  emit_json(c, {{"visibility", protocol_visibility(spec, meeting)},
                {"meeting_time", meeting},
                {"spec", to_json(spec)},
                {"units", units.describe()}});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Modular-variable interference and entanglement toolkit"};
  app.require_subcommand(1);

  Common common;
  StateOpts fringe_state, criterion_state, sample_state, propagate_state;

  auto* table1 = app.add_subcommand("table1", "Squeezing functions S1, S2");
  add_common(table1, common);

  std::string method = "all";
  auto* constant = app.add_subcommand("constant", "Criterion constant c");
  add_common(constant, common);
  constant->add_option("--method", method)
      ->check(CLI::IsMember({"kummer", "brute", "perturbative", "all"}));

  std::string space;
  int points = 1001;
  std::optional<double> range_lo, range_hi;
  auto* fringes = app.add_subcommand("fringes", "Density profiles as CSV");
  add_common(fringes, common);
  add_state(fringes, fringe_state, "mpe");
  fringes->add_option("--space", space, "position | momentum | relative");
  fringes->add_option("--points", points, "Profile samples");
  fringes->add_option("--min", range_lo, "Profile start");
  fringes->add_option("--max", range_hi, "Profile end");

  std::string axis = "momentum";
  double epsilon = 0.0;
  auto* criterion = app.add_subcommand("criterion", "Evaluate the separability criterion");
  add_common(criterion, common);
  add_state(criterion, criterion_state, "mpe");
  criterion->add_option("--axis", axis, "momentum (N_p, x_bar) or position (N_x, p_bar)")
      ->check(CLI::IsMember({"momentum", "position"}));
  criterion->add_option("--epsilon", epsilon, "Classical admixture fraction");

  int rob_n = 2;
  std::optional<int> rob_upto;
  auto* robustness = app.add_subcommand("robustness", "Admixture threshold");
  add_common(robustness, common);
  robustness->add_option("--N", rob_n, "Number of superposed packets")->check(CLI::Range(2, 1000));
  robustness->add_option("--upto", rob_upto, "Sweep N up to this value");

  std::size_t count = 100000;
  std::string save_prefix;
  auto* sample = app.add_subcommand("sample", "Simulated measurements and criterion estimate");
  add_common(sample, common);
  add_state(sample, sample_state, "mpe");
  sample->add_option("--n", count, "Records per measurement kind")->check(CLI::Range(100, 100000000));
  sample->add_option("--epsilon", epsilon, "Classical admixture fraction");
  sample->add_option("--save", save_prefix, "Write <prefix>_{position,momentum}.{csv,json}");

  std::string time_text = "0";
  bool far_field = false;
  auto* propagate = app.add_subcommand("propagate", "Free propagation of a single-particle state");
  add_common(propagate, common);
  add_state(propagate, propagate_state, "multislit");
  propagate->add_option("--time", time_text, "Propagation time");
  propagate->add_flag("--far-field", far_field, "Add far-field momentum columns (csv)");

  std::string spec_file, lambda = "1", sigma = "1", times, flight = "0", sweep;
  int proto_n = 2, sweep_points = 11;
  auto* protocol = app.add_subcommand("protocol", "Emission-stagger visibility");
  add_common(protocol, common);
  protocol->add_option("--spec", spec_file, "ProtocolSpec JSON file");
  protocol->add_option("--N", proto_n, "Number of emitted packets")->check(CLI::Range(2, 1000));
  protocol->add_option("--lambda", lambda, "Fringe period");
  protocol->add_option("--sigma", sigma, "Initial Gaussian width");
  protocol->add_option("--times", times, "Comma-separated emission times");
  protocol->add_option("--flight", flight, "Time from the last emission to the meeting");
  protocol->add_option("--sweep", sweep, "Largest stagger of an equally spaced sweep");
  protocol->add_option("--sweep-points", sweep_points, "Number of sweep points");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    for (auto& ch : msg)
      if (ch == '\n') ch = ' ';
    std::cerr << "error: parse: " << msg << "\n";
    return 2;
  }

  try {
    for (CLI::App* sub : app.get_subcommands())
      if (!common.config.empty()) apply_config(sub, common.config);
    if (*table1) cmd_table1(common);
    else if (*constant) cmd_constant(common, method);
    else if (*fringes) cmd_fringes(common, fringe_state, space, points, range_lo, range_hi);
    else if (*criterion) cmd_criterion(common, criterion_state, axis, epsilon);
    else if (*robustness) cmd_robustness(common, rob_n, rob_upto);
    else if (*sample) cmd_sample(common, sample_state, count, epsilon, save_prefix);
    else if (*propagate) cmd_propagate(common, propagate_state, time_text, far_field);
    else if (*protocol)
      cmd_protocol(common, spec_file, proto_n, lambda, sigma, times, flight, sweep, sweep_points);
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return e.code() == ErrorCode::parse ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
