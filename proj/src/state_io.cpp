#include "modvar/state_io.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "modvar/error.hpp"

namespace modvar {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const char* what) {
  require(j.is_object(), ErrorCode::parse, std::string(what) + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    require(allowed.count(key) > 0, ErrorCode::parse,
            std::string("unknown key '") + key + "' in " + what);
  }
}

template <typename T>
T get(const json& j, const char* key, const char* what) {
  require(j.contains(key), ErrorCode::parse, std::string(what) + " is missing '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse, std::string("bad value for '") + key + "' in " + what);
  }
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::vector<double>> read_rows(std::istream& in, std::size_t columns,
                                           const std::string& header) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::parse, "empty CSV input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == header, ErrorCode::parse, "expected CSV header '" + header + "'");
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::stringstream ss(line);
    std::vector<double> row;
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw Error(ErrorCode::parse, "non-numeric CSV cell '" + cell + "'");
      }
    }
    require(row.size() == columns, ErrorCode::parse, "wrong number of CSV columns");
    rows.push_back(std::move(row));
  }
  return rows;
}

GridSpec spec_from_nodes(const std::vector<double>& nodes) {
  require(nodes.size() >= 2, ErrorCode::parse, "CSV grid needs at least two nodes");
  const double dx = nodes[1] - nodes[0];
  require(dx > 0.0, ErrorCode::parse, "CSV grid nodes must increase");
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    require(std::abs(nodes[i] - nodes[i - 1] - dx) <= 1e-9 * std::max(1.0, std::abs(dx)) +
                                                          1e-9 * std::abs(nodes[i]),
            ErrorCode::parse, "CSV grid nodes are not uniformly spaced");
  }
  const double min = nodes.front() - 0.5 * dx;
  return GridSpec(nodes.size(), min, min + dx * static_cast<double>(nodes.size()));
}

}  // namespace

Envelope envelope_from_json(const json& j) {
  const auto kind = get<std::string>(j, "kind", "envelope");
  if (kind == "gaussian") {
    reject_unknown(j, {"kind", "sigma_x"}, "gaussian envelope");
    return Envelope::gaussian(get<double>(j, "sigma_x", "envelope"));
  }
  if (kind == "sinc") {
    reject_unknown(j, {"kind", "d"}, "sinc envelope");
    return Envelope::sinc(get<double>(j, "d", "envelope"));
  }
  if (kind == "tabulated") {
    reject_unknown(j, {"kind", "x_min", "dx", "re", "im"}, "tabulated envelope");
    const auto re = get<std::vector<double>>(j, "re", "envelope");
    const auto im = j.contains("im") ? get<std::vector<double>>(j, "im", "envelope")
                                     : std::vector<double>(re.size(), 0.0);
    require(re.size() == im.size(), ErrorCode::parse, "envelope 're' and 'im' differ in length");
    std::vector<cplx> samples(re.size());
    for (std::size_t i = 0; i < re.size(); ++i) samples[i] = {re[i], im[i]};
    return Envelope::tabulated(get<double>(j, "x_min", "envelope"), get<double>(j, "dx", "envelope"),
                               std::move(samples));
  }
  throw Error(ErrorCode::parse, "unknown envelope kind '" + kind + "'");
}

json to_json(const Envelope& e) {
  switch (e.kind()) {
    case Envelope::Kind::gaussian: return {{"kind", "gaussian"}, {"sigma_x", e.width()}};
    case Envelope::Kind::sinc: return {{"kind", "sinc"}, {"d", e.width()}};
    case Envelope::Kind::tabulated: {
      const auto* t = e.table();
      std::vector<double> re, im;
      for (const auto& v : t->samples) {
        re.push_back(v.real());
        im.push_back(v.imag());
      }
      return {{"kind", "tabulated"}, {"x_min", t->x_min}, {"dx", t->dx}, {"re", re}, {"im", im}};
    }
  }
  return {};
}

const char* to_string(StateKind kind) {
  switch (kind) {
    case StateKind::multislit: return "multislit";
    case StateKind::smp: return "smp";
    case StateKind::mpe: return "mpe";
    case StateKind::classical: return "classical";
  }
  return "?";
}

bool is_two_particle(StateKind kind) {
  return kind == StateKind::mpe || kind == StateKind::classical;
}

StateDescriptor descriptor_from_json(const json& j) {
  reject_unknown(j, {"kind", "N", "x0", "N0", "lambda", "L", "envelope", "phase_ref"},
                 "state descriptor");
  StateDescriptor d;
  const auto kind = get<std::string>(j, "kind", "state descriptor");
  if (kind == "multislit") d.kind = StateKind::multislit;
  else if (kind == "smp") d.kind = StateKind::smp;
  else if (kind == "mpe") d.kind = StateKind::mpe;
  else if (kind == "classical") d.kind = StateKind::classical;
  else throw Error(ErrorCode::parse, "unknown state kind '" + kind + "'");

  d.n = get<int>(j, "N", "state descriptor");
  if (j.contains("x0")) d.x0 = get<double>(j, "x0", "state descriptor");
  if (j.contains("N0")) d.base_index = get<int>(j, "N0", "state descriptor");
  const char* scale_key = d.kind == StateKind::multislit ? "L" : "lambda";
  const char* other_key = d.kind == StateKind::multislit ? "lambda" : "L";
  require(!j.contains(other_key), ErrorCode::parse,
          std::string("'") + other_key + "' does not apply to " + kind + " states");
  d.scale = get<double>(j, scale_key, "state descriptor");
  d.envelope = envelope_from_json(get<json>(j, "envelope", "state descriptor"));
  if (j.contains("phase_ref")) d.phase_ref = get<double>(j, "phase_ref", "state descriptor");
  return d;
}

json to_json(const StateDescriptor& d) {
  json j = {{"kind", to_string(d.kind)},
            {"N", d.n},
            {"x0", d.x0},
            {"N0", d.base_index},
            {d.kind == StateKind::multislit ? "L" : "lambda", d.scale},
            {"envelope", to_json(d.envelope)}};
  if (d.phase_ref) j["phase_ref"] = *d.phase_ref;
  return j;
}

std::string descriptor_hash(const StateDescriptor& d) {
  const std::string text = to_json(d).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SuperposedState build_single(const StateDescriptor& d) {
  switch (d.kind) {
    case StateKind::multislit: return build_multislit(d.n, d.scale, d.envelope);
    case StateKind::smp: return build_smp(d.n, d.x0, d.base_index, d.scale, d.envelope, d.phase_ref);
    default: break;
  }
  throw Error(ErrorCode::invalid_argument,
              std::string(to_string(d.kind)) + " is a two-particle state");
}

TwoParticleState build_pair(const StateDescriptor& d) {
  require(d.kind == StateKind::mpe, ErrorCode::invalid_argument,
          std::string(to_string(d.kind)) + " is not a pure two-particle state");
  return build_mpe(d.n, d.x0, d.base_index, d.scale, d.envelope, d.phase_ref);
}

MixtureState build_ensemble(const StateDescriptor& d) {
  if (d.kind == StateKind::classical)
    return build_classical_correlated(d.n, d.x0, d.base_index, d.scale, d.envelope, d.phase_ref);
  return as_mixture(build_pair(d));
}

void write_csv(std::ostream& out, const GridState& state) {
  out << "x,re,im\n";
  for (std::size_t i = 0; i < state.spec().points(); ++i) {
    out << format_double(state.spec().node(i)) << ',' << format_double(state[i].real()) << ','
        << format_double(state[i].imag()) << '\n';
  }
}

void write_csv(std::ostream& out, const DenseGrid2D& state) {
  out << "x1,x2,re,im\n";
  for (std::size_t i = 0; i < state.spec1().points(); ++i) {
    for (std::size_t j = 0; j < state.spec2().points(); ++j) {
      const cplx a = state.at(i, j);
      out << format_double(state.spec1().node(i)) << ',' << format_double(state.spec2().node(j))
          << ',' << format_double(a.real()) << ',' << format_double(a.imag()) << '\n';
    }
  }
}

GridState read_grid_state_csv(std::istream& in) {
  const auto rows = read_rows(in, 3, "x,re,im");
  std::vector<double> nodes;
  std::vector<cplx> amp;
  for (const auto& r : rows) {
    nodes.push_back(r[0]);
    amp.emplace_back(r[1], r[2]);
  }
  return GridState(spec_from_nodes(nodes), std::move(amp));
}

DenseGrid2D read_dense_grid_csv(std::istream& in) {
  const auto rows = read_rows(in, 4, "x1,x2,re,im");
  require(!rows.empty(), ErrorCode::parse, "CSV has no rows");
  std::vector<double> x2;
  for (const auto& r : rows) {
    if (r[0] != rows.front()[0]) break;
    x2.push_back(r[1]);
  }
  require(rows.size() % x2.size() == 0, ErrorCode::parse, "CSV rows do not form a full grid");
  std::vector<double> x1;
  std::vector<cplx> amp;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (k % x2.size() == 0) x1.push_back(rows[k][0]);
    require(rows[k][1] == x2[k % x2.size()] && rows[k][0] == x1.back(), ErrorCode::parse,
            "CSV rows are not in row-major grid order");
    amp.emplace_back(rows[k][2], rows[k][3]);
  }
  return DenseGrid2D(spec_from_nodes(x1), spec_from_nodes(x2), std::move(amp));
}

}  // namespace modvar
