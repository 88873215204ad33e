// Runs modvar_cli against stored outputs.
// Usage: cli_golden <modvar_cli> <golden dir> <README.md> [--update]

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Tolerance {
  double rel = 1e-7;
  double abs = 1e-12;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char ch : s) out += ch == '\'' ? std::string("'\\''") : std::string(1, ch);
  return out + "'";
}

int run(const std::string& command) {
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

bool close(double a, double b, const Tolerance& tol) {
  return std::abs(a - b) <= tol.abs + tol.rel * std::max(std::abs(a), std::abs(b));
}

void compare_json(const json& got, const json& want, const std::string& path, const Tolerance& tol,
                  std::vector<std::string>& diffs) {
  if (want.is_number() && got.is_number()) {
    if (!close(got.get<double>(), want.get<double>(), tol))
      diffs.push_back(path + ": " + got.dump() + " != " + want.dump());
    return;
  }
  if (got.type() != want.type()) {
    diffs.push_back(path + ": type mismatch");
    return;
  }
  if (want.is_object()) {
    for (const auto& [key, value] : want.items()) {
      if (!got.contains(key)) diffs.push_back(path + "/" + key + ": missing");
      else compare_json(got.at(key), value, path + "/" + key, tol, diffs);
    }
    for (const auto& [key, value] : got.items())
      if (!want.contains(key)) diffs.push_back(path + "/" + key + ": unexpected");
  } else if (want.is_array()) {
    if (got.size() != want.size()) {
      diffs.push_back(path + ": length " + std::to_string(got.size()) + " != " + std::to_string(want.size()));
      return;
    }
    for (std::size_t i = 0; i < want.size(); ++i)
      compare_json(got[i], want[i], path + "/" + std::to_string(i), tol, diffs);
  } else if (got != want) {
    diffs.push_back(path + ": " + got.dump() + " != " + want.dump());
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

bool parse_number(const std::string& s, double& v) {
  char* end = nullptr;
  v = std::strtod(s.c_str(), &end);
  return !s.empty() && end == s.c_str() + s.size();
}

void compare_csv(const std::string& got, const std::string& want, const Tolerance& tol,
                 std::vector<std::string>& diffs) {
  const auto g = split(got, '\n'), w = split(want, '\n');
  if (g.size() != w.size()) {
    diffs.push_back("row count " + std::to_string(g.size()) + " != " + std::to_string(w.size()));
    return;
  }
  for (std::size_t r = 0; r < w.size(); ++r) {
    const auto gc = split(g[r], ','), wc = split(w[r], ',');
    if (gc.size() != wc.size()) {
      diffs.push_back("row " + std::to_string(r) + ": column count");
      continue;
    }
    for (std::size_t c = 0; c < wc.size(); ++c) {
      double a = 0.0, b = 0.0;
      const bool numeric = parse_number(gc[c], a) && parse_number(wc[c], b);
      if (numeric ? !close(a, b, tol) : gc[c] != wc[c])
        diffs.push_back("row " + std::to_string(r) + " col " + std::to_string(c) + ": " + gc[c] +
                        " != " + wc[c]);
    }
  }
}

std::string join(const std::vector<std::string>& args) {
  std::string out;
  for (const auto& a : args) out += (out.empty() ? "" : " ") + a;
  return out;
}

// Every "modvar_cli ..." line in the README must be covered by a case.
int check_readme(const fs::path& readme, const std::set<std::string>& covered) {
  std::ifstream in(readme);
  if (!in) {
    std::cout << "FAIL readme: cannot open " << readme << "\n";
    return 1;
  }
  int failures = 0, seen = 0;
  const std::regex line_re(R"(^\s*(?:\$\s*)?modvar_cli\s+(.*?)\s*$)");
  std::string line;
  while (std::getline(in, line)) {
    std::smatch m;
    if (!std::regex_match(line, m, line_re)) continue;
    std::istringstream words(m[1].str());
    std::vector<std::string> args;
    for (std::string w; words >> w;) args.push_back(w);
    ++seen;
    if (!covered.count(join(args))) {
      std::cout << "FAIL readme example not covered: modvar_cli " << join(args) << "\n";
      ++failures;
    }
  }
  std::cout << (failures ? "FAIL" : "PASS") << " readme: " << seen << " examples\n";
  return failures;
}

int check_bad_config(const std::string& cli, const fs::path& tmp) {
  const fs::path cfg = tmp / "bad.ini", err = tmp / "bad.err";
  std::ofstream(cfg) << "N = 2\ncolour = red\n";
  const int code = run(quote(cli) + " criterion --config " + quote(cfg.string()) + " >/dev/null 2>" +
                       quote(err.string()));
  const auto lines = split(read_file(err), '\n');
  const bool ok = code != 0 && lines.size() == 1 && lines[0].rfind("error: ", 0) == 0;
  std::cout << (ok ? "PASS" : "FAIL") << " bad config: exit " << code << ", stderr: "
            << (lines.empty() ? "" : lines[0]) << "\n";
  return ok ? 0 : 1;
}

int check_config_applies(const std::string& cli, const fs::path& tmp) {
  const fs::path cfg = tmp / "good.ini", a = tmp / "a.json", b = tmp / "b.json";
  std::ofstream(cfg) << "# criterion settings\nN = 3\nepsilon = 0.25\n";
  const int ca = run(quote(cli) + " criterion --config " + quote(cfg.string()) + " --output " + quote(a.string()));
  const int cb = run(quote(cli) + " criterion --N 3 --epsilon 0.25 --output " + quote(b.string()));
  const bool ok = ca == 0 && cb == 0 && read_file(a) == read_file(b);
  std::cout << (ok ? "PASS" : "FAIL") << " config file matches flags\n";
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 4) {
    std::cerr << "usage: cli_golden <modvar_cli> <golden dir> <README.md> [--update]\n";
    return 2;
  }
  const std::string cli = argv[1];
  const fs::path dir = argv[2];
  const bool update = argc > 4 && std::string(argv[4]) == "--update";
  const fs::path tmp = fs::temp_directory_path() / ("modvar_golden_" + std::to_string(::getpid()));
  fs::create_directories(tmp);

  const json manifest = json::parse(read_file(dir / "manifest.json"));
  Tolerance base;
  base.rel = manifest.at("tolerance").value("rel", base.rel);
  base.abs = manifest.at("tolerance").value("abs", base.abs);

  int failures = 0;
  std::set<std::string> covered;
  for (const auto& c : manifest.at("cases")) {
    const std::string name = c.at("name");
    const auto args = c.at("args").get<std::vector<std::string>>();
    const std::string format = c.at("format");
    const Tolerance tol{c.value("rel", base.rel), c.value("abs", base.abs)};
    covered.insert(join(args));

    std::string command = quote(cli);
    for (const auto& a : args) command += " " + quote(a);
    const fs::path out = tmp / (name + "." + format);
    const int code = run(command + " --output " + quote(out.string()));
    if (code != 0) {
      std::cout << "FAIL " << name << ": exit " << code << "\n";
      ++failures;
      continue;
    }
    const fs::path golden = dir / "expected" / (name + "." + format);
    if (update) {
      fs::copy_file(out, golden, fs::copy_options::overwrite_existing);
      std::cout << "UPDATED " << name << "\n";
      continue;
    }
    if (!fs::exists(golden)) {
      std::cout << "FAIL " << name << ": no stored output\n";
      ++failures;
      continue;
    }
    std::vector<std::string> diffs;
    if (format == "json")
      compare_json(json::parse(read_file(out)), json::parse(read_file(golden)), "", tol, diffs);
    else
      compare_csv(read_file(out), read_file(golden), tol, diffs);
    std::cout << (diffs.empty() ? "PASS " : "FAIL ") << name << "\n";
    for (std::size_t i = 0; i < diffs.size() && i < 10; ++i) std::cout << "  " << diffs[i] << "\n";
    failures += diffs.empty() ? 0 : 1;
  }

  failures += check_readme(argv[3], covered);
  failures += check_bad_config(cli, tmp);
  failures += check_config_applies(cli, tmp);
  fs::remove_all(tmp);
  return failures == 0 ? 0 : 1;
}
