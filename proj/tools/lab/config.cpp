#include "lab/config.hpp"

#include "grushin/extension.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <sstream>

namespace grushinlab {

namespace {

std::string prefixed(int line_no, const std::string& message) {
  std::ostringstream os;
  os << "config";
  if (line_no > 0) os << " line " << line_no;
  os << ": " << message;
  return os.str();
}

std::string trim(const std::string& s) {
  size_t a = 0;
  size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a])) != 0) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1])) != 0) --b;
  return s.substr(a, b - a);
}

double parse_double(const std::string& raw, const std::string& key, int line) {
  const std::string v = trim(raw);
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE)
    throw ConfigError(line, "invalid number '" + v + "' for key '" + key + "'");
  return x;
}

long long parse_int(const std::string& raw, const std::string& key, int line) {
  const std::string v = trim(raw);
  errno = 0;
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE)
    throw ConfigError(line, "invalid integer '" + v + "' for key '" + key + "'");
  return x;
}

unsigned long long parse_seed(const std::string& raw, const std::string& key,
                              int line) {
  const std::string v = trim(raw);
  errno = 0;
  char* end = nullptr;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (v.empty() || v[0] == '-' || end != v.c_str() + v.size() ||
      errno == ERANGE)
    throw ConfigError(line, "invalid seed '" + v + "' for key '" + key + "'");
  return x;
}

std::vector<double> parse_list(const std::string& raw, const std::string& key,
                               int line) {
  std::vector<double> out;
  std::string item;
  std::istringstream is(raw);
  while (std::getline(is, item, ','))
    out.push_back(parse_double(item, key, line));
  if (out.empty())
    throw ConfigError(line, "empty list for key '" + key + "'");
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ", ";
    out += items[i];
  }
  return out;
}

[[noreturn]] void range_error(int line, const std::string& key,
                              const std::string& got,
                              const std::string& expected) {
  throw ConfigError(line, key + " = " + got + " is out of range; " + expected);
}

std::string num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

} // namespace

ConfigError::ConfigError(int line_no, const std::string& message)
    : std::runtime_error(prefixed(line_no, message)), line_(line_no) {}

const std::vector<std::string>& known_scenarios() {
  static const std::vector<std::string> names{
      "spectrum",  "extension-check", "evolve1d", "evolve2d",
      "hardy",     "carleman",        "control",  "uc-certificate"};
  return names;
}

RunConfig parse_config(const std::string& text,
                       const std::string& fallback_scenario) {
  RunConfig cfg;
  int scenario_line = 0;

  std::istringstream stream(text);
  std::string raw_line;
  int line_no = 0;
  while (std::getline(stream, raw_line)) {
    ++line_no;
    std::string line = raw_line;
    if (const size_t hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(line_no,
                        "expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(line_no, "missing key before '=' in '" + line + "'");
    if (value.empty())
      throw ConfigError(line_no, "missing value for key '" + key + "'");

    if (key == "scenario") {
      const auto& names = known_scenarios();
      if (std::find(names.begin(), names.end(), value) == names.end())
        throw ConfigError(line_no, "unknown scenario '" + value +
                                       "' (expected one of: " + join(names) +
                                       ")");
      cfg.scenario = value;
      scenario_line = line_no;
    } else if (key == "spec") {
      if (value != "designed" && value != "decoupled")
        throw ConfigError(line_no, "spec = " + value +
                                       " is not a known extension "
                                       "(expected designed or decoupled)");
      cfg.spec = value;
    } else if (key == "nu") {
      cfg.nu = parse_double(value, key, line_no);
      if (cfg.nu < grushin::nu_clamp_lo || cfg.nu > grushin::nu_clamp_hi)
        range_error(line_no, key, num(cfg.nu),
                    "supported values lie in the clamp [" +
                        num(grushin::nu_clamp_lo) + ", " +
                        num(grushin::nu_clamp_hi) + "]");
    } else if (key == "gamma") {
      cfg.gamma = parse_double(value, key, line_no);
      if (!(cfg.gamma > 0.0) || cfg.gamma > 4.0)
        range_error(line_no, key, num(cfg.gamma), "expected gamma in (0, 4]");
    } else if (key == "n") {
      const long long v = parse_int(value, key, line_no);
      if (v < 0 || v > 256)
        range_error(line_no, key, num(static_cast<double>(v)),
                    "expected a mode index in [0, 256]");
      cfg.n = static_cast<int>(v);
    } else if (key == "n_modes") {
      const long long v = parse_int(value, key, line_no);
      if (v < 1 || v > 64)
        range_error(line_no, key, num(static_cast<double>(v)),
                    "expected a mode count in [1, 64]");
      cfg.n_modes = static_cast<int>(v);
    } else if (key == "grid_cells") {
      const long long v = parse_int(value, key, line_no);
      if (v < 8 || v > 2048 || v % 2 != 0)
        range_error(line_no, key, num(static_cast<double>(v)),
                    "expected an even cell count in [8, 2048]");
      cfg.grid_cells = static_cast<int>(v);
    } else if (key == "grading") {
      cfg.grading = parse_double(value, key, line_no);
      if (cfg.grading < 1.0 || cfg.grading > 6.0)
        range_error(line_no, key, num(cfg.grading),
                    "expected a grading exponent in [1, 6]");
    } else if (key == "T") {
      cfg.T = parse_double(value, key, line_no);
      if (!(cfg.T > 0.0) || cfg.T > 100.0)
        range_error(line_no, key, num(cfg.T), "expected a horizon in (0, 100]");
    } else if (key == "beta") {
      cfg.beta = parse_list(value, key, line_no);
      for (double b : cfg.beta)
        if (!(b > 0.0) || b > 1.0)
          range_error(line_no, key, num(b),
                      "every penalty must lie in (0, 1]");
    } else if (key == "omega") {
      cfg.omega = parse_list(value, key, line_no);
      if (cfg.omega.size() != 4)
        throw ConfigError(line_no,
                          "omega needs exactly 4 numbers: x0, x1, y0, y1");
      const double x0 = cfg.omega[0], x1 = cfg.omega[1];
      const double y0 = cfg.omega[2], y1 = cfg.omega[3];
      if (!(x0 < x1) || x0 < -1.0 || x1 > 1.0)
        range_error(line_no, key, "(" + num(x0) + ", " + num(x1) + ")",
                    "expected -1 <= x0 < x1 <= 1");
      if (!(y0 < y1) || y0 < 0.0 || y1 > 1.0)
        range_error(line_no, key, "(" + num(y0) + ", " + num(y1) + ")",
                    "expected 0 <= y0 < y1 <= 1");
    } else if (key == "R") {
      cfg.R = parse_list(value, key, line_no);
      for (size_t i = 0; i < cfg.R.size(); ++i) {
        if (!(cfg.R[i] > 0.0))
          range_error(line_no, key, num(cfg.R[i]),
                      "weight strengths must be positive");
        if (i > 0 && !(cfg.R[i] > cfg.R[i - 1]))
          throw ConfigError(line_no,
                            "R values must be strictly increasing");
      }
    } else if (key == "alpha") {
      cfg.alpha = parse_double(value, key, line_no);
      if (cfg.alpha < -2.0 || cfg.alpha >= 2.0)
        range_error(line_no, key, num(cfg.alpha),
                    "expected a weight exponent in [-2, 2)");
    } else if (key == "count") {
      const long long v = parse_int(value, key, line_no);
      if (v < 1 || v > 500)
        range_error(line_no, key, num(static_cast<double>(v)),
                    "expected a count in [1, 500]");
      cfg.count = static_cast<int>(v);
    } else if (key == "seed") {
      cfg.seed = parse_seed(value, key, line_no);
    } else if (key == "dt") {
      cfg.dt = parse_double(value, key, line_no);
      if (cfg.dt < 0.0)
        range_error(line_no, key, num(cfg.dt),
                    "expected dt >= 0 (0 selects the scenario default)");
    } else if (key == "snapshots") {
      const long long v = parse_int(value, key, line_no);
      if (v < 1 || v > 256)
        range_error(line_no, key, num(static_cast<double>(v)),
                    "expected a snapshot count in [1, 256]");
      cfg.snapshots = static_cast<int>(v);
    } else if (key == "eval_x") {
      const long long v = parse_int(value, key, line_no);
      if (v < 2 || v > 4096 || v % 2 != 0)
        range_error(line_no, key, num(static_cast<double>(v)),
                    "expected an even point count in [2, 4096] (even keeps "
                    "samples off the singular line x = 0)");
      cfg.eval_x = static_cast<int>(v);
    } else if (key == "eval_y") {
      const long long v = parse_int(value, key, line_no);
      if (v < 1 || v > 4096)
        range_error(line_no, key, num(static_cast<double>(v)),
                    "expected a point count in [1, 4096]");
      cfg.eval_y = static_cast<int>(v);
    } else if (key == "coarse_nx") {
      const long long v = parse_int(value, key, line_no);
      if (v < 1 || v > 32)
        range_error(line_no, key, num(static_cast<double>(v)),
                    "expected a compression size in [1, 32]");
      cfg.coarse_nx = static_cast<int>(v);
    } else if (key == "coarse_ny") {
      const long long v = parse_int(value, key, line_no);
      if (v < 1 || v > 32)
        range_error(line_no, key, num(static_cast<double>(v)),
                    "expected a compression size in [1, 32]");
      cfg.coarse_ny = static_cast<int>(v);
    } else if (key == "cg_tol") {
      cfg.cg_tol = parse_double(value, key, line_no);
      if (!(cfg.cg_tol > 0.0) || cfg.cg_tol > 1e-2)
        range_error(line_no, key, num(cfg.cg_tol),
                    "expected a tolerance in (0, 1e-2]");
    } else if (key == "cg_maxiter") {
      const long long v = parse_int(value, key, line_no);
      if (v < 1 || v > 100000)
        range_error(line_no, key, num(static_cast<double>(v)),
                    "expected an iteration cap in [1, 100000]");
      cfg.cg_maxiter = static_cast<int>(v);
    } else if (key == "threads") {
      const long long v = parse_int(value, key, line_no);
      if (v < 1 || v > 64)
        range_error(line_no, key, num(static_cast<double>(v)),
                    "expected a thread count in [1, 64]");
      cfg.threads = static_cast<int>(v);
    } else {
      throw ConfigError(line_no, "unknown key '" + key + "'");
    }
  }

  if (!fallback_scenario.empty()) {
    if (cfg.scenario.empty()) {
      cfg.scenario = fallback_scenario;
    } else if (cfg.scenario != fallback_scenario) {
      throw ConfigError(scenario_line,
                        "scenario '" + cfg.scenario +
                            "' conflicts with the '" + fallback_scenario +
                            "' subcommand");
    }
  }
  if (cfg.scenario.empty())
    throw ConfigError(0, "missing required key 'scenario' (expected one of: " +
                             join(known_scenarios()) + ")");
  return cfg;
}

} // namespace grushinlab
