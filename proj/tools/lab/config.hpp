#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace grushinlab {

/// Error raised while reading a config: carries the 1-based line number of
/// the offending entry (0 for file-level problems such as a missing
/// scenario).  what() is prefixed with "config line N: " / "config: ".
class ConfigError : public std::runtime_error {
public:
  ConfigError(int line_no, const std::string& message);

  [[nodiscard]] int line() const { return line_; }

private:
  int line_ = 0;
};

/// Fully-resolved run parameters.  Every field has a usable default, so a
/// config file only needs the keys it wants to change (plus `scenario`,
/// which may instead come from the CLI subcommand).
struct RunConfig {
  std::string scenario;                      ///< required; see known_scenarios()
  std::string spec = "designed";             ///< "designed" | "decoupled"
  double nu = 0.5;                           ///< singularity strength, in [0.05, 0.95]
  double gamma = 1.0;                        ///< degeneracy exponent, in (0, 4]
  int n = 1;                                 ///< 1D mode index, >= 0
  int n_modes = 8;                           ///< 2D mode count, in [1, 64]
  int grid_cells = 128;                      ///< even, in [8, 2048]
  double grading = 2.0;                      ///< mesh grading exponent, in [1, 6]
  double T = 1.0;                            ///< time horizon, in (0, 100]
  std::vector<double> beta{1e-2, 1e-3, 1e-4};///< penalties, each in (0, 1]
  std::vector<double> omega{-0.8, -0.2, 0.2, 0.8}; ///< x0,x1,y0,y1 control window
  std::vector<double> R{25.0, 50.0, 100.0, 200.0}; ///< weight strengths, increasing
  double alpha = 0.0;                        ///< power-weight exponent, in [-2, 2)
  int count = 12;                            ///< samples / family size / eigenvalues, [1, 500]
  unsigned long long seed = 1;               ///< RNG seed
  double dt = 0.0;                           ///< quadrature step (0 = scenario default)
  int snapshots = 4;                         ///< exported time samples, [1, 256]
  int eval_x = 128;                          ///< x evaluation points, even, [2, 4096]
  int eval_y = 32;                           ///< y evaluation points, [1, 4096]
  int coarse_nx = 8;                         ///< Gramian compression (per-mode pairs), [1, 32]
  int coarse_ny = 8;                         ///< Gramian compression (modes), [1, 32]
  double cg_tol = 1e-10;                     ///< CG relative tolerance, > 0
  int cg_maxiter = 400;                      ///< CG iteration cap, >= 1
  int threads = 1;                           ///< worker threads, [1, 64]
};

/// The scenario names accepted by `scenario = ...` and as CLI subcommands.
const std::vector<std::string>& known_scenarios();

/// Parses a plain `key = value` config ('#' starts a comment, blank lines
/// ignored).  `fallback_scenario`, when nonempty, supplies the scenario if
/// the text does not; if both are present they must agree.  Unknown keys,
/// malformed values, out-of-range values, and a missing scenario all raise
/// ConfigError with the offending line number.
RunConfig parse_config(const std::string& text,
                       const std::string& fallback_scenario = "");

} // namespace grushinlab
