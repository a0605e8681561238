#pragma once

#include "lab/config.hpp"

#include "json.hpp"

#include <functional>
#include <string>

namespace grushinlab {

/// JSON echo of a fully-resolved config (every field, lists as arrays).
nlohmann::json config_json(const RunConfig& cfg);

/// The built-in steering target of the control scenario: a smooth bump
/// supported in 0.001 < x < 0.99 — entirely on the far side of the singular
/// line from the control window defaults — skewed toward x = 0 (the most
/// transmissible profile), times the first y-mode shape:
///   fT(x, y) = exp(-0.003/s - 0.3/(1-s)) * sin(pi y),  s = (x-0.001)/0.989,
/// extended by zero outside 0 < s < 1.
std::function<double(double, double)> steering_target();

/// Runs cfg.scenario, writing its CSV/JSON artifacts into out_dir (which
/// must exist), and returns the "results" block of the run summary.
/// Scenario invariant violations (lost contractivity, non-monotone control
/// errors, invalid extension, ...) are reported by throwing
/// std::runtime_error; the caller turns that into a failure record.
nlohmann::json run_scenario(const RunConfig& cfg, const std::string& out_dir);

} // namespace grushinlab
