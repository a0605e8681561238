#include "lab/config.hpp"
#include "lab/scenarios.hpp"

#include "grushin/version.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const char* blurb(const std::string& name) {
  if (name == "spectrum")
    return "eigenvalues and ground state of one 1D mode operator";
  if (name == "extension-check")
    return "validate a boundary/transmission matrix pair";
  if (name == "evolve1d")
    return "heat flow of one 1D mode from a bump initial state";
  if (name == "evolve2d")
    return "heat flow on the rectangle from a bump initial state";
  if (name == "hardy") return "sample the power-weighted Hardy inequality";
  if (name == "carleman")
    return "empirical Carleman constant over a weight-strength grid";
  if (name == "control")
    return "penalized-HUM steering toward the built-in far-side target";
  if (name == "uc-certificate")
    return "coarse observability Gramian spectrum";
  return "";
}

int fail_usage(const std::string& message) {
  std::cerr << "error: " << message << '\n';
  return 2;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"grushin-lab: numerical laboratory for heat flow through an "
               "inverse-square singularity"};
  app.fallthrough();

  std::string config_path;
  std::string out_dir = "out";
  long long seed_override = -1;
  int threads_override = 0;
  app.add_option("--config", config_path,
                 "plain 'key = value' config file ('#' comments)");
  app.add_option("--out", out_dir, "output directory (created if missing)");
  app.add_option("--seed", seed_override, "override the config seed")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--threads", threads_override,
                 "override the config worker-thread count")
      ->check(CLI::PositiveNumber);

  for (const auto& name : grushinlab::known_scenarios())
    app.add_subcommand(name, blurb(name));
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::string subcommand;
  const auto chosen = app.get_subcommands();
  if (!chosen.empty()) subcommand = chosen.front()->get_name();

  std::string text;
  if (!config_path.empty()) {
    std::ifstream file(config_path, std::ios::binary);
    if (!file)
      return fail_usage("cannot read config file '" + config_path + "'");
    std::ostringstream buf;
    buf << file.rdbuf();
    text = buf.str();
  } else if (subcommand.empty()) {
    return fail_usage(
        "nothing to run: pass a scenario subcommand or --config FILE "
        "(see --help)");
  }

  grushinlab::RunConfig cfg;
  try {
    cfg = grushinlab::parse_config(text, subcommand);
  } catch (const grushinlab::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  if (seed_override >= 0)
    cfg.seed = static_cast<unsigned long long>(seed_override);
  if (threads_override > 0) cfg.threads = threads_override;

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec)
    return fail_usage("cannot create output directory '" + out_dir +
                      "': " + ec.message());

  const auto t0 = std::chrono::steady_clock::now();
  json results;
  try {
    results = grushinlab::run_scenario(cfg, out_dir);
  } catch (const std::exception& e) {
    json failure;
    failure["scenario"] = cfg.scenario;
    failure["version"] = grushin::version;
    failure["error"] = e.what();
    failure["config"] = grushinlab::config_json(cfg);
    std::ofstream file(fs::path(out_dir) / "failure.json");
    file << failure.dump(2) << '\n';
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  const double wall_ms =
      std::chrono::duration<double, std::milli>(
          std::chrono::steady_clock::now() - t0)
          .count();

  json summary;
  summary["scenario"] = cfg.scenario;
  summary["version"] = grushin::version;
  summary["wall_time_ms"] = wall_ms;
  summary["config"] = grushinlab::config_json(cfg);
  summary["results"] = results;
  {
    std::ofstream file(fs::path(out_dir) / "summary.json");
    file << summary.dump(2) << '\n';
  }

  std::cout << "scenario '" << cfg.scenario << "' completed in " << wall_ms
            << " ms; artifacts in " << out_dir << '\n';
  return 0;
}
