#include "lab/scenarios.hpp"

#include "grushin/control.hpp"
#include "grushin/extension.hpp"
#include "grushin/function.hpp"
#include "grushin/inequalities.hpp"
#include "grushin/operator.hpp"
#include "grushin/semigroup.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace grushinlab {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// CSV plumbing.  All floating-point cells go through %.17g so a value is
// reproduced exactly on re-read and byte-identical across identical runs.

std::string cell(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
std::string cell(int v) { return std::to_string(v); }
std::string cell(bool v) { return v ? "1" : "0"; }

class CsvFile {
public:
  CsvFile(const fs::path& path, const std::vector<std::string>& header)
      : out_(path) {
    if (!out_)
      throw std::runtime_error("cannot open '" + path.string() +
                               "' for writing");
    for (size_t i = 0; i < header.size(); ++i) {
      if (i > 0) out_ << ',';
      out_ << header[i];
    }
    out_ << '\n';
  }

  template <class... Ts>
  void row(const Ts&... vals) {
    bool first = true;
    ((out_ << (first ? (first = false, "") : ",") << cell(vals)), ...);
    out_ << '\n';
  }

private:
  std::ofstream out_;
};

// ---------------------------------------------------------------------------
// Shared setup helpers.

grushin::ExtensionSpec make_spec(const RunConfig& cfg) {
  return cfg.spec == "decoupled" ? grushin::decoupled_extension(cfg.nu)
                                 : grushin::designed_extension(cfg.nu);
}

std::shared_ptr<const grushin::Grid1D> make_grid(const RunConfig& cfg) {
  return grushin::build_grid(cfg.grid_cells, cfg.grading);
}

// Midpoint evaluation abscissae: no sample ever lands on the singular line
// x = 0 (eval_x is even) or on the boundary.
std::vector<double> x_samples(int n) {
  std::vector<double> xs(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    xs[static_cast<size_t>(i)] = -1.0 + (i + 0.5) * (2.0 / n);
  return xs;
}

std::vector<double> y_samples(int n) {
  std::vector<double> ys(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) ys[static_cast<size_t>(j)] = (j + 0.5) / n;
  return ys;
}

void write_function_csv(const fs::path& path, const grushin::Function1D& f,
                        const std::vector<double>& xs) {
  CsvFile csv(path, {"x", "value", "regular_value", "singular_value"});
  for (double x : xs)
    csv.row(x, f.value(x), f.regular_value(x), f.singular_value(x));
}

void write_field_csv(const fs::path& path, const grushin::Field2D& f,
                     const grushin::ModeFamily& fam,
                     const std::vector<double>& xs,
                     const std::vector<double>& ys) {
  const auto funcs = grushin::field_functions(f, fam);
  CsvFile csv(path, {"x", "y", "value"});
  for (double x : xs)
    for (double y : ys) csv.row(x, y, grushin::field_value(funcs, x, y));
}

double mass_norm(const grushin::Operator1D& op, const Eigen::VectorXd& c) {
  return std::sqrt(std::max(0.0, c.dot(op.mass() * c)));
}

json matrix2_json(const Eigen::Matrix2d& m) {
  return json::array({json::array({m(0, 0), m(0, 1)}),
                      json::array({m(1, 0), m(1, 1)})});
}

// ---------------------------------------------------------------------------
// Scenarios.

json run_spectrum(const RunConfig& cfg, const fs::path& out) {
  const auto op = grushin::assemble(make_grid(cfg), make_spec(cfg), cfg.n,
                                    cfg.gamma);
  const double sym = op.symmetry_defect();
  if (sym > 1e-8) {
    std::ostringstream os;
    os << "operator symmetry defect " << sym << " exceeds 1e-8";
    throw std::runtime_error(os.str());
  }
  const auto eig = grushin::eigensolve(op);
  if (eig.count() == 0) throw std::runtime_error("empty spectrum");
  if (eig.values(0) < -1e-8) {
    std::ostringstream os;
    os << "smallest eigenvalue " << eig.values(0)
       << " violates the nonnegativity bound -1e-8";
    throw std::runtime_error(os.str());
  }

  const int exported = std::min(cfg.count, eig.count());
  {
    CsvFile csv(out / "spectrum.csv", {"index", "eigenvalue"});
    for (int i = 0; i < exported; ++i) csv.row(i, eig.values(i));
  }
  write_function_csv(out / "eigenfunction_0.csv", op.expand(eig.vectors.col(0)),
                     x_samples(cfg.eval_x));

  json results;
  results["dim"] = op.dim();
  results["exported"] = exported;
  results["smallest_eigenvalue"] = eig.values(0);
  results["largest_exported_eigenvalue"] = eig.values(exported - 1);
  results["symmetry_defect"] = sym;
  results["orthonormality_defect"] = eig.orthonormality_defect;
  results["max_relative_residual"] =
      eig.relative_residuals.size() > 0 ? eig.relative_residuals.maxCoeff()
                                        : 0.0;
  return results;
}

json run_extension_check(const RunConfig& cfg, const fs::path& out) {
  const auto spec = make_spec(cfg);
  const auto rep = grushin::validate_extension(spec);
  const auto tm = grushin::transmission_map(spec);

  json j;
  j["label"] = spec.label;
  j["nu"] = spec.nu;
  j["m2"] = matrix2_json(spec.m2);
  j["m3"] = matrix2_json(spec.m3);
  j["dirichlet_minus"] = spec.dirichlet_minus;
  j["dirichlet_plus"] = spec.dirichlet_plus;
  j["validation"] = {{"valid", rep.valid},
                     {"boundary_system_rank", rep.boundary_system_rank},
                     {"e_identity_residual", rep.e_identity_residual},
                     {"det_m2", rep.det_m2},
                     {"det_m3", rep.det_m3},
                     {"reduced_rank_ok", rep.reduced_rank_ok},
                     {"reduced_det_mismatch", rep.reduced_det_mismatch}};
  j["transmission"] = {{"coupled", tm.coupled}};
  if (tm.coupled) {
    j["transmission"]["map"] = matrix2_json(tm.map);
    j["transmission"]["det"] = tm.map.determinant();
  }

  std::ofstream file(out / "extension.json");
  file << j.dump(2) << '\n';

  if (!rep.valid) {
    std::ostringstream os;
    os << "extension '" << spec.label << "' failed validation: rank "
       << rep.boundary_system_rank << ", identity residual "
       << rep.e_identity_residual;
    throw std::runtime_error(os.str());
  }
  return j;
}

json run_evolve1d(const RunConfig& cfg, const fs::path& out) {
  const auto op = grushin::assemble(make_grid(cfg), make_spec(cfg), cfg.n,
                                    cfg.gamma);
  const auto eig = grushin::eigensolve(op);
  const Eigen::VectorXd c0 = op.project(grushin::bump1d(-0.5, 0.3));
  const auto xs = x_samples(cfg.eval_x);

  const double norm0 = mass_norm(op, c0);
  double prev = norm0;
  double final_norm = norm0;
  Eigen::VectorXd cT = c0;
  {
    CsvFile norms(out / "norms.csv", {"t", "l2_norm"});
    for (int k = 0; k <= cfg.snapshots; ++k) {
      const double t = cfg.T * k / cfg.snapshots;
      const Eigen::VectorXd c = grushin::evolve1d(op, eig, c0, t);
      const double nrm = mass_norm(op, c);
      norms.row(t, nrm);
      char name[32];
      std::snprintf(name, sizeof name, "state_%03d.csv", k);
      write_function_csv(out / name, op.expand(c), xs);
      if (nrm > prev * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "norm grew from " << prev << " to " << nrm << " at t = " << t
           << ": contraction lost";
        throw std::runtime_error(os.str());
      }
      prev = nrm;
      final_norm = nrm;
      cT = c;
    }
  }

  const double dt = cfg.dt > 0.0 ? cfg.dt : cfg.T / 200.0;
  const Eigen::VectorXd cn = grushin::crank_nicolson(op, c0, cfg.T, dt);
  const double cn_rel =
      final_norm > 0.0 ? mass_norm(op, cT - cn) / final_norm : 0.0;

  json results;
  results["dim"] = op.dim();
  results["initial_norm"] = norm0;
  results["final_norm"] = final_norm;
  results["crank_nicolson_dt"] = dt;
  results["crank_nicolson_rel_diff"] = cn_rel;
  return results;
}

json run_evolve2d(const RunConfig& cfg, const fs::path& out) {
  const auto fam = grushin::build_mode_family(make_grid(cfg), make_spec(cfg),
                                              cfg.gamma, cfg.n_modes,
                                              cfg.threads);
  const auto f0 = grushin::fourier_project(grushin::bump2d(-0.5, 0.3, 0.5, 0.25),
                                           cfg.n_modes, fam);
  const auto xs = x_samples(cfg.eval_x);
  const auto ys = y_samples(cfg.eval_y);

  const double norm0 = grushin::field_norm(f0, fam);
  double prev = norm0;
  double final_norm = norm0;
  {
    CsvFile norms(out / "norms.csv", {"t", "l2_norm"});
    for (int k = 0; k <= cfg.snapshots; ++k) {
      const double t = cfg.T * k / cfg.snapshots;
      const auto f = grushin::evolve2d(f0, fam, t, cfg.threads);
      const double nrm = grushin::field_norm(f, fam);
      norms.row(t, nrm);
      char name[32];
      std::snprintf(name, sizeof name, "snapshot_%03d.csv", k);
      write_field_csv(out / name, f, fam, xs, ys);
      if (nrm > prev * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "norm grew from " << prev << " to " << nrm << " at t = " << t
           << ": contraction lost";
        throw std::runtime_error(os.str());
      }
      prev = nrm;
      final_norm = nrm;
    }
  }

  const auto half = grushin::evolve2d(f0, fam, 0.5 * cfg.T, cfg.threads);
  const auto twice = grushin::evolve2d(half, fam, 0.5 * cfg.T, cfg.threads);
  const auto whole = grushin::evolve2d(f0, fam, cfg.T, cfg.threads);
  grushin::Field2D diff = twice;
  for (int n = 0; n < diff.n_modes(); ++n)
    diff.modes[static_cast<size_t>(n)] -=
        whole.modes[static_cast<size_t>(n)];
  const double defect =
      final_norm > 0.0 ? grushin::field_norm(diff, fam) / final_norm : 0.0;
  if (defect > 1e-8) {
    std::ostringstream os;
    os << "semigroup identity defect " << defect << " exceeds 1e-8";
    throw std::runtime_error(os.str());
  }

  json results;
  results["modes"] = fam.n_modes();
  results["initial_norm"] = norm0;
  results["final_norm"] = final_norm;
  results["semigroup_defect"] = defect;
  return results;
}

json run_hardy(const RunConfig& cfg, const fs::path& out) {
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const double inf = std::numeric_limits<double>::infinity();

  double min_ratio = inf;
  double interval_min_ratio = inf;
  bool all_ok = true;
  {
    CsvFile power(out / "hardy.csv",
                  {"sample", "alpha", "lhs", "rhs", "constant", "ratio"});
    CsvFile interval(out / "hardy_interval.csv",
                     {"sample", "lhs", "rhs", "constant", "ratio"});
    for (int i = 0; i < cfg.count; ++i) {
      const grushin::Poly q{unif(rng), unif(rng), unif(rng), unif(rng)};

      const grushin::SpaceTestFunction z(q);
      const auto rep = grushin::hardy_check(z, cfg.alpha);
      const double denom = rep.constant * rep.lhs;
      const double ratio = denom > 0.0 ? rep.rhs / denom : inf;
      power.row(i, cfg.alpha, rep.lhs, rep.rhs, rep.constant, ratio);
      min_ratio = std::min(min_ratio, ratio);
      all_ok = all_ok && rep.satisfied;

      const grushin::PinnedTestFunction zi(q);
      const auto rep2 = grushin::hardy_interval_check(zi, false);
      const double denom2 = rep2.constant * rep2.lhs;
      const double ratio2 = denom2 > 0.0 ? rep2.rhs / denom2 : inf;
      interval.row(i, rep2.lhs, rep2.rhs, rep2.constant, ratio2);
      interval_min_ratio = std::min(interval_min_ratio, ratio2);
      all_ok = all_ok && rep2.satisfied;
    }
  }

  if (!all_ok)
    throw std::runtime_error(
        "a sampled test function violated the weighted bound");

  json results;
  results["alpha"] = cfg.alpha;
  results["samples"] = cfg.count;
  results["min_ratio"] = min_ratio;
  results["interval_min_ratio"] = interval_min_ratio;
  results["all_satisfied"] = all_ok;
  return results;
}

json run_carleman(const RunConfig& cfg, const fs::path& out) {
  grushin::CarlemanScanParams params;
  params.n = cfg.n;
  params.nu = cfg.nu;
  params.gamma = cfg.gamma;
  params.T = cfg.T;
  params.n_threads = cfg.threads;

  const auto family = grushin::standard_family(
      cfg.T, cfg.count, static_cast<unsigned>(cfg.seed));
  Eigen::VectorXd R_grid(static_cast<Eigen::Index>(cfg.R.size()));
  for (size_t i = 0; i < cfg.R.size(); ++i)
    R_grid(static_cast<Eigen::Index>(i)) = cfg.R[i];

  // Throws when the empirical constant fails to be strictly positive.
  const auto scan = grushin::carleman_scan(family, params, R_grid);

  {
    CsvFile csv(out / "carleman.csv", {"R", "c_emp"});
    for (Eigen::Index i = 0; i < scan.R_grid.size(); ++i)
      csv.row(scan.R_grid(i), scan.c_emp(i));
  }

  const double b = grushin::select_b(cfg.nu);
  json results;
  results["b"] = b;
  results["R0"] = scan.R0;
  results["C0"] = scan.C0;
  results["family_size"] = cfg.count;
  if (cfg.nu > 0.5)
    results["identity_residual"] =
        (1.0 - b) * (3.0 - b) - 4.0 * grushin::c_of_nu(cfg.nu);
  return results;
}

json run_control(const RunConfig& cfg, const fs::path& out) {
  const auto fam = grushin::build_mode_family(make_grid(cfg), make_spec(cfg),
                                              cfg.gamma, cfg.n_modes,
                                              cfg.threads);
  const grushin::Rect omega{cfg.omega[0], cfg.omega[1], cfg.omega[2],
                            cfg.omega[3]};
  const auto f0 = grushin::zero_field(fam);
  const auto fT = grushin::fourier_project(steering_target(), cfg.n_modes, fam);
  const double fT_norm = grushin::field_norm(fT, fam);

  // Run penalties in descending order so the error ladder reads top-down.
  std::vector<double> betas = cfg.beta;
  std::sort(betas.begin(), betas.end(), std::greater<>());
  betas.erase(std::unique(betas.begin(), betas.end()), betas.end());

  std::vector<grushin::ControlResult> runs;
  runs.reserve(betas.size());
  json per_beta = json::array();
  {
    CsvFile csv(out / "control_errors.csv",
                {"beta", "terminal_error", "cg_iters", "converged",
                 "identity_defect", "control_norm", "dual_state_norm"});
    for (double beta : betas) {
      grushin::ControlProblem pb{omega, cfg.T, f0, fT, beta};
      pb.cg_tol = cfg.cg_tol;
      pb.cg_maxiter = cfg.cg_maxiter;
      pb.dt = cfg.dt;
      pb.n_threads = cfg.threads;
      auto res = grushin::solve_control(pb, fam);

      csv.row(beta, res.terminal_error, res.cg_iters, res.converged,
              res.identity_defect, res.control_norm, res.dual_state_norm);
      per_beta.push_back({{"beta", beta},
                          {"terminal_error", res.terminal_error},
                          {"cg_iters", res.cg_iters},
                          {"converged", res.converged},
                          {"identity_defect", res.identity_defect},
                          {"control_norm", res.control_norm},
                          {"dual_state_norm", res.dual_state_norm}});

      if (res.converged && res.dual_state_norm > 0.0 &&
          res.identity_defect > 1e-6) {
        std::ostringstream os;
        os << "optimality identity defect " << res.identity_defect
           << " at beta = " << beta << " exceeds 1e-6";
        throw std::runtime_error(os.str());
      }
      runs.push_back(std::move(res));
    }
  }

  if (cfg.spec == "designed") {
    for (size_t i = 1; i < runs.size(); ++i) {
      if (runs[i].terminal_error >
          runs[i - 1].terminal_error * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "terminal error rose from " << runs[i - 1].terminal_error
           << " to " << runs[i].terminal_error
           << " as the penalty decreased to " << betas[i]
           << ": the error ladder must be nonincreasing for the designed "
              "extension";
        throw std::runtime_error(os.str());
      }
    }
  }

  // Field exports for the tightest penalty.
  const auto& best = runs.back();
  const auto xs = x_samples(cfg.eval_x);
  const auto ys = y_samples(cfg.eval_y);
  write_field_csv(out / "target_state.csv", fT, fam, xs, ys);
  write_field_csv(out / "terminal_state.csv", best.terminal_state, fam, xs, ys);
  {
    CsvFile csv(out / "control_field.csv", {"t", "x", "y", "u"});
    const int n_times = static_cast<int>(best.times.size());
    const int n_snap = std::min(cfg.snapshots, n_times);
    for (int j = 0; j < n_snap; ++j) {
      const int k = static_cast<int>(
          (static_cast<long long>(j) * n_times) / n_snap);
      const auto funcs = grushin::field_functions(
          best.control[static_cast<size_t>(k)], fam);
      for (double x : xs)
        for (double y : ys)
          csv.row(best.times(k), x, y, grushin::field_value(funcs, x, y));
    }
  }

  const double right_mass =
      grushin::side_mass(best.terminal_state, fam, +1);
  json results;
  results["target_norm"] = fT_norm;
  results["runs"] = per_beta;
  results["final_terminal_error"] = best.terminal_error;
  results["terminal_right_mass"] = right_mass;
  if (best.control_norm > 0.0)
    results["terminal_right_mass_over_control_norm"] =
        right_mass / best.control_norm;
  return results;
}

json run_uc_certificate(const RunConfig& cfg, const fs::path& out) {
  const auto fam = grushin::build_mode_family(make_grid(cfg), make_spec(cfg),
                                              cfg.gamma, cfg.n_modes,
                                              cfg.threads);
  const grushin::Rect omega{cfg.omega[0], cfg.omega[1], cfg.omega[2],
                            cfg.omega[3]};
  const auto rep = grushin::uc_certificate(fam, omega, cfg.T, cfg.dt,
                                           cfg.coarse_nx, cfg.coarse_ny,
                                           cfg.threads);
  {
    CsvFile csv(out / "uc_spectrum.csv", {"index", "eigenvalue"});
    for (Eigen::Index i = 0; i < rep.eigenvalues.size(); ++i)
      csv.row(static_cast<int>(i), rep.eigenvalues(i));
  }

  int n_zero = 0;
  for (Eigen::Index i = 0; i < rep.eigenvalues.size(); ++i)
    if (rep.eigenvalues(i) <= 1e-14) ++n_zero;

  if (cfg.spec == "designed" && rep.min_eig <= 0.0) {
    std::ostringstream os;
    os << "coupled extension produced a non-positive coarse observability "
          "Gramian (min eigenvalue "
       << rep.min_eig << ")";
    throw std::runtime_error(os.str());
  }

  json results;
  results["dim"] = rep.dim;
  results["coarse_nx"] = cfg.coarse_nx;
  results["coarse_ny"] = cfg.coarse_ny;
  results["min_eigenvalue"] = rep.min_eig;
  results["n_numerically_zero"] = n_zero;
  return results;
}

} // namespace

json config_json(const RunConfig& cfg) {
  json j;
  j["scenario"] = cfg.scenario;
  j["spec"] = cfg.spec;
  j["nu"] = cfg.nu;
  j["gamma"] = cfg.gamma;
  j["n"] = cfg.n;
  j["n_modes"] = cfg.n_modes;
  j["grid_cells"] = cfg.grid_cells;
  j["grading"] = cfg.grading;
  j["T"] = cfg.T;
  j["beta"] = cfg.beta;
  j["omega"] = cfg.omega;
  j["R"] = cfg.R;
  j["alpha"] = cfg.alpha;
  j["count"] = cfg.count;
  j["seed"] = cfg.seed;
  j["dt"] = cfg.dt;
  j["snapshots"] = cfg.snapshots;
  j["eval_x"] = cfg.eval_x;
  j["eval_y"] = cfg.eval_y;
  j["coarse_nx"] = cfg.coarse_nx;
  j["coarse_ny"] = cfg.coarse_ny;
  j["cg_tol"] = cfg.cg_tol;
  j["cg_maxiter"] = cfg.cg_maxiter;
  j["threads"] = cfg.threads;
  return j;
}

std::function<double(double, double)> steering_target() {
  return [](double x, double y) {
    const double s = (x - 0.001) / 0.989;
    if (s <= 0.0 || s >= 1.0) return 0.0;
    return std::exp(-0.003 / s - 0.3 / (1.0 - s)) *
           std::sin(std::numbers::pi * y);
  };
}

json run_scenario(const RunConfig& cfg, const std::string& out_dir) {
  const fs::path out(out_dir);
  if (cfg.scenario == "spectrum") return run_spectrum(cfg, out);
  if (cfg.scenario == "extension-check") return run_extension_check(cfg, out);
  if (cfg.scenario == "evolve1d") return run_evolve1d(cfg, out);
  if (cfg.scenario == "evolve2d") return run_evolve2d(cfg, out);
  if (cfg.scenario == "hardy") return run_hardy(cfg, out);
  if (cfg.scenario == "carleman") return run_carleman(cfg, out);
  if (cfg.scenario == "control") return run_control(cfg, out);
  if (cfg.scenario == "uc-certificate") return run_uc_certificate(cfg, out);
  throw std::runtime_error("unknown scenario '" + cfg.scenario + "'");
}

} // namespace grushinlab
