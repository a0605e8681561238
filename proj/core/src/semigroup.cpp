#include "grushin/semigroup.hpp"

#include "grushin/parallel.hpp"
#include "grushin/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace grushin {

namespace {

void check_family(const ModeFamily& fam) {
  if (fam.ops.empty() || fam.ops.size() != fam.eigs.size())
    throw std::invalid_argument("ModeFamily: empty or inconsistent family");
  for (int j = 0; j < fam.n_modes(); ++j) {
    if (fam.ops[j].mode() != j + 1)
      throw std::invalid_argument("ModeFamily: ops[j] must be mode j+1");
    if (fam.ops[j].grid() != fam.ops[0].grid())
      throw std::invalid_argument("ModeFamily: modes on different grids");
  }
}

void check_field(const Field2D& f, const ModeFamily& fam) {
  if (f.n_modes() != fam.n_modes())
    throw std::invalid_argument("Field2D: mode count does not match family");
  if (f.grid != fam.grid())
    throw std::invalid_argument("Field2D: grid does not match family");
  if (f.nu != fam.spec().nu || f.gamma != fam.gamma())
    throw std::invalid_argument("Field2D: nu/gamma do not match family");
  for (int j = 0; j < f.n_modes(); ++j)
    if (f.modes[j].size() != fam.ops[j].dim())
      throw std::invalid_argument("Field2D: coefficient size mismatch");
}

} // namespace

ModeFamily build_mode_family(std::shared_ptr<const Grid1D> grid,
                             const ExtensionSpec& spec, double gamma,
                             int n_modes, int n_threads) {
  if (n_modes < 1)
    throw std::invalid_argument("build_mode_family: need n_modes >= 1");
  std::vector<std::optional<Operator1D>> ops(n_modes);
  std::vector<EigenSystem> eigs(n_modes);
  parallel_for(
      n_modes,
      [&](int j) {
        ops[j] = assemble(grid, spec, j + 1, gamma);
        eigs[j] = eigensolve(*ops[j]);
      },
      n_threads);
  ModeFamily fam;
  fam.ops.reserve(n_modes);
  fam.eigs = std::move(eigs);
  for (int j = 0; j < n_modes; ++j) fam.ops.push_back(std::move(*ops[j]));
  return fam;
}

Eigen::VectorXd evolve1d(const Operator1D& op, const EigenSystem& eig,
                         const Eigen::VectorXd& f0, double t) {
  if (f0.size() != op.dim())
    throw std::invalid_argument("evolve1d: coefficient size mismatch");
  if (!(t >= 0.0)) throw std::invalid_argument("evolve1d: need t >= 0");
  if (eig.count() < 1 || eig.vectors.rows() != op.dim())
    throw std::invalid_argument("evolve1d: eigensystem does not match operator");

  const Eigen::VectorXd a = eig.vectors.transpose() * (op.mass() * f0);
  if (eig.count() < op.dim()) {
    const double mass = f0.dot(op.mass() * f0);
    const double tail = mass - a.squaredNorm();
    if (mass > 0.0 && tail > 1e-10 * mass)
      throw std::runtime_error(
          "evolve1d: truncated eigensystem misses more than 1e-10 of the "
          "initial squared norm; enlarge k or pass the full decomposition");
  }
  const Eigen::VectorXd decayed =
      (a.array() * (-eig.values.array() * t).exp()).matrix();
  return eig.vectors * decayed;
}

Eigen::VectorXd crank_nicolson(const Operator1D& op, const Eigen::VectorXd& f0,
                               double t, double dt) {
  if (f0.size() != op.dim())
    throw std::invalid_argument("crank_nicolson: coefficient size mismatch");
  if (!(dt > 0.0)) throw std::invalid_argument("crank_nicolson: need dt > 0");
  if (!(t >= 0.0)) throw std::invalid_argument("crank_nicolson: need t >= 0");
  if (t == 0.0) return f0;

  const auto n_steps = std::max<long long>(1, std::llround(t / dt));
  const double h = t / static_cast<double>(n_steps);
  const Eigen::MatrixXd lhs = op.mass() + (0.5 * h) * op.stiffness();
  const Eigen::MatrixXd rhs = op.mass() - (0.5 * h) * op.stiffness();
  const Eigen::LDLT<Eigen::MatrixXd> solver(lhs);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("crank_nicolson: factorization failed");
  Eigen::VectorXd f = f0;
  for (long long s = 0; s < n_steps; ++s) f = solver.solve(rhs * f);
  return f;
}

Field2D zero_field(const ModeFamily& fam) {
  check_family(fam);
  Field2D f;
  f.grid = fam.grid();
  f.nu = fam.spec().nu;
  f.gamma = fam.gamma();
  f.modes.reserve(fam.n_modes());
  for (int j = 0; j < fam.n_modes(); ++j)
    f.modes.emplace_back(Eigen::VectorXd::Zero(fam.ops[j].dim()));
  return f;
}

double field_norm(const Field2D& f, const ModeFamily& fam) {
  check_field(f, fam);
  double sq = 0.0;
  for (int j = 0; j < f.n_modes(); ++j)
    sq += f.modes[j].dot(fam.ops[j].mass() * f.modes[j]);
  return std::sqrt(std::max(0.0, sq));
}

double field_inner(const Field2D& a, const Field2D& b, const ModeFamily& fam) {
  check_field(a, fam);
  check_field(b, fam);
  double s = 0.0;
  for (int j = 0; j < a.n_modes(); ++j)
    s += a.modes[j].dot(fam.ops[j].mass() * b.modes[j]);
  return s;
}

std::vector<Function1D> field_functions(const Field2D& f,
                                        const ModeFamily& fam) {
  check_field(f, fam);
  std::vector<Function1D> funcs;
  funcs.reserve(f.n_modes());
  for (int j = 0; j < f.n_modes(); ++j)
    funcs.push_back(fam.ops[j].expand(f.modes[j]));
  return funcs;
}

double field_value(const std::vector<Function1D>& mode_funcs, double x,
                   double y) {
  double v = 0.0;
  for (std::size_t j = 0; j < mode_funcs.size(); ++j) {
    const double n = static_cast<double>(j + 1);
    v += mode_funcs[j].value(x) * std::numbers::sqrt2 *
         std::sin(n * std::numbers::pi * y);
  }
  return v;
}

Field2D fourier_project(const std::function<double(double, double)>& f,
                        int n_modes, const ModeFamily& fam, int y_panels) {
  check_family(fam);
  if (n_modes < 1 || n_modes > fam.n_modes())
    throw std::invalid_argument(
        "fourier_project: n_modes must lie in [1, family size]");
  if (y_panels == 0) y_panels = n_modes;
  constexpr int pts_per_panel = 10;
  if (pts_per_panel * y_panels < 4 * n_modes)
    throw std::invalid_argument(
        "fourier_project: y-resolution below 4 points per wavelength of the "
        "highest mode (aliasing)");

  // Composite y-rule on (0,1).
  const QuadRule ref = gauss_legendre(pts_per_panel);
  std::vector<double> yq, wq;
  yq.reserve(static_cast<std::size_t>(pts_per_panel) * y_panels);
  wq.reserve(yq.capacity());
  for (int p = 0; p < y_panels; ++p) {
    const double a = static_cast<double>(p) / y_panels;
    const double b = static_cast<double>(p + 1) / y_panels;
    for (int q = 0; q < ref.size(); ++q) {
      yq.push_back(0.5 * (a + b) + 0.5 * (b - a) * ref.points[q]);
      wq.push_back(0.5 * (b - a) * ref.weights[q]);
    }
  }

  Field2D out = zero_field(fam);
  for (int j = 0; j < n_modes; ++j) {
    const double n = static_cast<double>(j + 1);
    const auto mode_slice = [&](double x) {
      double s = 0.0;
      for (std::size_t q = 0; q < yq.size(); ++q)
        s += wq[q] * f(x, yq[q]) * std::numbers::sqrt2 *
             std::sin(n * std::numbers::pi * yq[q]);
      return s;
    };
    out.modes[j] = fam.ops[j].project(mode_slice);
  }
  return out;
}

Field2D evolve2d(const Field2D& f0, const ModeFamily& fam, double t,
                 int n_threads) {
  check_field(f0, fam);
  if (!(t >= 0.0)) throw std::invalid_argument("evolve2d: need t >= 0");
  Field2D out = f0;
  parallel_for(
      fam.n_modes(),
      [&](int j) { out.modes[j] = evolve1d(fam.ops[j], fam.eigs[j], f0.modes[j], t); },
      n_threads);
  return out;
}

EvolutionResult mild_solution(const Field2D& f0,
                              const std::function<Field2D(double)>& source,
                              double T, double dt, const ModeFamily& fam,
                              int n_threads) {
  check_field(f0, fam);
  if (!(T > 0.0)) throw std::invalid_argument("mild_solution: need T > 0");
  if (!(dt > 0.0)) throw std::invalid_argument("mild_solution: need dt > 0");

  const auto n_steps = std::max<long long>(1, std::llround(T / dt));
  const double h = T / static_cast<double>(n_steps);

  EvolutionResult res;
  res.method = "eigen-expansion";
  res.times.resize(n_steps + 1);
  res.norms.resize(n_steps + 1);
  res.states.reserve(static_cast<std::size_t>(n_steps) + 1);
  res.states.push_back(f0);
  res.times[0] = 0.0;
  res.norms[0] = field_norm(f0, fam);

  Field2D f = f0;
  for (long long s = 0; s < n_steps; ++s) {
    const double t_mid = (static_cast<double>(s) + 0.5) * h;
    const Field2D v = source(t_mid);
    check_field(v, fam);
    parallel_for(
        fam.n_modes(),
        [&](int j) {
          // f_{s+1} = S(h) f_s + h S(h/2) v(t_mid): midpoint Duhamel on the
          // step, both propagations exact by eigen-expansion.
          f.modes[j] =
              evolve1d(fam.ops[j], fam.eigs[j], f.modes[j], h) +
              h * evolve1d(fam.ops[j], fam.eigs[j], v.modes[j], 0.5 * h);
        },
        n_threads);
    res.times[s + 1] = static_cast<double>(s + 1) * h;
    res.states.push_back(f);
    res.norms[s + 1] = field_norm(f, fam);
  }
  return res;
}

} // namespace grushin
