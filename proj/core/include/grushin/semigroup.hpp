#pragma once

#include "grushin/operator.hpp"

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace grushin {

/// The operators and spectral decompositions of the Fourier modes
/// n = 1..n_modes sharing one grid, extension spec, and degeneracy exponent.
/// This is the working set of every 2D computation: the 2D heat flow acts
/// diagonally on modes, and within each mode diagonally on eigenpairs.
struct ModeFamily {
  std::vector<Operator1D> ops;   // ops[j].mode() == j + 1
  std::vector<EigenSystem> eigs; // full decompositions, same indexing

  [[nodiscard]] int n_modes() const { return static_cast<int>(ops.size()); }
  [[nodiscard]] const std::shared_ptr<const Grid1D>& grid() const {
    return ops.front().grid();
  }
  [[nodiscard]] const ExtensionSpec& spec() const { return ops.front().spec(); }
  [[nodiscard]] double gamma() const { return ops.front().gamma(); }
};

/// Assemble and diagonalize modes 1..n_modes (in parallel across modes when
/// n_threads > 1).
ModeFamily build_mode_family(std::shared_ptr<const Grid1D> grid,
                             const ExtensionSpec& spec, double gamma,
                             int n_modes, int n_threads = 1);

/// Heat propagation of one mode by eigen-expansion:
///   f(t) = sum_k e^{-lambda_k t} <f0, phi_k>_M phi_k.
/// Exact in time for the discretized operator; norm nonincreasing; f(0) = f0.
/// If eig is truncated, the spectral tail of f0 must carry at most 1e-10 of
/// its squared norm (throws std::runtime_error otherwise).
Eigen::VectorXd evolve1d(const Operator1D& op, const EigenSystem& eig,
                         const Eigen::VectorXd& f0, double t);

/// Independent cross-check integrator: trapezoidal (Crank-Nicolson) stepping
/// of M f' = -K f with a uniform step of size ~dt (t is divided into
/// round(t/dt) equal steps).  Unconditionally stable.
Eigen::VectorXd crank_nicolson(const Operator1D& op, const Eigen::VectorXd& f0,
                               double t, double dt);

/// A function on the rectangle (-1,1) x (0,1) stored as Fourier coefficients
/// in y: f(x,y) = sum_n f_n(x) sqrt(2) sin(n pi y), each f_n held as
/// coefficients of the 1D constrained basis.  modes[j] is mode n = j + 1.
struct Field2D {
  std::vector<Eigen::VectorXd> modes;
  std::shared_ptr<const Grid1D> grid;
  double nu = 0.5;
  double gamma = 1.0;

  [[nodiscard]] int n_modes() const { return static_cast<int>(modes.size()); }
};

/// The zero field matching a family's layout.
Field2D zero_field(const ModeFamily& fam);

/// sqrt(sum_n ||f_n||^2): equals the 2D L2 norm by Parseval.
double field_norm(const Field2D& f, const ModeFamily& fam);

/// 2D L2 inner product: sum_n <a_n, b_n>_M (Parseval, as for field_norm).
double field_inner(const Field2D& a, const Field2D& b, const ModeFamily& fam);

/// Mode coefficient functions expanded once for pointwise evaluation.
std::vector<Function1D> field_functions(const Field2D& f, const ModeFamily& fam);

/// Evaluate the field at a point (x in (-1,1), y in (0,1)).
double field_value(const std::vector<Function1D>& mode_funcs, double x, double y);

/// Project a 2D function onto the first n_modes Fourier modes:
///   f_n(x) = integral_0^1 f(x,y) sqrt(2) sin(n pi y) dy,
/// then L2-project each f_n onto the 1D basis.  The y-quadrature uses
/// y_panels composite 10-point panels (y_panels = 0 picks n_modes panels);
/// requires at least 4 points per wavelength of the highest mode, i.e.
/// 10 * y_panels >= 4 * n_modes, and throws std::invalid_argument otherwise
/// (aliasing guard).
Field2D fourier_project(const std::function<double(double, double)>& f,
                        int n_modes, const ModeFamily& fam, int y_panels = 0);

/// 2D heat semigroup S(t): mode-wise evolve1d.  Contractive; satisfies
/// S(t+s) = S(t) S(s) up to roundoff.
Field2D evolve2d(const Field2D& f0, const ModeFamily& fam, double t,
                 int n_threads = 1);

/// Trajectory of a 2D evolution: times, states, L2 norms per time.
struct EvolutionResult {
  Eigen::VectorXd times;
  std::vector<Field2D> states;
  Eigen::VectorXd norms;
  std::string method;
};

/// Mild solution of d/dt f = -A f + v by Duhamel quadrature:
///   f(t) = S(t) f0 + integral_0^t S(t - tau) v(tau) dtau,
/// midpoint rule in tau with step T/round(T/dt), each propagation by
/// eigen-expansion.  source(t) must return a field with the family's layout.
/// Linear in (f0, source); equals evolve2d when source is identically zero.
EvolutionResult mild_solution(const Field2D& f0,
                              const std::function<Field2D(double)>& source,
                              double T, double dt, const ModeFamily& fam,
                              int n_threads = 1);

} // namespace grushin
