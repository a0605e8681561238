#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "grushin/semigroup.hpp"

namespace grushin {

/// Axis-aligned control region omega = (x0,x1) x (y0,y1) inside the domain
/// (-1,1) x (0,1).  Must have positive area.  The experiments of interest
/// place omega on one side of the singular line x = 0.
struct Rect {
  double x0, x1;
  double y0, y1;

  Rect(double x_lo, double x_hi, double y_lo, double y_hi);

  [[nodiscard]] double area() const { return (x1 - x0) * (y1 - y0); }
};

/// Precomputed restriction-and-reprojection operator
///   f  |->  projection of chi_omega * f onto the discrete tensor space.
/// In y the multiplication is exact on the retained modes: the overlap
/// matrix Y_nm = int_{y0}^{y1} 2 sin(n pi y) sin(m pi y) dy has a closed
/// form.  In x the window is snapped to the nearest grid nodes, which makes
/// the indicator piecewise-constant on cells; the windowed Gram matrix B is
/// then cell-exact quadrature, and the projector M^{-1} B is formed once so
/// that each application is a couple of dense mat-vecs.  The snapped window
/// is exposed for reporting.  A full-domain rectangle short-circuits to the
/// identity.
class OmegaProjector {
public:
  OmegaProjector(const ModeFamily& fam, const Rect& omega);

  [[nodiscard]] Field2D apply(const Field2D& f, const ModeFamily& fam) const;

  [[nodiscard]] const Rect& requested() const { return requested_; }
  /// Window actually used in x (grid-node aligned).
  [[nodiscard]] double x_lo() const { return sx0_; }
  [[nodiscard]] double x_hi() const { return sx1_; }
  [[nodiscard]] const Eigen::MatrixXd& y_overlap() const { return Y_; }
  /// Windowed x-Gram matrix B (equals the mass matrix for a full window).
  [[nodiscard]] const Eigen::MatrixXd& window_gram() const { return B_; }

private:
  Rect requested_;
  double sx0_ = 0.0, sx1_ = 0.0;
  Eigen::MatrixXd Y_;   // n_modes x n_modes sine-window overlap
  Eigen::MatrixXd B_;   // windowed x-Gram, shared by all modes
  Eigen::MatrixXd Px_;  // M^{-1} B, shared by all modes
};

/// One-call convenience wrapper (builds the projector internally; use
/// OmegaProjector directly inside iterative loops).
Field2D restrict_omega(const Field2D& f, const Rect& omega,
                       const ModeFamily& fam);

/// Closed-form sine-window overlap Y_nm = int_{y0}^{y1} 2 sin(n pi y)
/// sin(m pi y) dy for modes 1..n_modes (exposed for verification).
Eigen::MatrixXd sine_window_overlap(int n_modes, double y0, double y1);

/// Windowed x-mass matrix B_ij = int_{lo}^{hi} phi_i phi_j dx on the
/// operator's basis, with (lo, hi) snapped to grid nodes; also returns the
/// snapped bounds through the pointers when non-null.
Eigen::MatrixXd windowed_mass(const Operator1D& op, double lo, double hi,
                              double* snapped_lo = nullptr,
                              double* snapped_hi = nullptr);

/// L2 mass of the field on one side of the singularity:
///   sqrt( sum_n int_{side} f_n(x)^2 dx ),  side = +1 for x>0, -1 for x<0.
double side_mass(const Field2D& f, const ModeFamily& fam, int side);

/// Smooth compactly supported bump exp(1 - 1/(1-s^2)), s = (x-c)/r,
/// extended by zero outside |s| < 1.
std::function<double(double)> bump1d(double center, double radius);
/// Tensor bump in (x,y).
std::function<double(double, double)> bump2d(double cx, double rx, double cy,
                                             double ry);

/// Penalized-HUM control problem on the rectangle:  steer f0 toward fT at
/// time T with a control supported on omega, by solving
///   (Lambda + beta I) gT = fT - S(T) f0,      u(tau) = chi_omega S(T-tau) gT,
/// where Lambda = int_0^T S(T-tau) chi_omega S(T-tau) dtau is discretized by
/// the midpoint rule with step dt (dt <= 0 selects T/64).  The discrete
/// operator family (grid, extension spec, nu, gamma, mode count) is supplied
/// separately as a prebuilt ModeFamily.
struct ControlProblem {
  Rect omega;
  double T;
  Field2D f0;
  Field2D fT;
  double beta;
  double cg_tol = 1e-10;  ///< CG stop: ||r|| <= cg_tol ||rhs|| (or the
                          ///< identity-driven bound 1e-9 beta ||gT||)
  int cg_maxiter = 400;
  double dt = 0.0;
  int n_threads = 1;
};

struct ControlResult {
  Eigen::VectorXd times;          ///< midpoint sample times of the control
  std::vector<Field2D> control;   ///< u(times[k]), supported on omega
  Field2D terminal_state;         ///< controlled state f(T)
  double terminal_error = 0.0;    ///< ||f(T) - fT|| / ||fT||
  double dual_state_norm = 0.0;   ///< ||gT||
  double control_norm = 0.0;      ///< L2(0,T; L2) norm of u
  int cg_iters = 0;
  bool converged = true;
  /// || (fT - f(T)) - beta gT || / (beta ||gT||): the penalized-HUM
  /// optimality identity, ~1e-9 for a converged solve (0 when gT = 0).
  double identity_defect = 0.0;
  double beta = 0.0;
};

/// The control Gramian Lambda g = int_0^T S(T-tau) chi S(T-tau) g dtau,
/// discretized by midpoint quadrature with n_steps = round(T/dt)
/// (dt <= 0: T/64) and assembled once as a dense matrix in the truncated
/// modal eigenbasis.  Because the semigroup is diagonal there, the
/// quadrature sum over midpoints has the closed geometric form
///   h sum_j exp(-s (j+1/2) h) = h exp(-s h/2) expm1(-s T) / expm1(-s h)
/// per eigenvalue pair sum s; eigenpairs with lambda h/2 > 60 are dropped
/// (their propagator factor is below exp(-60) at every sample, so the
/// compression agrees with the full sum to ~1e-26 relative).  The matrix
/// is the Gramian in an L2-orthonormal basis: symmetric, PSD, and its
/// leading blocks are exactly the coarse observability compression.
class GramianOperator {
public:
  GramianOperator(const ModeFamily& fam, const OmegaProjector& proj,
                  double T, double dt = 0.0);

  [[nodiscard]] Field2D apply(const Field2D& g, const ModeFamily& fam) const;

  [[nodiscard]] int n_steps() const { return n_steps_; }
  [[nodiscard]] double step() const { return h_; }
  /// Retained eigenpair count for mode n.
  [[nodiscard]] int kept(int n) const { return kept_[static_cast<size_t>(n)]; }
  /// Dense Gramian on the retained eigenpairs (block (n,m) couples modes).
  [[nodiscard]] const Eigen::MatrixXd& matrix() const { return A_; }
  /// Offset of mode n's block inside matrix().
  [[nodiscard]] int offset(int n) const {
    return offsets_[static_cast<size_t>(n)];
  }

private:
  int n_steps_ = 0;
  double h_ = 0.0;
  std::vector<int> kept_;
  std::vector<int> offsets_;
  std::vector<Eigen::MatrixXd> basis_;    // per mode: dim x kept columns of V
  std::vector<Eigen::MatrixXd> adjoint_;  // per mode: (M V_k)^T, kept x dim
  Eigen::MatrixXd A_;
};

/// Applies the control Gramian Lambda g = int_0^T S(T-tau) chi S(T-tau) g
/// dtau by midpoint quadrature with n_steps = round(T/dt) (dt <= 0: T/64).
/// Symmetric and positive semidefinite up to quadrature/roundoff.
/// Convenience wrapper that builds a GramianOperator per call; build one
/// explicitly when applying repeatedly.
Field2D gramian_apply(const Field2D& gT, const ModeFamily& fam,
                      const OmegaProjector& proj, double T, double dt = 0.0,
                      int n_threads = 1);

/// Solves the penalized-HUM normal equations by conjugate gradients in the
/// L2 field inner product, then runs the controlled mild solution and
/// reports the terminal error, the optimality-identity defect, and the
/// control samples.  A CG that exhausts cg_maxiter returns the partial
/// result with converged = false.
ControlResult solve_control(const ControlProblem& problem,
                            const ModeFamily& fam);

/// Coarse observability certificate: the Gramian compressed to the span of
/// the lowest coarse_nx eigenvectors of each of the lowest coarse_ny modes
/// (an L2-orthonormal tensor basis).  Designed (transmitting) extensions
/// give a strictly positive smallest eigenvalue; decoupled extensions are
/// singular on directions supported opposite the control window.
struct UCReport {
  Eigen::MatrixXd gramian;      ///< coarse_nx*coarse_ny dense compression
  Eigen::VectorXd eigenvalues;  ///< ascending
  double min_eig = 0.0;
  int dim = 0;
};

UCReport uc_certificate(const ModeFamily& fam, const Rect& omega, double T,
                        double dt, int coarse_nx, int coarse_ny,
                        int n_threads = 1);

/// Single-mode (1D) version of the same penalized-HUM loop, for the
/// inverse-square heat equation on (-1,1).  Using the n = 0 operator drops
/// the degenerate potential entirely.  The control window is the x-interval
/// (x0, x1), snapped to grid nodes.
struct ControlProblem1D {
  double x0, x1;
  double T;
  Eigen::VectorXd f0;
  Eigen::VectorXd fT;
  double beta;
  double cg_tol = 1e-10;
  int cg_maxiter = 400;
  double dt = 0.0;
};

struct ControlResult1D {
  Eigen::VectorXd times;
  std::vector<Eigen::VectorXd> control;
  Eigen::VectorXd terminal_state;
  double terminal_error = 0.0;
  double dual_state_norm = 0.0;
  double control_norm = 0.0;
  int cg_iters = 0;
  bool converged = true;
  double identity_defect = 0.0;
  double beta = 0.0;
};

ControlResult1D control_1d(const ControlProblem1D& problem,
                           const Operator1D& op, const EigenSystem& eig);

} // namespace grushin
