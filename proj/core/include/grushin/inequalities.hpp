#pragma once

#include <Eigen/Dense>
#include <initializer_list>
#include <vector>

#include "grushin/quadrature.hpp"

namespace grushin {

/// Dense univariate polynomial with ascending coefficients.  An empty
/// coefficient vector is the zero polynomial.  Only the handful of exact
/// operations needed by the inequality checks are provided; all of them are
/// closed-form (no fitting), so test functions built from Poly factors have
/// machine-exact derivatives.
struct Poly {
  Eigen::VectorXd c;

  Poly() = default;
  explicit Poly(Eigen::VectorXd coeffs) : c(std::move(coeffs)) {}
  Poly(std::initializer_list<double> coeffs);

  [[nodiscard]] int degree() const { return static_cast<int>(c.size()) - 1; }
  [[nodiscard]] bool is_zero() const;

  /// Horner evaluation.
  double operator()(double x) const;

  [[nodiscard]] Poly deriv() const;
  [[nodiscard]] Poly scaled(double a) const;

  friend Poly operator*(const Poly& a, const Poly& b);
  friend Poly operator+(const Poly& a, const Poly& b);
};

/// Space-only test function z(x) = x^2 (1 - x) q(x).  The structural factor
/// x^2 (1 - x) enforces z(0) = z'(0) = 0 and z(1) = 0 for every polynomial
/// q, which is exactly the admissible class of the power-weighted Hardy
/// check.  Derived polynomials are cached:
///   w  = (1 - x) q       so z = x^2 w and z / x^2 = w exactly,
///   u  = 2 w + x w'      so z' = x u (no cancellation at the origin).
struct SpaceTestFunction {
  Poly q;
  Poly w;  ///< z / x^2
  Poly u;  ///< z' / x

  explicit SpaceTestFunction(Poly q_factor);

  [[nodiscard]] double value(double x) const { return x * x * w(x); }
  [[nodiscard]] double deriv(double x) const { return x * u(x); }
};

/// Test function z(x) = x q(x): vanishes at the singular point x = 0 but has
/// no constraint on z'(0) or the outer boundary.  Admissible input of the
/// whole-interval Hardy check; z^2 / x^2 = q(x)^2 exactly.
struct PinnedTestFunction {
  Poly q;

  explicit PinnedTestFunction(Poly q_factor) : q(std::move(q_factor)) {}

  [[nodiscard]] double value(double x) const { return x * q(x); }
  [[nodiscard]] double deriv(double x) const;
};

/// Outcome of a Hardy-type check.  `lhs` and `rhs` are the raw integrals
/// (no constants); the inequality tested is  constant * lhs <= rhs, and
/// `satisfied` allows a 1e-10 relative slack on the right-hand side.
struct HardyReport {
  double lhs = 0.0;       ///< singular-side integral
  double rhs = 0.0;       ///< gradient-side integral
  double constant = 0.0;  ///< multiplier applied to lhs in the comparison
  bool satisfied = false;
};

/// Power-weighted Hardy inequality on (0,1):
///   ((1-alpha)^2 / 4) * \int x^{alpha-2} z^2 dx  <=  \int x^alpha z'^2 dx
/// for z with z(0) = z'(0) = 0 and z(1) = 0.  Returns the two raw integrals
/// (lhs is \int x^{alpha-2} z^2, rhs is \int x^alpha z'^2) and
/// constant = (1-alpha)^2/4.  Integration is by quadrature refined
/// geometrically toward x = 0; the integrands are assembled as
/// x^{alpha+2} w^2 and x^{alpha+2} u^2, so no negative power is ever
/// evaluated and alpha = -2 is handled exactly.  Requires alpha in [-2, 2).
HardyReport hardy_check(const SpaceTestFunction& z, double alpha);

/// Whole-interval Hardy inequality
///   \int z^2 / x^2 dx  <=  4 \int z'^2 dx
/// on (0,1) or, when `symmetric` is true, on (-1,1).  Only z(0) = 0 is
/// required.  Returns lhs = \int z^2/x^2, rhs = \int z'^2, constant = 1/4
/// (the inequality in the reported form is constant * lhs <= rhs).
HardyReport hardy_interval_check(const PinnedTestFunction& z, bool symmetric);

/// Exponent selection for the Carleman weight: any b in (0,1) is admissible
/// for nu <= 1/2 and we fix the midpoint b = 1/2; for nu > 1/2 the choice
/// b = 2 - 2 nu makes the weight-induced singular potential match
/// c_nu / x^2 order-for-order (see the bookkeeping identity
/// (1-b)(3-b) = 4 c_nu).  Requires nu in (0,1).
double select_b(double nu);

/// Carleman weight sigma(t,x) = theta(t) x^b with theta(t) = 1/(t(T-t)).
/// The observable is e^{-2 R sigma}, which lives in [0,1] on (0,T) x (0,1]
/// and tends to 0 as t -> 0+ or t -> T-.  Evaluation is underflow-safe: the
/// weight is exact 0 whenever the exponent argument drops below -700.
struct CarlemanWeight {
  double T;  ///< time horizon, > 0
  double R;  ///< weight strength, > 0
  double b;  ///< spatial exponent, in (0,1)

  CarlemanWeight(double horizon, double strength, double exponent);

  [[nodiscard]] double theta(double t) const { return 1.0 / (t * (T - t)); }
  [[nodiscard]] double sigma(double t, double x) const;
  /// e^{-2 R sigma(t,x)}; exact 0 below the underflow threshold.
  [[nodiscard]] double weight(double t, double x) const;
};

/// Separable space-time test function g(t,x) = p(t) * x^2 (1-x) q(x) on
/// [0,T] x [0,1].  The structural factor guarantees g(t,0) = g(t,1) = 0 and
/// d/dx g(t,0) = 0 identically in t, and polynomial factors give closed-form
/// derivatives:  dt g = p' phi,  dxx g = p phi'',  g / x^2 = p w.
struct TestFunction1Plus1 {
  Poly p;        ///< time factor
  Poly q;        ///< extra polynomial space factor
  Poly dp;       ///< p'
  Poly phi;      ///< x^2 (1-x) q
  Poly d2phi;    ///< phi''
  Poly w;        ///< phi / x^2 = (1-x) q, exact

  TestFunction1Plus1(Poly time_factor, Poly space_factor);

  [[nodiscard]] double value(double t, double x) const { return p(t) * phi(x); }
  [[nodiscard]] bool is_zero() const { return p.is_zero() || q.is_zero(); }
};

/// Tensor-quadrature resolution for the Carleman integrals.  Both axes use
/// panels refined geometrically toward the integrand's difficult ends (t ->
/// {0, T}, x -> 0).  With the defaults the dropped end slivers carry a
/// relative mass below 1e-300 and theta^3 stays finite in double precision.
struct CarlemanQuadrature {
  int levels = 165;
  double ratio = 0.25;
  int points_per_cell = 8;
};

struct CarlemanSides {
  double lhs = 0.0;  ///< \iint theta^3 e^{-2 R sigma} g^2   (no R^3, no C0)
  double rhs = 0.0;  ///< \iint |P g|^2 e^{-2 R sigma}
};

/// Evaluates both sides of the Carleman estimate for the one-mode operator
///   P g = dt g - dxx g + (c_nu / x^2 + (n pi)^2 x^{2 gamma}) g
/// on (0,T) x (0,1) with weight exponent b = select_b(nu):
///   lhs = \iint theta^3 e^{-2 R sigma} g^2,
///   rhs = \iint |P g|^2 e^{-2 R sigma}.
/// The singular potential acts on g through the exact cancellation
/// g / x^2 = p(t) (1-x) q(x), so the integrand is bounded.  Throws if a
/// non-finite integrand value is encountered (misconstructed input) or on
/// invalid parameters (nu outside (0,1), gamma <= 0, n < 0, R <= 0, T <= 0).
CarlemanSides carleman_sides(const TestFunction1Plus1& g, int n, double nu,
                             double gamma, double R, double T,
                             const CarlemanQuadrature& quad = {});

struct CarlemanScanParams {
  int n = 1;
  double nu = 0.5;
  double gamma = 1.0;
  double T = 1.0;
  CarlemanQuadrature quad{};
  int n_threads = 1;
};

/// Result of scanning the empirical Carleman constant over a grid of weight
/// strengths.  c_emp[i] = min over the (non-zero) family of
/// rhs / (R_i^3 * lhs).  R0 is placed at the last grid point where c_emp
/// attains its minimum — the largest threshold such that the infimum of
/// c_emp over R >= R0 is still attained at R0 — and C0 is that infimum, so
/// the pair (R0, C0) certifies  rhs >= C0 R^3 lhs  on the sampled tail.
struct CarlemanScanResult {
  double R0 = 0.0;
  double C0 = 0.0;
  Eigen::VectorXd R_grid;
  Eigen::VectorXd c_emp;
};

/// Scans the empirical constant over an increasing, positive R grid.
/// Identically-zero family members are skipped; if every member is zero, or
/// the resulting C0 fails to be strictly positive, throws.  Member/grid
/// evaluations run in parallel over (member, R) pairs when n_threads > 1.
CarlemanScanResult carleman_scan(const std::vector<TestFunction1Plus1>& family,
                                 const CarlemanScanParams& params,
                                 const Eigen::VectorXd& R_grid);

/// Deterministic pseudo-random family of admissible test functions:
///   g(t,x) = t(T-t)(1 + a1 t) * x^2 (1-x) (1 + b1 x + b2 x^2),
/// with a1, b1, b2 drawn uniformly from [-1,1].  The time factor vanishes
/// like t(T-t) at the endpoints, keeping the quadrature benign.
std::vector<TestFunction1Plus1> standard_family(double T, int count,
                                                unsigned seed);

} // namespace grushin
