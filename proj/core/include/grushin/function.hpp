#pragma once

#include "grushin/extension.hpp"
#include "grushin/grid.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>

namespace grushin {

/// A function on (-1, 1) stored in split form: a C^1 cubic Hermite spline
/// (the stored regular part) plus the localized singular profiles
/// cutoff(x) * (c1 |x|^{nu+1/2} + c2 |x|^{-nu+1/2}) per side of 0.
///
/// The container itself does not enforce extension membership; domain_check
/// reports the residuals of a given spec's conditions.
class Function1D {
public:
  Function1D(std::shared_ptr<const Grid1D> grid, double nu);
  Function1D(std::shared_ptr<const Grid1D> grid, double nu, Eigen::VectorXd dofs,
             SingularCoeffs sing);

  [[nodiscard]] const std::shared_ptr<const Grid1D>& grid() const { return grid_; }
  [[nodiscard]] double nu() const { return nu_; }
  [[nodiscard]] const Eigen::VectorXd& dofs() const { return dofs_; }
  [[nodiscard]] Eigen::VectorXd& dofs() { return dofs_; }
  [[nodiscard]] const SingularCoeffs& sing() const { return sing_; }
  [[nodiscard]] SingularCoeffs& sing() { return sing_; }

  /// Total value spline + cutoff * singular profile.  Throws std::domain_error
  /// at x = 0 when a c2 coefficient is nonzero (the profile x^{-nu+1/2} has no
  /// finite evaluation convention there); with c2m = c2p = 0 the value at 0 is
  /// the spline value.
  [[nodiscard]] double value(double x) const;
  [[nodiscard]] double deriv(double x) const;

  /// The stored spline alone.
  [[nodiscard]] double regular_value(double x) const;
  [[nodiscard]] double regular_deriv(double x) const;
  [[nodiscard]] double regular_second_deriv(double x) const;

  /// cutoff * singular profile (and its derivative).
  [[nodiscard]] double singular_value(double x) const;
  [[nodiscard]] double singular_deriv(double x) const;

  /// Raw two-sided profile c1 |x|^{nu+1/2} + c2 |x|^{-nu+1/2} without cutoff.
  [[nodiscard]] double profile_value(double x) const;
  [[nodiscard]] double profile_deriv(double x) const;

  /// Value/derivative of the H^2-regular component of the split
  /// f = f_reg + profile, i.e. spline + (cutoff - 1) * profile.  Used by the
  /// coercivity checks, whose Dirichlet term sees this component only.
  [[nodiscard]] double split_regular_value(double x) const;
  [[nodiscard]] double split_regular_deriv(double x) const;

  /// The mirrored function x -> f(-x) on the same (symmetric) grid.
  [[nodiscard]] Function1D mirrored() const;

private:
  std::shared_ptr<const Grid1D> grid_;
  double nu_;
  Eigen::VectorXd dofs_; // (value, slope) per node
  SingularCoeffs sing_;
};

/// L^2(-1,1) inner product of two functions on the same grid and nu, using the
/// grid's singularity-aware quadrature.  Throws on mismatched grid or nu.
double inner_product(const Function1D& f, const Function1D& g);

inline double l2_norm(const Function1D& f) {
  return std::sqrt(std::max(0.0, inner_product(f, f)));
}

/// Residuals of an extension spec's membership conditions for f.
struct DomainCheckReport {
  double dirichlet_minus = 0.0;  // |f(-1)|
  double dirichlet_plus = 0.0;   // |f(+1)|
  Eigen::Vector2d transmission = Eigen::Vector2d::Zero();
  double regular_value_at_0 = 0.0;
  double regular_slope_at_0 = 0.0;

  [[nodiscard]] double max_residual() const;
  [[nodiscard]] bool within(double tol) const { return max_residual() <= tol; }
};

DomainCheckReport domain_check(const Function1D& f, const ExtensionSpec& spec);

/// Diagnostic least-squares fit of the per-side singular coefficients of a raw
/// callable, sampled at the quadrature points of the two cells touching 0
/// (where the cutoff is identically 1).  Not an inverse of the split — just a
/// probe for functions believed to have the singular structure.
SingularCoeffs fit_singular_coeffs(const std::function<double(double)>& f,
                                   const Grid1D& grid, double nu);

} // namespace grushin
