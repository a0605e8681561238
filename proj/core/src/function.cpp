#include "grushin/function.hpp"

#include "grushin/cutoff.hpp"
#include "grushin/hermite.hpp"

#include <cmath>
#include <stdexcept>

namespace grushin {

namespace {

void require_unit_interval(double x) {
  if (x < -1.0 || x > 1.0)
    throw std::invalid_argument("Function1D: evaluation point outside [-1, 1]");
}

} // namespace

Function1D::Function1D(std::shared_ptr<const Grid1D> grid, double nu)
    : grid_(std::move(grid)), nu_(nu),
      dofs_(Eigen::VectorXd::Zero(2 * grid_->n_nodes())), sing_{} {
  if (!(nu_ > 0.0 && nu_ < 1.0))
    throw std::invalid_argument("Function1D: nu must lie in (0, 1)");
}

Function1D::Function1D(std::shared_ptr<const Grid1D> grid, double nu,
                       Eigen::VectorXd dofs, SingularCoeffs sing)
    : Function1D(std::move(grid), nu) {
  if (dofs.size() != dofs_.size())
    throw std::invalid_argument("Function1D: dof vector size mismatch");
  dofs_ = std::move(dofs);
  sing_ = sing;
}

double Function1D::regular_value(double x) const {
  require_unit_interval(x);
  return hermite_eval(*grid_, dofs_, x, 0);
}

double Function1D::regular_deriv(double x) const {
  require_unit_interval(x);
  return hermite_eval(*grid_, dofs_, x, 1);
}

double Function1D::regular_second_deriv(double x) const {
  require_unit_interval(x);
  return hermite_eval(*grid_, dofs_, x, 2);
}

double Function1D::profile_value(double x) const {
  if (x == 0.0) {
    // |x|^{nu+1/2} -> 0 always; |x|^{1/2-nu} -> 0 for nu < 1/2, -> 1 at
    // nu = 1/2, and blows up for nu > 1/2.
    if (nu_ == 0.5) {
      if (sing_.c2m != sing_.c2p)
        throw std::domain_error(
            "Function1D: profile value jumps across x = 0 at nu = 1/2");
      return sing_.c2p;
    }
    if (nu_ > 0.5 && (sing_.c2m != 0.0 || sing_.c2p != 0.0))
      throw std::domain_error(
          "Function1D: profile with nonzero c2 coefficient is unbounded at "
          "x = 0 for nu > 1/2");
    return 0.0;
  }
  const double r = std::abs(x);
  const double c1 = (x < 0.0 ? sing_.c1m : sing_.c1p);
  const double c2 = (x < 0.0 ? sing_.c2m : sing_.c2p);
  return c1 * std::pow(r, nu_ + 0.5) + c2 * std::pow(r, -nu_ + 0.5);
}

double Function1D::profile_deriv(double x) const {
  if (x == 0.0) {
    const bool c1_zero = (sing_.c1m == 0.0 && sing_.c1p == 0.0);
    const bool c2_zero = (sing_.c2m == 0.0 && sing_.c2p == 0.0);
    if (c1_zero && c2_zero) return 0.0;
    if (nu_ == 0.5) {
      // The c2 branch is constant; the c1 branch is c1 |x|, differentiable
      // across 0 only when the two one-sided slopes agree.
      if (sing_.c1m != -sing_.c1p)
        throw std::domain_error(
            "Function1D: profile has a kink at x = 0 at nu = 1/2");
      return sing_.c1p;
    }
    if (nu_ > 0.5 && c2_zero) return 0.0; // c1 (nu+1/2) |x|^{nu-1/2} -> 0
    throw std::domain_error(
        "Function1D: profile derivative unbounded at x = 0");
  }
  const double r = std::abs(x);
  const double sgn = (x < 0.0 ? -1.0 : 1.0);
  const double c1 = (x < 0.0 ? sing_.c1m : sing_.c1p);
  const double c2 = (x < 0.0 ? sing_.c2m : sing_.c2p);
  return sgn * (c1 * (nu_ + 0.5) * std::pow(r, nu_ - 0.5) +
                c2 * (-nu_ + 0.5) * std::pow(r, -nu_ - 0.5));
}

double Function1D::singular_value(double x) const {
  require_unit_interval(x);
  if (std::abs(x) >= cutoff_support) return 0.0;
  return cutoff_value(x) * profile_value(x);
}

double Function1D::singular_deriv(double x) const {
  require_unit_interval(x);
  if (std::abs(x) >= cutoff_support) return 0.0;
  return cutoff_deriv(x) * profile_value(x) + cutoff_value(x) * profile_deriv(x);
}

double Function1D::value(double x) const {
  return regular_value(x) + singular_value(x);
}

double Function1D::deriv(double x) const {
  return regular_deriv(x) + singular_deriv(x);
}

double Function1D::split_regular_value(double x) const {
  require_unit_interval(x);
  if (std::abs(x) <= cutoff_plateau) return regular_value(x);
  const double chi = std::abs(x) >= cutoff_support ? 0.0 : cutoff_value(x);
  return regular_value(x) + (chi - 1.0) * profile_value(x);
}

double Function1D::split_regular_deriv(double x) const {
  require_unit_interval(x);
  if (std::abs(x) <= cutoff_plateau) return regular_deriv(x);
  const double chi = std::abs(x) >= cutoff_support ? 0.0 : cutoff_value(x);
  return regular_deriv(x) + cutoff_deriv(x) * profile_value(x) +
         (chi - 1.0) * profile_deriv(x);
}

Function1D Function1D::mirrored() const {
  const int n = grid_->n_nodes();
  Eigen::VectorXd md(2 * n);
  for (int i = 0; i < n; ++i) {
    md[2 * (n - 1 - i)] = dofs_[2 * i];
    md[2 * (n - 1 - i) + 1] = -dofs_[2 * i + 1];
  }
  SingularCoeffs ms{sing_.c1p, sing_.c2p, sing_.c1m, sing_.c2m};
  return Function1D(grid_, nu_, std::move(md), ms);
}

double inner_product(const Function1D& f, const Function1D& g) {
  if (f.grid().get() != g.grid().get())
    throw std::invalid_argument("inner_product: functions live on different grids");
  if (f.nu() != g.nu())
    throw std::invalid_argument("inner_product: functions have different nu");
  return f.grid()->integrate([&](double x) { return f.value(x) * g.value(x); });
}

double DomainCheckReport::max_residual() const {
  return std::max({dirichlet_minus, dirichlet_plus, std::abs(transmission[0]),
                   std::abs(transmission[1]), regular_value_at_0,
                   regular_slope_at_0});
}

DomainCheckReport domain_check(const Function1D& f, const ExtensionSpec& spec) {
  if (f.nu() != spec.nu)
    throw std::invalid_argument("domain_check: function and spec nu differ");
  DomainCheckReport rep;
  rep.dirichlet_minus = spec.dirichlet_minus ? std::abs(f.value(-1.0)) : 0.0;
  rep.dirichlet_plus = spec.dirichlet_plus ? std::abs(f.value(1.0)) : 0.0;
  rep.transmission = transmission_residual(spec, f.sing());
  const int c = f.grid()->center_node();
  rep.regular_value_at_0 = std::abs(f.dofs()[2 * c]);
  rep.regular_slope_at_0 = std::abs(f.dofs()[2 * c + 1]);
  return rep;
}

SingularCoeffs fit_singular_coeffs(const std::function<double(double)>& f,
                                   const Grid1D& grid, double nu) {
  SingularCoeffs out;
  const int m = grid.center_node();
  // Weighted least squares of f against (|x|^{nu+1/2}, |x|^{-nu+1/2}) on the
  // quadrature points of the cell touching 0, one side at a time.
  auto fit_side = [&](int cell, double& c1, double& c2) {
    const QuadRule& rule = grid.cell_rule(cell);
    Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
    Eigen::Vector2d b = Eigen::Vector2d::Zero();
    for (int i = 0; i < rule.size(); ++i) {
      const double x = rule.points[i], w = rule.weights[i];
      const double r = std::abs(x);
      const Eigen::Vector2d phi(std::pow(r, nu + 0.5), std::pow(r, -nu + 0.5));
      A += w * phi * phi.transpose();
      b += w * f(x) * phi;
    }
    const Eigen::Vector2d c = A.ldlt().solve(b);
    c1 = c[0];
    c2 = c[1];
  };
  fit_side(m - 1, out.c1m, out.c2m);
  fit_side(m, out.c1p, out.c2p);
  return out;
}

} // namespace grushin
