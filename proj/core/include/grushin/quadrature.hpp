#pragma once

#include <Eigen/Dense>
#include <functional>

namespace grushin {

/// A fixed quadrature rule: sum_i weights[i] * f(points[i]).
struct QuadRule {
  Eigen::VectorXd points;
  Eigen::VectorXd weights;

  [[nodiscard]] int size() const { return static_cast<int>(points.size()); }

  template <class F>
  double integrate(F&& f) const {
    double acc = 0.0;
    for (int i = 0; i < size(); ++i) acc += weights[i] * f(points[i]);
    return acc;
  }
};

/// n-point Gauss–Legendre rule on (-1, 1), computed by the Golub–Welsch
/// eigenvalue method.  Nodes ascend; weights are positive and sum to 2.
QuadRule gauss_legendre(int n);

/// Gauss–Legendre rule mapped to (a, b).
QuadRule gauss_legendre_on(int n, double a, double b);

/// Composite rule: `panels` equal Gauss–Legendre panels of `points_per_panel`
/// points on (a, b).
QuadRule composite_gauss(int points_per_panel, int panels, double a, double b);

/// Rule on (a, b) refined geometrically toward the endpoint `toward` (which
/// must equal a or b).  The interval is split into `levels` subcells whose
/// widths shrink by `ratio` toward the singular endpoint; each carries a
/// Gauss–Legendre panel.  The residual sliver next to the endpoint (relative
/// width ratio^levels) is dropped; that is what makes integrable endpoint
/// singularities x^s, s > -1, converge: with ratio 0.25 and 160 levels the
/// dropped mass is below 1e-9 relative even for s = -0.9.
QuadRule geometric_endpoint_rule(double a, double b, double toward,
                                 int levels = 160, double ratio = 0.25,
                                 int points_per_cell = 12);

/// Concatenate rules (points and weights appended in order).
QuadRule concat(const QuadRule& r1, const QuadRule& r2);

} // namespace grushin
