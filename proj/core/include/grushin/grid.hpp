#pragma once

#include <Eigen/Dense>

#include "grushin/quadrature.hpp"

#include <memory>
#include <vector>

namespace grushin {

/// Symmetric graded mesh of (-1, 1) with a node pinned at 0 and per-cell
/// quadrature able to integrate the x^{1-2nu} singular products arising from
/// the inverse-square potential, uniformly over the supported nu clamp.
///
/// Nodes are +-(k/m)^g for k = 0..m with m = n_cells/2 and g the grading
/// exponent, so cell widths shrink like (k/m)^{g-1}/m toward the center.
/// The two cells touching 0 carry geometric-subdivision rules anchored at 0;
/// the other cells carry Gauss–Legendre panels split at the cutoff junctions
/// +-1/2 and +-3/4 so every panel sees an analytic integrand.
class Grid1D {
public:
  Grid1D(int n_cells, double grading_exponent);

  [[nodiscard]] int n_cells() const { return static_cast<int>(nodes_.size()) - 1; }
  [[nodiscard]] int n_nodes() const { return static_cast<int>(nodes_.size()); }
  [[nodiscard]] double node(int i) const { return nodes_[i]; }
  [[nodiscard]] const Eigen::VectorXd& nodes() const { return nodes_; }
  [[nodiscard]] double grading() const { return grading_; }
  /// Index of the node at x = 0.
  [[nodiscard]] int center_node() const { return n_cells() / 2; }

  [[nodiscard]] double cell_lo(int k) const { return nodes_[k]; }
  [[nodiscard]] double cell_hi(int k) const { return nodes_[k + 1]; }
  [[nodiscard]] double cell_width(int k) const { return nodes_[k + 1] - nodes_[k]; }

  /// Cell index containing x (cells are half-open [lo, hi), last cell closed).
  [[nodiscard]] int find_cell(double x) const;

  /// Quadrature rule attached to cell k.
  [[nodiscard]] const QuadRule& cell_rule(int k) const { return rules_[k]; }

  /// Integrate a callable over (-1, 1).
  template <class F>
  double integrate(F&& f) const {
    double acc = 0.0;
    for (const QuadRule& r : rules_) acc += r.integrate(f);
    return acc;
  }

  /// Integrate a callable over (a, b) \subset [-1, 1].  Full interior cells
  /// reuse their rules; clipped cells get fresh panels (geometric toward 0
  /// when the clipped piece touches the center node).
  template <class F>
  double integrate_interval(double a, double b, F&& f) const {
    return quadrature_on_interval(a, b).integrate(f);
  }

  /// Build the composite rule used by integrate_interval.
  [[nodiscard]] QuadRule quadrature_on_interval(double a, double b) const;

private:
  Eigen::VectorXd nodes_;
  double grading_;
  std::vector<QuadRule> rules_;
};

/// Shared-handle factory (functions and operators hold the grid jointly):
/// n_cells must be even >= 4, grading_exponent >= 1.
std::shared_ptr<const Grid1D> build_grid(int n_cells, double grading_exponent);

} // namespace grushin
