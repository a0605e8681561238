#include "grushin/grid.hpp"

#include "grushin/cutoff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace grushin {

namespace {

constexpr int kBulkPoints = 12;       // Gauss–Legendre points per analytic panel
constexpr int kEndLevels = 160;       // geometric levels on the cells touching 0
constexpr double kEndRatio = 0.25;    // geometric shrink factor toward 0
constexpr int kEndPoints = 12;        // points per geometric subcell

// Panel boundaries where the cutoff switches polynomial pieces; quadrature
// panels never straddle them so every panel integrand is analytic.
constexpr double kBreakpoints[] = {-cutoff_support, -cutoff_plateau,
                                   cutoff_plateau, cutoff_support};

// Gauss–Legendre panels on (lo, hi), split at any cutoff junction strictly
// inside the interval.
QuadRule analytic_panels(double lo, double hi, int pts) {
  std::vector<double> edges{lo};
  for (double b : kBreakpoints)
    if (b > lo && b < hi) edges.push_back(b);
  edges.push_back(hi);
  QuadRule rule;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    rule = concat(rule, gauss_legendre_on(pts, edges[i], edges[i + 1]));
  return rule;
}

} // namespace

Grid1D::Grid1D(int n_cells, double grading_exponent) : grading_(grading_exponent) {
  if (n_cells < 4 || n_cells % 2 != 0)
    throw std::invalid_argument("Grid1D: n_cells must be even and >= 4");
  if (!(grading_exponent >= 1.0))
    throw std::invalid_argument("Grid1D: grading exponent must be >= 1");

  const int m = n_cells / 2;
  nodes_.resize(n_cells + 1);
  for (int k = -m; k <= m; ++k) {
    const double t = std::pow(static_cast<double>(std::abs(k)) / m, grading_exponent);
    nodes_[k + m] = (k < 0 ? -t : t);
  }
  nodes_[0] = -1.0;
  nodes_[m] = 0.0;
  nodes_[2 * m] = 1.0;

  rules_.reserve(n_cells);
  for (int k = 0; k < n_cells; ++k) {
    const double lo = nodes_[k], hi = nodes_[k + 1];
    if (k == m - 1) { // cell (x_{-1}, 0): refine toward the right endpoint 0
      rules_.push_back(geometric_endpoint_rule(lo, hi, hi, kEndLevels, kEndRatio, kEndPoints));
    } else if (k == m) { // cell (0, x_1): refine toward the left endpoint 0
      rules_.push_back(geometric_endpoint_rule(lo, hi, lo, kEndLevels, kEndRatio, kEndPoints));
    } else {
      rules_.push_back(analytic_panels(lo, hi, kBulkPoints));
    }
  }
}

int Grid1D::find_cell(double x) const {
  if (x < -1.0 || x > 1.0)
    throw std::invalid_argument("Grid1D::find_cell: x outside [-1, 1]");
  const auto begin = nodes_.data();
  const auto end = nodes_.data() + nodes_.size();
  int k = static_cast<int>(std::upper_bound(begin, end, x) - begin) - 1;
  return std::clamp(k, 0, n_cells() - 1);
}

QuadRule Grid1D::quadrature_on_interval(double a, double b) const {
  if (!(a < b))
    throw std::invalid_argument("Grid1D::quadrature_on_interval: need a < b");
  a = std::max(a, -1.0);
  b = std::min(b, 1.0);
  const int m = center_node();
  QuadRule rule;
  for (int k = 0; k < n_cells(); ++k) {
    const double lo = std::max(cell_lo(k), a);
    const double hi = std::min(cell_hi(k), b);
    if (!(lo < hi)) continue;
    const bool full = (lo == cell_lo(k) && hi == cell_hi(k));
    if (full) {
      rule = concat(rule, rules_[k]);
    } else if (k == m - 1 && hi == 0.0) {
      rule = concat(rule, geometric_endpoint_rule(lo, hi, hi, kEndLevels, kEndRatio, kEndPoints));
    } else if (k == m && lo == 0.0) {
      rule = concat(rule, geometric_endpoint_rule(lo, hi, lo, kEndLevels, kEndRatio, kEndPoints));
    } else {
      rule = concat(rule, analytic_panels(lo, hi, 16));
    }
  }
  return rule;
}

std::shared_ptr<const Grid1D> build_grid(int n_cells, double grading_exponent) {
  return std::make_shared<const Grid1D>(n_cells, grading_exponent);
}

} // namespace grushin
