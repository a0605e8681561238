#pragma once

#include "grushin/grid.hpp"

#include <Eigen/Dense>

namespace grushin {

// Cubic Hermite shape functions on a cell of width h, written in the factored
// two-sided form (u = distance from the left node, w = distance from the right
// node, both in cell units).  The factored form matters: shapes vanish to
// second order at one end, and the monomial form 2t^3 - 3t^2 + 1 cancels
// catastrophically there, which the inverse-square potential then amplifies by
// 1/x^2 at quadrature points arbitrarily close to the center node.
//
// Index order within a cell: {value_left, slope_left, value_right, slope_right}.
struct HermiteShapes {
  double val[4];
  double d1[4]; // d/dx
  double d2[4]; // d^2/dx^2
};

inline HermiteShapes hermite_shapes(double u, double w, double h) {
  HermiteShapes s{};
  s.val[0] = w * w * (1.0 + 2.0 * u);
  s.val[1] = h * u * w * w;
  s.val[2] = u * u * (1.0 + 2.0 * w);
  s.val[3] = -h * u * u * w;
  s.d1[0] = -6.0 * u * w / h;
  s.d1[1] = w * (1.0 - 3.0 * u);
  s.d1[2] = 6.0 * u * w / h;
  s.d1[3] = u * (3.0 * u - 2.0);
  s.d2[0] = 6.0 * (u - w) / (h * h);
  s.d2[1] = (2.0 * u - 4.0 * w) / h;
  s.d2[2] = 6.0 * (w - u) / (h * h);
  s.d2[3] = (4.0 * u - 2.0 * w) / h;
  return s;
}

inline HermiteShapes hermite_shapes_at(const Grid1D& grid, int cell, double x) {
  const double h = grid.cell_width(cell);
  const double u = (x - grid.cell_lo(cell)) / h;
  const double w = (grid.cell_hi(cell) - x) / h;
  return hermite_shapes(u, w, h);
}

/// Evaluate a C^1 cubic Hermite spline given per-node (value, slope) DOFs
/// (layout dofs[2i] = value at node i, dofs[2i+1] = slope at node i).
/// deriv selects the value (0), first (1) or second (2) derivative.
inline double hermite_eval(const Grid1D& grid, const Eigen::VectorXd& dofs,
                           double x, int deriv = 0) {
  const int k = grid.find_cell(x);
  const HermiteShapes s = hermite_shapes_at(grid, k, x);
  const double* row = (deriv == 0 ? s.val : deriv == 1 ? s.d1 : s.d2);
  return row[0] * dofs[2 * k] + row[1] * dofs[2 * k + 1] +
         row[2] * dofs[2 * k + 2] + row[3] * dofs[2 * k + 3];
}

} // namespace grushin
