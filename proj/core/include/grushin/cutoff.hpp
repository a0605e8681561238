#pragma once

#include <cmath>

namespace grushin {

// Fixed even C^2 cutoff used to localize the singular profiles around x = 0:
// identically 1 on [-1/2, 1/2], identically 0 outside (-3/4, 3/4), quintic
// smoothstep in between (value/slope/curvature match at both junctions).
inline constexpr double cutoff_plateau = 0.5;
inline constexpr double cutoff_support = 0.75;

inline double cutoff_value(double x) {
  const double r = std::abs(x);
  if (r <= cutoff_plateau) return 1.0;
  if (r >= cutoff_support) return 0.0;
  const double u = (r - cutoff_plateau) / (cutoff_support - cutoff_plateau);
  return 1.0 - u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

inline double cutoff_deriv(double x) {
  const double r = std::abs(x);
  if (r <= cutoff_plateau || r >= cutoff_support) return 0.0;
  const double w = cutoff_support - cutoff_plateau;
  const double u = (r - cutoff_plateau) / w;
  const double ds = 30.0 * u * u * (1.0 + u * (-2.0 + u)); // s'(u), s = quintic smoothstep
  return (x > 0 ? -1.0 : 1.0) * ds / w;
}

inline double cutoff_second_deriv(double x) {
  const double r = std::abs(x);
  if (r <= cutoff_plateau || r >= cutoff_support) return 0.0;
  const double w = cutoff_support - cutoff_plateau;
  const double u = (r - cutoff_plateau) / w;
  const double d2s = 60.0 * u * (1.0 + u * (-3.0 + 2.0 * u)); // s''(u)
  return -d2s / (w * w);
}

} // namespace grushin
