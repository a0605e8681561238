#include "grushin/quadrature.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace grushin {

namespace {

// Cache of reference Gauss–Legendre rules; they are requested with the same
// handful of sizes over and over during assembly.
const QuadRule& gauss_legendre_cached(int n) {
  static std::map<int, QuadRule> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  // Golub–Welsch: nodes are eigenvalues of the symmetric tridiagonal Jacobi
  // matrix with off-diagonal b_k = k / sqrt(4k^2 - 1); the weight of node i is
  // 2 * (first eigenvector component)^2.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = b;
    J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  QuadRule rule;
  rule.points = es.eigenvalues();
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    rule.weights[i] = 2.0 * v0 * v0;
  }
  // The eigensolve leaves the mirror symmetry of the rule accurate only to
  // roundoff; enforce it exactly so mapped rules on symmetric intervals treat
  // both sides identically.
  for (int i = 0, j = n - 1; i < j; ++i, --j) {
    const double p = 0.5 * (rule.points[j] - rule.points[i]);
    rule.points[i] = -p;
    rule.points[j] = p;
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.weights[i] = w;
    rule.weights[j] = w;
  }
  if (n % 2 == 1) rule.points[n / 2] = 0.0;
  return cache.emplace(n, std::move(rule)).first->second;
}

} // namespace

QuadRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need n >= 1");
  return gauss_legendre_cached(n);
}

QuadRule gauss_legendre_on(int n, double a, double b) {
  const QuadRule& ref = gauss_legendre_cached(n);
  QuadRule rule;
  rule.points = (0.5 * (b - a) * ref.points.array() + 0.5 * (a + b)).matrix();
  rule.weights = 0.5 * (b - a) * ref.weights;
  return rule;
}

QuadRule composite_gauss(int points_per_panel, int panels, double a, double b) {
  if (panels < 1) throw std::invalid_argument("composite_gauss: need panels >= 1");
  QuadRule rule;
  rule.points.resize(points_per_panel * panels);
  rule.weights.resize(points_per_panel * panels);
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    QuadRule panel = gauss_legendre_on(points_per_panel, a + p * h, a + (p + 1) * h);
    rule.points.segment(p * points_per_panel, points_per_panel) = panel.points;
    rule.weights.segment(p * points_per_panel, points_per_panel) = panel.weights;
  }
  return rule;
}

QuadRule geometric_endpoint_rule(double a, double b, double toward, int levels,
                                 double ratio, int points_per_cell) {
  if (!(a < b)) throw std::invalid_argument("geometric_endpoint_rule: need a < b");
  if (toward != a && toward != b)
    throw std::invalid_argument("geometric_endpoint_rule: toward must be an endpoint");
  if (!(ratio > 0.0 && ratio < 1.0))
    throw std::invalid_argument("geometric_endpoint_rule: ratio must lie in (0,1)");

  const double len = b - a;
  QuadRule rule;
  rule.points.resize(levels * points_per_cell);
  rule.weights.resize(levels * points_per_cell);
  // Subcell k spans distances (len*ratio^{k+1}, len*ratio^k) from `toward`.
  for (int k = 0; k < levels; ++k) {
    const double d_far = len * std::pow(ratio, k);
    const double d_near = len * std::pow(ratio, k + 1);
    double lo, hi;
    if (toward == a) {
      lo = a + d_near;
      hi = a + d_far;
    } else {
      lo = b - d_far;
      hi = b - d_near;
    }
    QuadRule panel = gauss_legendre_on(points_per_cell, lo, hi);
    rule.points.segment(k * points_per_cell, points_per_cell) = panel.points;
    rule.weights.segment(k * points_per_cell, points_per_cell) = panel.weights;
  }
  return rule;
}

QuadRule concat(const QuadRule& r1, const QuadRule& r2) {
  QuadRule rule;
  rule.points.resize(r1.size() + r2.size());
  rule.weights.resize(r1.size() + r2.size());
  rule.points << r1.points, r2.points;
  rule.weights << r1.weights, r2.weights;
  return rule;
}

} // namespace grushin
