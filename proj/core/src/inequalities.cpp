#include "grushin/inequalities.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <utility>

#include "grushin/extension.hpp"
#include "grushin/parallel.hpp"

namespace grushin {

namespace {

// Exponent below which e^{arg} is treated as exact zero.  exp(-700) ~ 1e-304
// is already denormal territory; everything discarded is far below any
// representable relative contribution.
constexpr double kUnderflowArg = -700.0;

// Relative slack granted to the right-hand side of an inequality check.
constexpr double kIneqSlack = 1e-10;

QuadRule half_rule_toward_zero() {
  return geometric_endpoint_rule(0.0, 1.0, 0.0, 160, 0.25, 12);
}

} // namespace

// ---------------------------------------------------------------------------
// Poly

Poly::Poly(std::initializer_list<double> coeffs)
    : c(Eigen::Map<const Eigen::VectorXd>(coeffs.begin(),
                                          static_cast<long>(coeffs.size()))) {}

bool Poly::is_zero() const {
  for (int i = 0; i < c.size(); ++i)
    if (c[i] != 0.0) return false;
  return true;
}

double Poly::operator()(double x) const {
  double acc = 0.0;
  for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i)
    acc = acc * x + c[i];
  return acc;
}

Poly Poly::deriv() const {
  if (c.size() <= 1) return Poly{};
  Eigen::VectorXd d(c.size() - 1);
  for (int i = 1; i < c.size(); ++i) d[i - 1] = i * c[i];
  return Poly(std::move(d));
}

Poly Poly::scaled(double a) const { return Poly(Eigen::VectorXd(a * c)); }

Poly operator*(const Poly& a, const Poly& b) {
  if (a.c.size() == 0 || b.c.size() == 0) return Poly{};
  Eigen::VectorXd out = Eigen::VectorXd::Zero(a.c.size() + b.c.size() - 1);
  for (int i = 0; i < a.c.size(); ++i)
    for (int j = 0; j < b.c.size(); ++j) out[i + j] += a.c[i] * b.c[j];
  return Poly(std::move(out));
}

Poly operator+(const Poly& a, const Poly& b) {
  const long n = std::max(a.c.size(), b.c.size());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  out.head(a.c.size()) += a.c;
  out.head(b.c.size()) += b.c;
  return Poly(std::move(out));
}

// ---------------------------------------------------------------------------
// Test functions

SpaceTestFunction::SpaceTestFunction(Poly q_factor) : q(std::move(q_factor)) {
  w = Poly{1.0, -1.0} * q;
  u = w.scaled(2.0) + Poly{0.0, 1.0} * w.deriv();
}

double PinnedTestFunction::deriv(double x) const {
  return q(x) + x * q.deriv()(x);
}

// ---------------------------------------------------------------------------
// Hardy checks

HardyReport hardy_check(const SpaceTestFunction& z, double alpha) {
  if (!(alpha >= -2.0 && alpha < 2.0))
    throw std::invalid_argument("hardy_check: alpha must lie in [-2, 2)");
  const QuadRule rule = half_rule_toward_zero();
  // z^2 x^{alpha-2} = x^{alpha+2} w^2 and z'^2 x^alpha = x^{alpha+2} u^2,
  // with alpha + 2 >= 0, so no negative power is ever formed.
  const double e = alpha + 2.0;
  double lhs = 0.0;
  double rhs = 0.0;
  for (int i = 0; i < rule.size(); ++i) {
    const double x = rule.points[i];
    const double xe = std::pow(x, e);
    const double wv = z.w(x);
    const double uv = z.u(x);
    lhs += rule.weights[i] * xe * wv * wv;
    rhs += rule.weights[i] * xe * uv * uv;
  }
  if (!std::isfinite(lhs) || !std::isfinite(rhs))
    throw std::runtime_error("hardy_check: non-finite integral");
  HardyReport rep;
  rep.lhs = lhs;
  rep.rhs = rhs;
  rep.constant = 0.25 * (1.0 - alpha) * (1.0 - alpha);
  rep.satisfied = rep.constant * lhs <= rhs * (1.0 + kIneqSlack);
  return rep;
}

HardyReport hardy_interval_check(const PinnedTestFunction& z, bool symmetric) {
  QuadRule rule = half_rule_toward_zero();
  if (symmetric)
    rule = concat(geometric_endpoint_rule(-1.0, 0.0, 0.0, 160, 0.25, 12), rule);
  const Poly dq = z.q.deriv();
  double lhs = 0.0;
  double rhs = 0.0;
  for (int i = 0; i < rule.size(); ++i) {
    const double x = rule.points[i];
    const double qv = z.q(x);          // z^2 / x^2 = q^2 exactly
    const double dz = qv + x * dq(x);  // z' = q + x q'
    lhs += rule.weights[i] * qv * qv;
    rhs += rule.weights[i] * dz * dz;
  }
  HardyReport rep;
  rep.lhs = lhs;
  rep.rhs = rhs;
  rep.constant = 0.25;
  rep.satisfied = rep.constant * lhs <= rhs * (1.0 + kIneqSlack);
  return rep;
}

// ---------------------------------------------------------------------------
// Carleman weight and test family

double select_b(double nu) {
  if (!(nu > 0.0 && nu < 1.0))
    throw std::invalid_argument("select_b: nu must lie in (0, 1)");
  return nu <= 0.5 ? 0.5 : 2.0 - 2.0 * nu;
}

CarlemanWeight::CarlemanWeight(double horizon, double strength, double exponent)
    : T(horizon), R(strength), b(exponent) {
  if (!(T > 0.0)) throw std::invalid_argument("CarlemanWeight: T must be > 0");
  if (!(R > 0.0)) throw std::invalid_argument("CarlemanWeight: R must be > 0");
  if (!(b > 0.0 && b < 1.0))
    throw std::invalid_argument("CarlemanWeight: b must lie in (0, 1)");
}

double CarlemanWeight::sigma(double t, double x) const {
  return theta(t) * std::pow(x, b);
}

double CarlemanWeight::weight(double t, double x) const {
  if (t <= 0.0 || t >= T) return 0.0;  // limit value at the time endpoints
  const double arg = -2.0 * R * sigma(t, x);
  return arg < kUnderflowArg ? 0.0 : std::exp(arg);
}

TestFunction1Plus1::TestFunction1Plus1(Poly time_factor, Poly space_factor)
    : p(std::move(time_factor)), q(std::move(space_factor)) {
  dp = p.deriv();
  phi = Poly{0.0, 0.0, 1.0, -1.0} * q;  // x^2 (1 - x) q
  d2phi = phi.deriv().deriv();
  w = Poly{1.0, -1.0} * q;              // phi / x^2, exact
}

// ---------------------------------------------------------------------------
// Carleman sides

CarlemanSides carleman_sides(const TestFunction1Plus1& g, int n, double nu,
                             double gamma, double R, double T,
                             const CarlemanQuadrature& quad) {
  const double b = select_b(nu);  // validates nu
  if (n < 0) throw std::invalid_argument("carleman_sides: n must be >= 0");
  if (!(gamma > 0.0))
    throw std::invalid_argument("carleman_sides: gamma must be > 0");
  if (!(R > 0.0)) throw std::invalid_argument("carleman_sides: R must be > 0");
  if (!(T > 0.0)) throw std::invalid_argument("carleman_sides: T must be > 0");
  if (quad.levels < 1 || quad.points_per_cell < 2 ||
      !(quad.ratio > 0.0 && quad.ratio < 1.0))
    throw std::invalid_argument("carleman_sides: bad quadrature parameters");

  const double cnu = c_of_nu(nu);
  const double freq = n * std::numbers::pi;
  const double kn2 = freq * freq;

  const QuadRule xr = geometric_endpoint_rule(0.0, 1.0, 0.0, quad.levels,
                                              quad.ratio, quad.points_per_cell);
  const QuadRule tr =
      concat(geometric_endpoint_rule(0.0, 0.5 * T, 0.0, quad.levels, quad.ratio,
                                     quad.points_per_cell),
             geometric_endpoint_rule(0.5 * T, T, T, quad.levels, quad.ratio,
                                     quad.points_per_cell));

  // Per-node space data, hoisted out of the time loop.
  const int nx = xr.size();
  Eigen::VectorXd phi_x(nx), d2phi_x(nx), w_x(nx), xb(nx), x2g(nx);
  for (int j = 0; j < nx; ++j) {
    const double x = xr.points[j];
    phi_x[j] = g.phi(x);
    d2phi_x[j] = g.d2phi(x);
    w_x[j] = g.w(x);
    xb[j] = std::pow(x, b);
    x2g[j] = std::pow(x, 2.0 * gamma);
  }

  double lhs = 0.0;
  double rhs = 0.0;
  for (int i = 0; i < tr.size(); ++i) {
    const double t = tr.points[i];
    const double th = 1.0 / (t * (T - t));
    const double th3 = th * th * th;
    // Deep in the endpoint refinement theta^3 can overflow; every surviving
    // weight there is below the underflow threshold, so the row is zero.
    if (!std::isfinite(th3)) continue;
    const double pt = g.p(t);
    const double dpt = g.dp(t);
    const double wt = tr.weights[i];
    for (int j = 0; j < nx; ++j) {
      const double arg = -2.0 * R * th * xb[j];
      if (arg < kUnderflowArg) continue;
      const double W = std::exp(arg);
      const double ww = wt * xr.weights[j] * W;
      const double gv = pt * phi_x[j];
      const double pg =
          dpt * phi_x[j] - pt * d2phi_x[j] + pt * (cnu * w_x[j] + kn2 * x2g[j] * phi_x[j]);
      lhs += ww * th3 * gv * gv;
      rhs += ww * pg * pg;
    }
  }
  if (!std::isfinite(lhs) || !std::isfinite(rhs))
    throw std::runtime_error("carleman_sides: non-finite integral");
  return {lhs, rhs};
}

// ---------------------------------------------------------------------------
// Scan

CarlemanScanResult carleman_scan(const std::vector<TestFunction1Plus1>& family,
                                 const CarlemanScanParams& params,
                                 const Eigen::VectorXd& R_grid) {
  const int nk = static_cast<int>(R_grid.size());
  if (nk < 1) throw std::invalid_argument("carleman_scan: empty R grid");
  for (int k = 0; k < nk; ++k) {
    if (!(R_grid[k] > 0.0) || (k > 0 && !(R_grid[k] > R_grid[k - 1])))
      throw std::invalid_argument(
          "carleman_scan: R grid must be positive and strictly increasing");
  }

  std::vector<int> live;
  for (int m = 0; m < static_cast<int>(family.size()); ++m)
    if (!family[m].is_zero()) live.push_back(m);
  if (live.empty())
    throw std::invalid_argument("carleman_scan: family has no nonzero member");

  const int nm = static_cast<int>(live.size());
  Eigen::MatrixXd ratio(nm, nk);
  parallel_for(
      nm * nk,
      [&](int job) {
        const int mi = job / nk;
        const int k = job % nk;
        const double R = R_grid[k];
        const CarlemanSides s =
            carleman_sides(family[live[mi]], params.n, params.nu, params.gamma,
                           R, params.T, params.quad);
        if (!(s.lhs > 0.0))
          throw std::runtime_error(
              "carleman_scan: weighted mass vanished for a nonzero member");
        ratio(mi, k) = s.rhs / (R * R * R * s.lhs);
      },
      params.n_threads);

  CarlemanScanResult res;
  res.R_grid = R_grid;
  res.c_emp = ratio.colwise().minCoeff().transpose();
  // Threshold at the last grid point attaining the minimum: the infimum of
  // c_emp over R >= R0 is then attained at R0 itself.
  int best = 0;
  for (int k = 1; k < nk; ++k)
    if (res.c_emp[k] <= res.c_emp[best]) best = k;
  res.R0 = R_grid[best];
  res.C0 = res.c_emp[best];
  if (!(res.C0 > 0.0))
    throw std::runtime_error("carleman_scan: empirical constant is not positive");
  return res;
}

std::vector<TestFunction1Plus1> standard_family(double T, int count,
                                                unsigned seed) {
  if (!(T > 0.0)) throw std::invalid_argument("standard_family: T must be > 0");
  if (count < 1) throw std::invalid_argument("standard_family: count must be >= 1");
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<TestFunction1Plus1> fam;
  fam.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double a1 = unit(rng);
    const double b1 = unit(rng);
    const double b2 = unit(rng);
    Poly p = Poly{0.0, T, -1.0} * Poly{1.0, a1};  // t (T - t) (1 + a1 t)
    Poly q{1.0, b1, b2};
    fam.emplace_back(std::move(p), std::move(q));
  }
  return fam;
}

} // namespace grushin
