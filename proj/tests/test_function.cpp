#include "doctest.h"

#include <grushin/cutoff.hpp>
#include <grushin/function.hpp>

#include <cmath>
#include <memory>

using namespace grushin;

namespace {

// Independent quintic smoothstep: the cutoff is 1 - s((|x|-1/2)/(1/4)) on the
// transition band, with s(u) = 6u^5 - 15u^4 + 10u^3.
double oracle_cutoff(double x) {
  const double r = std::abs(x);
  if (r <= 0.5) return 1.0;
  if (r >= 0.75) return 0.0;
  const double u = (r - 0.5) / 0.25;
  return 1.0 - ((6.0 * u - 15.0) * u + 10.0) * u * u * u;
}

double oracle_profile(const SingularCoeffs& s, double nu, double x) {
  const double r = std::abs(x);
  const double c1 = x < 0.0 ? s.c1m : s.c1p;
  const double c2 = x < 0.0 ? s.c2m : s.c2p;
  return c1 * std::pow(r, nu + 0.5) + c2 * std::pow(r, -nu + 0.5);
}

Function1D hermite_interpolant(const std::shared_ptr<const Grid1D>& g, double nu,
                               double (*p)(double), double (*dp)(double)) {
  Eigen::VectorXd dofs(2 * g->n_nodes());
  for (int i = 0; i < g->n_nodes(); ++i) {
    dofs[2 * i] = p(g->node(i));
    dofs[2 * i + 1] = dp(g->node(i));
  }
  return Function1D(g, nu, std::move(dofs), SingularCoeffs{});
}

double cubic(double x) { return x * x * x - x; }
double dcubic(double x) { return 3.0 * x * x - 1.0; }
double d2cubic(double x) { return 6.0 * x; }

} // namespace

TEST_SUITE("funcspace") {

TEST_CASE("spline reproduces a global cubic exactly") {
  const auto g = build_grid(16, 2.0);
  const Function1D f = hermite_interpolant(g, 0.5, &cubic, &dcubic);
  for (const double x : {-0.97, -0.71, -0.3, -0.001, 0.0, 0.02, 0.33, 0.5, 0.8, 0.999}) {
    CAPTURE(x);
    CHECK(f.value(x) == doctest::Approx(cubic(x)).epsilon(1e-13).scale(1.0));
    CHECK(f.deriv(x) == doctest::Approx(dcubic(x)).epsilon(1e-12).scale(1.0));
    CHECK(f.regular_second_deriv(x) ==
          doctest::Approx(d2cubic(x)).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("singular part evaluates cutoff times profile") {
  const auto g = build_grid(16, 2.0);
  const double nu = 0.3;
  const SingularCoeffs s{0.7, -0.3, 0.2, 0.5};
  const Function1D f(g, nu, Eigen::VectorXd::Zero(2 * g->n_nodes()), s);
  for (const double x : {-0.72, -0.6, -0.3, -0.05, 0.04, 0.3, 0.55, 0.68}) {
    CAPTURE(x);
    const double want = oracle_cutoff(x) * oracle_profile(s, nu, x);
    CHECK(f.value(x) == doctest::Approx(want).epsilon(1e-13).scale(1.0));
    CHECK(f.singular_value(x) == doctest::Approx(want).epsilon(1e-13).scale(1.0));
    CHECK(f.profile_value(x) ==
          doctest::Approx(oracle_profile(s, nu, x)).epsilon(1e-13).scale(1.0));
  }
  // Outside the cutoff support the singular part is identically zero.
  CHECK(f.value(0.8) == 0.0);
  CHECK(f.value(-0.9) == 0.0);
  CHECK(f.singular_deriv(0.76) == 0.0);
}

TEST_CASE("profile derivative matches the analytic power rule") {
  const auto g = build_grid(16, 2.0);
  const double nu = 0.45;
  const SingularCoeffs s{1.0, 0.5, -2.0, 0.25};
  const Function1D f(g, nu, Eigen::VectorXd::Zero(2 * g->n_nodes()), s);
  for (const double x : {-0.4, -0.01, 0.2, 0.49}) {
    CAPTURE(x);
    const double r = std::abs(x);
    const double sgn = x < 0.0 ? -1.0 : 1.0;
    const double c1 = x < 0.0 ? s.c1m : s.c1p;
    const double c2 = x < 0.0 ? s.c2m : s.c2p;
    const double want = sgn * ((nu + 0.5) * c1 * std::pow(r, nu - 0.5) +
                               (-nu + 0.5) * c2 * std::pow(r, -nu - 0.5));
    // Inside the plateau the cutoff is 1, so singular and profile agree.
    CHECK(f.profile_deriv(x) == doctest::Approx(want).epsilon(1e-12));
    CHECK(f.singular_deriv(x) == doctest::Approx(want).epsilon(1e-12));
    CHECK(f.deriv(x) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("evaluation at the singular point") {
  const auto g = build_grid(16, 2.0);
  Eigen::VectorXd dofs = Eigen::VectorXd::Zero(2 * g->n_nodes());
  dofs[2 * g->center_node()] = 3.5; // spline value at x = 0
  const Function1D ok(g, 0.3, dofs, SingularCoeffs{0.4, 0.0, -1.0, 0.0});
  CHECK(ok.value(0.0) == 3.5); // x^{nu+1/2} vanishes at 0
  // Below nu = 1/2 both profile branches vanish at 0; the derivative of
  // either branch is unbounded there.
  const Function1D low(g, 0.3, dofs, SingularCoeffs{0.0, 1e-12, 0.0, 0.0});
  CHECK(low.value(0.0) == 3.5);
  CHECK_THROWS_AS((void)low.deriv(0.0), std::domain_error);
  CHECK_THROWS_AS((void)ok.deriv(0.0), std::domain_error);
  // Above nu = 1/2 the c2 branch |x|^{1/2-nu} itself blows up.
  const Function1D bad(g, 0.75, dofs, SingularCoeffs{0.0, 1e-12, 0.0, 0.0});
  CHECK_THROWS_AS((void)bad.value(0.0), std::domain_error);
  const Function1D c1only(g, 0.75, dofs, SingularCoeffs{0.4, 0.0, -1.0, 0.0});
  CHECK(c1only.value(0.0) == 3.5);
  CHECK(c1only.deriv(0.0) == 0.0); // c1 (nu+1/2) |x|^{nu-1/2} -> 0
  // At nu = 1/2 exactly: c2 branch is the constant 1, c1 branch is c1 |x|.
  const Function1D half(g, 0.5, dofs, SingularCoeffs{0.0, 2.0, 0.0, 2.0});
  CHECK(half.value(0.0) == 5.5);
  CHECK(half.deriv(0.0) == 0.0);
  const Function1D kink(g, 0.5, dofs, SingularCoeffs{1.0, 0.0, 1.0, 0.0});
  CHECK_THROWS_AS((void)kink.deriv(0.0), std::domain_error);
}

TEST_CASE("split-regular component subtracts the full profile") {
  const auto g = build_grid(16, 2.0);
  const double nu = 0.25;
  const SingularCoeffs s{0.0, 1.0, 0.5, -0.5};
  const Function1D f(g, nu, Eigen::VectorXd::Zero(2 * g->n_nodes()), s);
  // On the plateau (cutoff == 1) the split-regular part vanishes.
  CHECK(f.split_regular_value(0.3) == 0.0);
  CHECK(f.split_regular_deriv(-0.45) == 0.0);
  // Beyond the support it is minus the raw profile.
  for (const double x : {-0.9, 0.8}) {
    CAPTURE(x);
    CHECK(f.split_regular_value(x) ==
          doctest::Approx(-oracle_profile(s, nu, x)).epsilon(1e-13));
  }
}

TEST_CASE("mirroring") {
  const auto g = build_grid(16, 2.0);
  Eigen::VectorXd dofs = Eigen::VectorXd::Zero(2 * g->n_nodes());
  for (int i = 0; i < g->n_nodes(); ++i) {
    const double x = g->node(i);
    dofs[2 * i] = x * x * x;
    dofs[2 * i + 1] = 3.0 * x * x;
  }
  const Function1D f(g, 0.4, dofs, SingularCoeffs{1.0, 2.0, 3.0, 4.0});
  const Function1D m = f.mirrored();
  for (const double x : {-0.8, -0.33, -0.1, 0.05, 0.6, 0.9}) {
    CAPTURE(x);
    CHECK(m.value(x) == doctest::Approx(f.value(-x)).epsilon(1e-13).scale(1.0));
  }
  CHECK(m.sing().c1m == 3.0);
  CHECK(m.sing().c2m == 4.0);
  CHECK(m.sing().c1p == 1.0);
  CHECK(m.sing().c2p == 2.0);
}

TEST_CASE("inner product against a closed-form moment") {
  const auto g = build_grid(32, 2.0);
  const Function1D f = hermite_interpolant(g, 0.5, &cubic, &dcubic);
  // int_{-1}^{1} (x^3 - x)^2 dx = 16/105.
  CHECK(inner_product(f, f) == doctest::Approx(16.0 / 105.0).epsilon(1e-13));
  CHECK(l2_norm(f) == doctest::Approx(std::sqrt(16.0 / 105.0)).epsilon(1e-13));

  const auto g2 = build_grid(16, 2.0);
  const Function1D h(g2, 0.5, Eigen::VectorXd::Zero(2 * g2->n_nodes()),
                     SingularCoeffs{});
  CHECK_THROWS_AS((void)inner_product(f, h), std::invalid_argument);
}

TEST_CASE("domain check flags violated and satisfied conditions") {
  const auto g = build_grid(32, 2.0);
  const ExtensionSpec spec = designed_extension(0.3);
  const Eigen::Matrix2d map = transmission_map(spec).map;

  // Conforming: zero spline except an interior bump, mapped singular coeffs.
  Eigen::VectorXd dofs = Eigen::VectorXd::Zero(2 * g->n_nodes());
  dofs[2 * (g->center_node() / 2) + 0] = 1.0;
  const Eigen::Vector2d cm(0.7, -0.2);
  const Eigen::Vector2d cp = map * cm;
  const Function1D ok(g, 0.3, dofs, SingularCoeffs{cm[0], cm[1], cp[0], cp[1]});
  CHECK(domain_check(ok, spec).within(1e-12));

  // Violations: boundary value, center clamp, transmission.
  Eigen::VectorXd bad = dofs;
  bad[0] = 0.5;                        // f(-1) != 0
  bad[2 * g->center_node() + 1] = 2.0; // spline slope at 0
  const Function1D no(g, 0.3, bad, SingularCoeffs{1.0, 0.0, 1.0, 0.0});
  const DomainCheckReport rep = domain_check(no, spec);
  CHECK(rep.dirichlet_minus == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(rep.regular_slope_at_0 == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(rep.transmission.cwiseAbs().maxCoeff() > 0.1);
  CHECK_FALSE(rep.within(1e-6));
}

TEST_CASE("singular coefficient fit recovers exact profiles") {
  const auto g = build_grid(64, 2.0);
  const double nu = 0.35;
  const SingularCoeffs want{0.8, -0.6, 1.4, 0.3};
  const auto callable = [&](double x) { return oracle_profile(want, nu, x); };
  const SingularCoeffs got = fit_singular_coeffs(callable, *g, nu);
  CHECK(got.c1m == doctest::Approx(want.c1m).epsilon(1e-9));
  CHECK(got.c2m == doctest::Approx(want.c2m).epsilon(1e-9));
  CHECK(got.c1p == doctest::Approx(want.c1p).epsilon(1e-9));
  CHECK(got.c2p == doctest::Approx(want.c2p).epsilon(1e-9));

  // A smooth double-zero contamination only nudges the fit: the sampling
  // cells are tiny and the profiles dominate there.
  const auto dirty = [&](double x) { return callable(x) + x * x * (1.0 - x); };
  const SingularCoeffs gd = fit_singular_coeffs(dirty, *g, nu);
  CHECK(gd.c2m == doctest::Approx(want.c2m).epsilon(1e-2));
  CHECK(gd.c2p == doctest::Approx(want.c2p).epsilon(1e-2));
}

} // TEST_SUITE
