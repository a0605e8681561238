#include "doctest.h"

#include <grushin/operator.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace grushin;

namespace {

constexpr double pi = std::numbers::pi;

// ---------------------------------------------------------------------------
// Oracle 1: a piecewise cubic in the discrete space with closed-form moments.
//   f(x) = x^2 - |x|^3,  f(+-1) = 0, f(0) = f'(0) = 0.
// Hand-computed integrals over (-1,1):
//   int (-f'') f        = 4/15
//   int f^2 / x^2       = 1/15
//   int |x|^{2} f^2     = 1/126      (gamma = 1)
//   int f^2             = 2/105
//   int (f')^2          = 4/15
double fcub(double x) { return x * x - std::abs(x) * x * x; }

// ---------------------------------------------------------------------------
// Oracle 2 (nu = 1/2): profiles are |x| and 1, so members behave near 0 like
//   f(0^-)=c2m, f'(0^-)=-c1m, f(0^+)=c2p, f'(0^+)=c1p.
// The even family (c1 + c2 = 0 at 0^+) reduces to tan k = k; the odd family
// ((nu+1/2)c1 + (-nu+1/2)c2 = 0, i.e. c1 = 0) to cos k = 0.  The coupled
// spectrum is the union of both families plus the kernel function
// |x|^{nu+1/2} - |x|^{-nu+1/2} at lambda = 0.
double tan_eq_k_root(int j) {
  double k = j * pi + std::atan(1.0);
  for (int it = 0; it < 200; ++it) k = j * pi + std::atan(k);
  return k;
}

// ---------------------------------------------------------------------------
// Oracle 3 (general nu): on each side the eigenfunctions are
// sqrt|x| (a J_nu(k|x|) + b J_{-nu}(k|x|)), whose singular coefficients are
// c1 = a (k/2)^nu / Gamma(1+nu), c2 = b (k/2)^{-nu} / Gamma(1-nu).  Scalar
// eigenvalue conditions with the outer Dirichlet constraint f(1) = 0:
//   even family  (c1 + c2 = 0):                 beta J_nu(k) - alpha J_-nu(k) = 0
//   odd  family  ((nu+.5)c1 + (-nu+.5)c2 = 0):  (.5-nu) beta J_nu(k)
//                                                - (.5+nu) alpha J_-nu(k) = 0
// with alpha = (k/2)^nu/Gamma(1+nu), beta = (k/2)^{-nu}/Gamma(1-nu).
double bessel_j_neg(double nu, double x) {
  return std::cos(nu * pi) * std::cyl_bessel_j(nu, x) -
         std::sin(nu * pi) * std::cyl_neumann(nu, x);
}

double family_condition(double nu, double k, bool even) {
  const double alpha = std::pow(0.5 * k, nu) / std::tgamma(1.0 + nu);
  const double beta = std::pow(0.5 * k, -nu) / std::tgamma(1.0 - nu);
  const double jn = std::cyl_bessel_j(nu, k);
  const double jm = bessel_j_neg(nu, k);
  if (even) return beta * jn - alpha * jm;
  return (0.5 - nu) * beta * jn - (0.5 + nu) * alpha * jm;
}

std::vector<double> family_eigenvalues(double nu, bool even, int count) {
  std::vector<double> out;
  double prev_k = 0.05, prev_v = family_condition(nu, prev_k, even);
  for (double k = 0.07; k < 40.0 && static_cast<int>(out.size()) < count;
       k += 0.02) {
    const double v = family_condition(nu, k, even);
    if (prev_v == 0.0) {
      out.push_back(prev_k * prev_k);
    } else if (v * prev_v < 0.0) {
      double lo = prev_k, hi = k;
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (family_condition(nu, mid, even) * family_condition(nu, lo, even) <= 0.0)
          hi = mid;
        else
          lo = mid;
      }
      const double kr = 0.5 * (lo + hi);
      out.push_back(kr * kr);
    }
    prev_k = k;
    prev_v = v;
  }
  return out;
}

std::vector<double> merged_spectrum_with_kernel(double nu, int count) {
  const auto ev = family_eigenvalues(nu, true, count);
  const auto od = family_eigenvalues(nu, false, count);
  std::vector<double> all = {0.0}; // kernel: |x|^{nu+1/2} - |x|^{-nu+1/2}
  all.insert(all.end(), ev.begin(), ev.end());
  all.insert(all.end(), od.begin(), od.end());
  std::sort(all.begin(), all.end());
  all.resize(count);
  return all;
}

Eigen::VectorXd coeffs_of(const Operator1D& op,
                          const std::function<double(double)>& f) {
  return op.project(f);
}

} // namespace

TEST_SUITE("operator1d") {

TEST_CASE("closed-form quadratic forms of an in-space piecewise cubic") {
  const auto g = build_grid(64, 2.0);
  const int n = 3;
  const double gamma = 1.0;
  for (const double nu : {0.1, 0.3, 0.5, 0.75, 0.9}) {
    CAPTURE(nu);
    const Operator1D op = assemble(g, designed_extension(nu), n, gamma);
    const Eigen::VectorXd c = coeffs_of(op, &fcub);

    const Function1D f = op.expand(c);
    for (const double x : {-0.9, -0.62, -0.31, -0.04, 0.08, 0.33, 0.5, 0.77, 0.96})
      CHECK(f.value(x) == doctest::Approx(fcub(x)).epsilon(1e-10).scale(1.0));

    const double mass = c.dot(op.mass() * c);
    const double quad = c.dot(op.stiffness() * c);
    const double dir = c.dot(op.regular_dirichlet() * c);
    const double deg = c.dot(op.degenerate_weight() * c);
    const double want_quad =
        4.0 / 15.0 + c_of_nu(nu) / 15.0 + (n * pi) * (n * pi) / 126.0;
    CHECK(mass == doctest::Approx(2.0 / 105.0).epsilon(1e-10));
    CHECK(dir == doctest::Approx(4.0 / 15.0).epsilon(1e-10));
    CHECK(deg == doctest::Approx(1.0 / 126.0).epsilon(1e-10));
    CHECK(quad == doctest::Approx(want_quad).epsilon(1e-9));
    CHECK(op.symmetry_defect() < 1e-8);
  }
}

TEST_CASE("transmission BVP spectrum at nu = 1/2, coupled extension") {
  const auto g = build_grid(128, 2.0);
  const Operator1D op = assemble(g, designed_extension(0.5), 0, 1.0);
  const EigenSystem sys = eigensolve(op, 6);

  const double k1 = tan_eq_k_root(1), k2 = tan_eq_k_root(2);
  const std::vector<double> want = {0.0,
                                    0.25 * pi * pi,
                                    k1 * k1,
                                    2.25 * pi * pi,
                                    k2 * k2,
                                    6.25 * pi * pi};
  CHECK(sys.values[0] >= -1e-8);
  CHECK(std::abs(sys.values[0]) < 2e-5);
  for (int j = 1; j < 6; ++j) {
    CAPTURE(j);
    CHECK(sys.values[j] == doctest::Approx(want[j]).epsilon(2e-5));
  }
}

TEST_CASE("transmission BVP spectrum at nu = 1/2, decoupled extension") {
  const auto g = build_grid(128, 2.0);
  const Operator1D op = assemble(g, decoupled_extension(0.5), 0, 1.0);
  REQUIRE(op.splits_by_side());
  const EigenSystem sys = eigensolve(op, 6);

  // Same numerical spectrum as the coupled case at nu = 1/2 (the two scalar
  // families split one per side), but every eigenvector is exactly one-sided.
  const double k1 = tan_eq_k_root(1), k2 = tan_eq_k_root(2);
  const std::vector<double> want = {0.0,
                                    0.25 * pi * pi,
                                    k1 * k1,
                                    2.25 * pi * pi,
                                    k2 * k2,
                                    6.25 * pi * pi};
  CHECK(std::abs(sys.values[0]) < 2e-5);
  for (int j = 1; j < 6; ++j) {
    CAPTURE(j);
    CHECK(sys.values[j] == doctest::Approx(want[j]).epsilon(2e-5));
  }

  const auto& side = op.side_tags();
  std::vector<int> vec_side(6, 0);
  for (int j = 0; j < 6; ++j) {
    double lmax = 0.0, rmax = 0.0;
    for (int i = 0; i < op.dim(); ++i) {
      const double a = std::abs(sys.vectors(i, j));
      if (side[i] < 0) lmax = std::max(lmax, a);
      else rmax = std::max(rmax, a);
    }
    // Exact zeros: the blocks never mix.
    CHECK(std::min(lmax, rmax) == 0.0);
    vec_side[j] = (lmax > rmax) ? -1 : +1;
  }
  // Kernel mode (1 - x) lives on the right; the first Neumann-like mode on
  // the left.
  CHECK(vec_side[0] == +1);
  CHECK(vec_side[1] == -1);
}

TEST_CASE("Bessel-function spectrum oracle at nu = 0.3") {
  const auto g = build_grid(128, 2.0);
  const double nu = 0.3;

  SUBCASE("coupled extension: union of even and odd families plus kernel") {
    const Operator1D op = assemble(g, designed_extension(nu), 0, 1.0);
    const EigenSystem sys = eigensolve(op, 5);
    const std::vector<double> want = merged_spectrum_with_kernel(nu, 5);
    CHECK(sys.values[0] >= -1e-8);
    CHECK(std::abs(sys.values[0]) < 2e-5);
    for (int j = 1; j < 5; ++j) {
      CAPTURE(j);
      CHECK(sys.values[j] == doctest::Approx(want[j]).epsilon(2e-5));
    }
  }

  SUBCASE("decoupled extension: right block = even family, left block = odd") {
    const Operator1D op = assemble(g, decoupled_extension(nu), 0, 1.0);
    const EigenSystem sys = eigensolve(op);
    const auto& side = op.side_tags();

    std::vector<double> right_vals, left_vals;
    for (int j = 0; j < sys.count(); ++j) {
      double lmax = 0.0, rmax = 0.0;
      for (int i = 0; i < op.dim(); ++i) {
        const double a = std::abs(sys.vectors(i, j));
        if (side[i] < 0) lmax = std::max(lmax, a);
        else rmax = std::max(rmax, a);
      }
      REQUIRE(std::min(lmax, rmax) == 0.0);
      if (rmax > 0.0) right_vals.push_back(sys.values[j]);
      else left_vals.push_back(sys.values[j]);
    }

    const auto even = family_eigenvalues(nu, true, 3);
    const auto odd = family_eigenvalues(nu, false, 3);
    REQUIRE(right_vals.size() >= 4);
    REQUIRE(left_vals.size() >= 3);
    // Right block carries the kernel direction x^{nu+1/2} - x^{-nu+1/2}.
    CHECK(std::abs(right_vals[0]) < 2e-5);
    for (int j = 0; j < 3; ++j) {
      CAPTURE(j);
      CHECK(right_vals[j + 1] == doctest::Approx(even[j]).epsilon(2e-5));
      CHECK(left_vals[j] == doctest::Approx(odd[j]).epsilon(2e-5));
    }
  }
}

TEST_CASE("interior one-sided elements see the exact integration-by-parts identity") {
  // For coefficients supported on spline DOFs well inside (0,1), nu = 1/2
  // (c = 0) and n = 0, the quadratic form equals the Dirichlet term exactly:
  // margin (1 - m_nu) |f'|^2 = 0.
  const auto g = build_grid(64, 2.0);
  const Operator1D op = assemble(g, designed_extension(0.5), 0, 1.0);

  std::vector<int> interior;
  for (int i = 0; i < op.n_regular(); ++i) {
    const Function1D f = op.basis_function(i);
    int node = -1;
    for (int d = 0; d < 2 * g->n_nodes(); ++d)
      if (f.dofs()[d] != 0.0) { node = d / 2; break; }
    const double x = g->node(node);
    if (x > 0.15 && x < 0.85) interior.push_back(i);
  }
  REQUIRE(interior.size() >= 10);

  Eigen::VectorXd c = Eigen::VectorXd::Zero(op.dim());
  double v = 0.3;
  for (const int i : interior) {
    c[i] = std::sin(7.0 * v) + 0.5; // deterministic, nonzero
    v += 1.0;
  }
  const double quad = c.dot(op.stiffness() * c);
  const double dir = c.dot(op.regular_dirichlet() * c);
  const double mass = c.dot(op.mass() * c);
  CHECK(std::abs(quad - dir) / mass < 1e-10);
}

TEST_CASE("random-coefficient coercivity margins stay above the floor") {
  const auto g = build_grid(64, 2.0);
  SUBCASE("nu = 0.3, n = 2, gamma = 1") {
    const Operator1D op = assemble(g, designed_extension(0.3), 2, 1.0);
    const CoercivityReport rep = coercivity_check(op, 100, 42);
    CHECK(rep.normalized_margins.size() == 100);
    CHECK(rep.min_margin >= -1e-8);
  }
  SUBCASE("nu = 0.9, n = 4, gamma = 0.5, decoupled") {
    const Operator1D op = assemble(g, decoupled_extension(0.9), 4, 0.5);
    const CoercivityReport rep = coercivity_check(op, 100, 7);
    CHECK(rep.min_margin >= -1e-8);
  }
}

TEST_CASE("assembly in the extreme nu corners keeps the symmetry defect small") {
  const auto g = build_grid(128, 2.0);
  for (const double nu : {0.05, 0.95}) {
    CAPTURE(nu);
    const Operator1D op = assemble(g, designed_extension(nu), 4, 2.0);
    CHECK(op.symmetry_defect() < 1e-8);
    const EigenSystem sys = eigensolve(op, 3);
    CHECK(sys.values[0] >= -1e-8);
  }
}

TEST_CASE("eigensolve truncation and orthonormality") {
  const auto g = build_grid(32, 2.0);
  const Operator1D op = assemble(g, designed_extension(0.4), 1, 1.0);
  const EigenSystem full = eigensolve(op);
  const EigenSystem part = eigensolve(op, 4);
  REQUIRE(full.count() == op.dim());
  REQUIRE(part.count() == 4);
  for (int j = 0; j < 4; ++j)
    CHECK(part.values[j] == doctest::Approx(full.values[j]).epsilon(1e-12));
  for (int j = 1; j < full.count(); ++j) CHECK(full.values[j] >= full.values[j - 1]);

  const Eigen::MatrixXd gram = full.vectors.transpose() * op.mass() * full.vectors;
  CHECK((gram - Eigen::MatrixXd::Identity(op.dim(), op.dim())).cwiseAbs().maxCoeff() <=
        1e-10);
  CHECK(full.orthonormality_defect <= 1e-10);
  CHECK_THROWS_AS(eigensolve(op, 0), std::invalid_argument);
  CHECK_THROWS_AS(eigensolve(op, op.dim() + 1), std::invalid_argument);
}

TEST_CASE("reference eigensystem meets the residual contract and refines stably") {
  // Kernel-free configuration: every pair must satisfy the relative residual
  // bound, and the lowest eigenvalue must be grid-converged to 4 digits.
  const Operator1D op200 =
      assemble(build_grid(200, 2.0), designed_extension(0.5), 1, 1.0);
  const EigenSystem sys = eigensolve(op200);
  CHECK(sys.orthonormality_defect <= 1e-10);
  CHECK(sys.values[0] > 0.0);
  double worst = 0.0;
  for (int j = 0; j < sys.count(); ++j)
    worst = std::max(worst, sys.relative_residuals[j]);
  CHECK(worst <= 1e-8);

  const Operator1D op400 =
      assemble(build_grid(400, 2.0), designed_extension(0.5), 1, 1.0);
  const EigenSystem fine = eigensolve(op400, 1);
  CAPTURE(sys.values[0]);
  CAPTURE(fine.values[0]);
  CHECK(std::abs(sys.values[0] - fine.values[0]) <= 1e-4 * fine.values[0]);
}

TEST_CASE("lowest eigenvalue is nondecreasing in the mode number") {
  const auto g = build_grid(96, 2.0);
  double prev = -1.0;
  for (const int n : {0, 1, 2, 4}) {
    const Operator1D op = assemble(g, designed_extension(0.3), n, 1.0);
    const EigenSystem sys = eigensolve(op, 1);
    CAPTURE(n);
    CHECK(sys.values[0] >= prev - 1e-12);
    prev = sys.values[0];
  }
}

TEST_CASE("boundary bracket difference cancels toward the singularity") {
  // For fixed domain elements f, g the form [f,g](x) = f g' - f' g satisfies
  // [f,g](0+) = [f,g](0-): the profile contributions cancel exactly through
  // the transmission conditions and the cross terms with the regular parts
  // (double zero at 0) vanish like x^{3/2-nu}.
  const auto g = build_grid(96, 2.0);
  const double nu = 0.3;
  const ExtensionSpec spec = designed_extension(nu);
  const auto sb = singular_basis(spec);

  const auto smooth_dofs = [&](auto&& w, auto&& dw) {
    Eigen::VectorXd dofs(2 * g->n_nodes());
    for (int i = 0; i < g->n_nodes(); ++i) {
      dofs[2 * i] = w(g->node(i));
      dofs[2 * i + 1] = dw(g->node(i));
    }
    return dofs;
  };
  const auto wf = [](double x) { return x * x * (1.0 - x * x); };
  const auto dwf = [](double x) { return 2.0 * x - 4.0 * x * x * x; };
  const auto wg = [](double x) { return x * x * (1.0 - x * x) * (1.0 + 0.5 * x); };
  const auto dwg = [](double x) {
    return (2.0 * x - 4.0 * x * x * x) * (1.0 + 0.5 * x) +
           0.5 * x * x * (1.0 - x * x);
  };
  SingularCoeffs sf, sg;
  const auto mix = [](const std::array<SingularCoeffs, 2>& b, double a0, double a1) {
    SingularCoeffs s;
    s.c1m = a0 * b[0].c1m + a1 * b[1].c1m;
    s.c2m = a0 * b[0].c2m + a1 * b[1].c2m;
    s.c1p = a0 * b[0].c1p + a1 * b[1].c1p;
    s.c2p = a0 * b[0].c2p + a1 * b[1].c2p;
    return s;
  };
  sf = mix(sb, 1.0, 0.7);
  sg = mix(sb, -0.3, 1.1);
  const Function1D f(g, nu, smooth_dofs(wf, dwf), sf);
  const Function1D h(g, nu, smooth_dofs(wg, dwg), sg);

  const auto bracket_diff = [&](double eps) {
    const double plus = f.value(eps) * h.deriv(eps) - f.deriv(eps) * h.value(eps);
    const double minus =
        f.value(-eps) * h.deriv(-eps) - f.deriv(-eps) * h.value(-eps);
    return plus - minus;
  };
  const int c = g->center_node();
  const double w_far = bracket_diff(g->node(c + 16));
  const double w_mid = bracket_diff(g->node(c + 4));
  const double w_near = bracket_diff(g->node(c + 1));
  CAPTURE(w_far);
  CAPTURE(w_mid);
  CAPTURE(w_near);
  CHECK(std::abs(w_near) < 1e-2);
  CHECK(std::abs(w_near) <= std::max(std::abs(w_far) / 50.0, 1e-9));
  CHECK(std::abs(w_mid) <= std::max(std::abs(w_far) / 5.0, 1e-9));
}

TEST_CASE("side tags partition the decoupled basis") {
  const auto g = build_grid(32, 2.0);
  const Operator1D dec = assemble(g, decoupled_extension(0.7), 0, 1.0);
  REQUIRE(dec.splits_by_side());
  int left = 0, right = 0;
  for (const int s : dec.side_tags()) (s < 0 ? left : right)++;
  CHECK(left == right);
  CHECK(left + right == dec.dim());

  const Operator1D cou = assemble(g, designed_extension(0.7), 0, 1.0);
  CHECK_FALSE(cou.splits_by_side());
  CHECK(cou.side_tags()[cou.dim() - 1] == 0);
  CHECK(cou.side_tags()[cou.dim() - 2] == 0);
}

TEST_CASE("assembly rejects invalid inputs") {
  const auto g = build_grid(16, 2.0);
  CHECK_THROWS_AS(assemble(g, designed_extension(0.5), -1, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(assemble(g, designed_extension(0.5), 1, 0.0),
                  std::invalid_argument);
  ExtensionSpec tight = designed_extension(0.5);
  tight.nu = 0.02; // outside the supported clamp
  CHECK_THROWS_AS(assemble(g, tight, 1, 1.0), std::invalid_argument);
  ExtensionSpec broken = designed_extension(0.5);
  broken.m3 << 2.0, 0.0, 0.0, 1.0;
  CHECK_THROWS_AS(assemble(g, broken, 1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(assemble(nullptr, designed_extension(0.5), 1, 1.0),
                  std::invalid_argument);
}

} // TEST_SUITE
