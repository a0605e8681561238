#include "doctest.h"

#include <grushin/extension.hpp>

#include <cmath>

using namespace grushin;

namespace {

// Hand-built coupling map for the coupled extension, solved independently
// from the two constraint rows
//   c1p + c2p            = -(c1m + c2m)
//   (nu+1/2) c1p + (-nu+1/2) c2p = (nu+1/2) c1m + (-nu+1/2) c2m
// by inverting the 2x2 left-hand side on (c1p, c2p).
Eigen::Matrix2d oracle_map(double nu) {
  Eigen::Matrix2d lhs;
  lhs << 1.0, 1.0, nu + 0.5, -nu + 0.5;
  Eigen::Matrix2d rhs;
  rhs << -1.0, -1.0, nu + 0.5, -nu + 0.5;
  return lhs.inverse() * rhs;
}

} // namespace

TEST_SUITE("extension") {

TEST_CASE("coupling constant and coercivity constant") {
  CHECK(c_of_nu(0.5) == 0.0);
  CHECK(c_of_nu(0.25) == doctest::Approx(-0.1875).epsilon(1e-15));
  CHECK(c_of_nu(0.95) == doctest::Approx(0.6525).epsilon(1e-15));
  CHECK(coercivity_constant(0.3) == doctest::Approx(0.36).epsilon(1e-15));
  CHECK(coercivity_constant(0.5) == 1.0);
  CHECK(coercivity_constant(0.6) == 1.0);
  CHECK(coercivity_constant(0.8) == 1.0);
  CHECK_THROWS_AS(c_of_nu(0.0), std::invalid_argument);
  CHECK_THROWS_AS(c_of_nu(1.0), std::invalid_argument);
  CHECK_THROWS_AS(coercivity_constant(-0.1), std::invalid_argument);
}

TEST_CASE("bracket matrices") {
  for (const double nu : {0.1, 0.3, 0.5, 0.75, 0.9}) {
    CAPTURE(nu);
    const Eigen::Matrix2d bm = bracket_matrix_minus(nu);
    const Eigen::Matrix2d bp = bracket_matrix_plus(nu);
    CHECK(bm.determinant() == doctest::Approx(2.0 * nu).epsilon(1e-14));
    CHECK(bp.determinant() == doctest::Approx(-2.0 * nu).epsilon(1e-14));
    // Row 0 of both is the plain coefficient sum.
    CHECK(bm(0, 0) == 1.0);
    CHECK(bm(0, 1) == 1.0);
    CHECK(bp(0, 0) == 1.0);
    CHECK(bp(0, 1) == 1.0);
  }
}

TEST_CASE("coupled extension transmission map matches the hand-solved oracle") {
  for (const double nu : {0.1, 0.25, 0.5, 0.75, 0.9}) {
    CAPTURE(nu);
    const ExtensionSpec spec = designed_extension(nu);
    CHECK(spec.m2.isIdentity(0.0));
    CHECK(spec.m3.isIdentity(0.0));
    const TransmissionMap tm = transmission_map(spec);
    REQUIRE(tm.coupled);
    const Eigen::Matrix2d want = oracle_map(nu);
    CHECK((tm.map - want).cwiseAbs().maxCoeff() < 1e-13);
    // The coupling is measure-preserving on coefficients: det = -1 always.
    CHECK(tm.map.determinant() == doctest::Approx(-1.0).epsilon(1e-13));
  }
  // Spot values.
  const Eigen::Matrix2d m05 = transmission_map(designed_extension(0.5)).map;
  CHECK(m05(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(m05(0, 1) == 0.0);
  CHECK(m05(1, 0) == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(m05(1, 1) == doctest::Approx(-1.0).epsilon(1e-14));
  const Eigen::Matrix2d m025 = transmission_map(designed_extension(0.25)).map;
  CHECK(m025(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(m025(0, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(m025(1, 0) == doctest::Approx(-3.0).epsilon(1e-14));
  CHECK(m025(1, 1) == doctest::Approx(-2.0).epsilon(1e-14));
}

TEST_CASE("transmission residual vanishes exactly on mapped coefficients") {
  const ExtensionSpec spec = designed_extension(0.3);
  const Eigen::Matrix2d map = transmission_map(spec).map;
  for (const auto& cm : {Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.4, -2.0)}) {
    const Eigen::Vector2d cp = map * cm;
    const SingularCoeffs s{cm[0], cm[1], cp[0], cp[1]};
    CHECK(transmission_residual(spec, s).cwiseAbs().maxCoeff() < 1e-13);
  }
  const SingularCoeffs bad{1.0, 0.0, 1.0, 0.0};
  CHECK(transmission_residual(spec, bad).cwiseAbs().maxCoeff() > 0.1);
}

TEST_CASE("validation accepts both shipped extensions") {
  for (const double nu : {0.1, 0.5, 0.9}) {
    for (const bool dec : {false, true}) {
      CAPTURE(nu);
      CAPTURE(dec);
      const ExtensionSpec spec = dec ? decoupled_extension(nu) : designed_extension(nu);
      const ValidationReport rep = validate_extension(spec);
      CHECK(rep.valid);
      CHECK(rep.boundary_system_rank == 4);
      CHECK(rep.e_identity_residual < 1e-12);
      CHECK(rep.reduced_rank_ok);
      CHECK(rep.reduced_det_mismatch < 1e-14);
    }
  }
}

TEST_CASE("validation rejects a determinant-mismatched pair") {
  ExtensionSpec spec = designed_extension(0.5);
  spec.m3 << 2.0, 0.0, 0.0, 1.0; // det 2 vs det 1: not self-adjoint
  const ValidationReport rep = validate_extension(spec);
  CHECK_FALSE(rep.valid);
  CHECK(rep.boundary_system_rank == 4); // still a rank-4 system
  CHECK(rep.e_identity_residual > 0.1);
  CHECK(rep.reduced_det_mismatch == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("validation rejects a rank-deficient system") {
  ExtensionSpec spec = designed_extension(0.5);
  spec.m2.setZero();
  spec.m3.setZero();
  spec.m2(0, 0) = 1.0;
  spec.m3(0, 0) = -1.0; // single condition twice: rank 3 overall
  const ValidationReport rep = validate_extension(spec);
  CHECK_FALSE(rep.valid);
  CHECK(rep.boundary_system_rank < 4);
}

TEST_CASE("decoupled extension blocks the coupling and fixes kernel directions") {
  for (const double nu : {0.1, 0.25, 0.5, 0.9}) {
    CAPTURE(nu);
    const ExtensionSpec spec = decoupled_extension(nu);
    CHECK_FALSE(transmission_map(spec).coupled);

    const auto basis = singular_basis(spec);
    // Element 0 lives on the left only, element 1 on the right only.
    CHECK(basis[0].c1p == 0.0);
    CHECK(basis[0].c2p == 0.0);
    CHECK(basis[1].c1m == 0.0);
    CHECK(basis[1].c2m == 0.0);
    CHECK(basis[0].minus().norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(basis[1].plus().norm() == doctest::Approx(1.0).epsilon(1e-14));
    // Left kernel direction is proportional to (nu - 1/2, nu + 1/2).
    const double lref = std::hypot(nu - 0.5, nu + 0.5);
    CHECK(std::abs(basis[0].c1m) ==
          doctest::Approx(std::abs(nu - 0.5) / lref).epsilon(1e-13));
    CHECK(std::abs(basis[0].c2m) ==
          doctest::Approx((nu + 0.5) / lref).epsilon(1e-13));
    // Right kernel direction is proportional to (1, -1) for every nu.
    CHECK(basis[1].c1p == doctest::Approx(-basis[1].c2p).epsilon(1e-14));
    // Both satisfy the constraint rows exactly.
    CHECK(transmission_residual(spec, basis[0]).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(transmission_residual(spec, basis[1]).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("coupled singular basis spans left seeds completed by the map") {
  const ExtensionSpec spec = designed_extension(0.37);
  const Eigen::Matrix2d map = transmission_map(spec).map;
  const auto basis = singular_basis(spec);
  CHECK(basis[0].c1m == 1.0);
  CHECK(basis[0].c2m == 0.0);
  CHECK(basis[1].c1m == 0.0);
  CHECK(basis[1].c2m == 1.0);
  for (int k = 0; k < 2; ++k) {
    CAPTURE(k);
    const Eigen::Vector2d cp = map * basis[k].minus();
    CHECK((basis[k].plus() - cp).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(transmission_residual(spec, basis[k]).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("coefficient vector round trip") {
  const SingularCoeffs s{0.1, -0.2, 0.3, -0.4};
  const SingularCoeffs t = SingularCoeffs::from_vec(s.vec());
  CHECK(t.c1m == s.c1m);
  CHECK(t.c2m == s.c2m);
  CHECK(t.c1p == s.c1p);
  CHECK(t.c2p == s.c2p);
}

TEST_CASE("randomized search finds no one-way transmission") {
  const SearchCertificate cert = nonsymmetric_transmission_search(500, 20260814);
  CHECK(cert.trials == 500);
  CHECK(cert.seed == 20260814);
  CHECK(cert.decoupled_count > 0);
  CHECK_FALSE(cert.one_sided_found);
  CHECK(cert.max_det_mismatch < 1e-10);
}

} // TEST_SUITE
