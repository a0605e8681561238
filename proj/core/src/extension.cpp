#include "grushin/extension.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace grushin {

namespace {

void require_open_unit(double nu, const char* who) {
  if (!(nu > 0.0 && nu < 1.0))
    throw std::invalid_argument(std::string(who) + ": nu must lie in (0, 1)");
}

// 2x2 symplectic form.
Eigen::Matrix2d form_E() {
  Eigen::Matrix2d E;
  E << 0.0, -1.0, 1.0, 0.0;
  return E;
}

} // namespace

double c_of_nu(double nu) {
  require_open_unit(nu, "c_of_nu");
  return nu * nu - 0.25;
}

double coercivity_constant(double nu) {
  require_open_unit(nu, "coercivity_constant");
  return std::min(1.0, 4.0 * nu * nu);
}

ExtensionSpec designed_extension(double nu) {
  require_open_unit(nu, "designed_extension");
  ExtensionSpec spec;
  spec.label = "designed";
  spec.nu = nu;
  spec.m2 = Eigen::Matrix2d::Identity();
  spec.m3 = Eigen::Matrix2d::Identity();
  return spec;
}

ExtensionSpec decoupled_extension(double nu) {
  require_open_unit(nu, "decoupled_extension");
  ExtensionSpec spec;
  spec.label = "decoupled";
  spec.nu = nu;
  // Row conditions: [f,u](0^+) = 0  (c1p + c2p = 0) and [f,v](0^-) = 0
  // (-(nu+1/2) c1m - (-nu+1/2) c2m = 0).
  spec.m2 << 0.0, 0.0, 0.0, 1.0;
  spec.m3 << 1.0, 0.0, 0.0, 0.0;
  return spec;
}

Eigen::Matrix2d bracket_matrix_minus(double nu) {
  Eigen::Matrix2d B;
  B << 1.0, 1.0, -(nu + 0.5), -(-nu + 0.5);
  return B;
}

Eigen::Matrix2d bracket_matrix_plus(double nu) {
  Eigen::Matrix2d B;
  B << 1.0, 1.0, (nu + 0.5), (-nu + 0.5);
  return B;
}

Eigen::Matrix2d hat_m2(const ExtensionSpec& spec) {
  return spec.m2 * bracket_matrix_minus(spec.nu);
}

Eigen::Matrix2d hat_m3(const ExtensionSpec& spec) {
  return spec.m3 * bracket_matrix_plus(spec.nu);
}

Eigen::Vector2d transmission_residual(const ExtensionSpec& spec,
                                      const SingularCoeffs& sing) {
  return hat_m2(spec) * sing.minus() + hat_m3(spec) * sing.plus();
}

TransmissionMap transmission_map(const ExtensionSpec& spec) {
  const Eigen::Matrix2d h2 = hat_m2(spec);
  const Eigen::Matrix2d h3 = hat_m3(spec);
  const double scale = std::max({1.0, h2.cwiseAbs().maxCoeff(), h3.cwiseAbs().maxCoeff()});
  const double tol = 1e-12 * scale * scale;
  TransmissionMap tm;
  if (std::abs(h3.determinant()) <= tol || std::abs(h2.determinant()) <= tol) {
    tm.coupled = false;
    tm.map.setZero();
    return tm;
  }
  tm.coupled = true;
  tm.map = -h3.inverse() * h2;
  return tm;
}

ValidationReport validate_extension(const ExtensionSpec& spec) {
  ValidationReport rep;
  rep.det_m2 = spec.m2.determinant();
  rep.det_m3 = spec.m3.determinant();

  // Stacked boundary system: rows are (condition at -1, transmission row 1,
  // transmission row 2, condition at +1); columns are the (u, v) brackets at
  // -1, 0^-, 0^+, +1.
  Eigen::Matrix<double, 4, 2> M1 = Eigen::Matrix<double, 4, 2>::Zero();
  Eigen::Matrix<double, 4, 2> M2 = Eigen::Matrix<double, 4, 2>::Zero();
  Eigen::Matrix<double, 4, 2> M3 = Eigen::Matrix<double, 4, 2>::Zero();
  Eigen::Matrix<double, 4, 2> M4 = Eigen::Matrix<double, 4, 2>::Zero();
  M1(0, spec.dirichlet_minus ? 0 : 1) = 1.0;
  M4(3, spec.dirichlet_plus ? 0 : 1) = 1.0;
  M2.block<2, 2>(1, 0) = spec.m2;
  M3.block<2, 2>(1, 0) = spec.m3;

  Eigen::Matrix<double, 4, 8> S;
  S << M1, M2, M3, M4;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(S);
  lu.setThreshold(1e-10);
  rep.boundary_system_rank = static_cast<int>(lu.rank());

  const Eigen::Matrix2d E = form_E();
  const Eigen::Matrix4d ident = M1 * E * M1.transpose() - M2 * E * M2.transpose() +
                                M3 * E * M3.transpose() - M4 * E * M4.transpose();
  rep.e_identity_residual = ident.cwiseAbs().maxCoeff();

  Eigen::Matrix<double, 2, 4> reduced;
  reduced << spec.m2, spec.m3;
  Eigen::FullPivLU<Eigen::MatrixXd> lu2(reduced);
  lu2.setThreshold(1e-10);
  rep.reduced_rank_ok = (lu2.rank() == 2);
  rep.reduced_det_mismatch = std::abs(rep.det_m2 - rep.det_m3);

  const double scale =
      1.0 + spec.m2.squaredNorm() + spec.m3.squaredNorm();
  rep.valid = (rep.boundary_system_rank == 4) &&
              (rep.e_identity_residual <= 1e-12 * scale);
  return rep;
}

std::array<SingularCoeffs, 2> singular_basis(const ExtensionSpec& spec) {
  const TransmissionMap tm = transmission_map(spec);
  if (tm.coupled) {
    SingularCoeffs a{1.0, 0.0, tm.map(0, 0), tm.map(1, 0)};
    SingularCoeffs b{0.0, 1.0, tm.map(0, 1), tm.map(1, 1)};
    return {a, b};
  }
  // Decoupled: one-sided kernel directions of the individual hats.  Exact
  // one-sidedness matters downstream (it is what makes the no-transmission
  // results hold to machine zero), so build them directly.
  const Eigen::Matrix2d h2 = hat_m2(spec);
  const Eigen::Matrix2d h3 = hat_m3(spec);
  auto kernel_dir = [](const Eigen::Matrix2d& A) -> Eigen::Vector2d {
    // Null vector of a (numerically) singular 2x2: orthogonal to the larger row.
    const Eigen::Vector2d r0 = A.row(0), r1 = A.row(1);
    const Eigen::Vector2d r = (r0.norm() >= r1.norm()) ? r0 : r1;
    if (r.norm() == 0.0) return {1.0, 0.0};
    Eigen::Vector2d k(-r[1], r[0]);
    k /= k.norm();
    if (std::abs(k[0]) >= std::abs(k[1]) ? k[0] < 0 : k[1] < 0) k = -k;
    return k;
  };
  const Eigen::Vector2d km = kernel_dir(h2);
  const Eigen::Vector2d kp = kernel_dir(h3);
  SingularCoeffs left{km[0], km[1], 0.0, 0.0};
  SingularCoeffs right{0.0, 0.0, kp[0], kp[1]};
  return {left, right};
}

SearchCertificate nonsymmetric_transmission_search(int n_trials, std::uint64_t seed) {
  SearchCertificate cert;
  cert.trials = n_trials;
  cert.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::uniform_real_distribution<double> unif01(0.0, 1.0);

  for (int t = 0; t < n_trials; ++t) {
    const double nu = nu_clamp_lo + (nu_clamp_hi - nu_clamp_lo) * unif01(rng);
    ExtensionSpec spec;
    spec.label = "random";
    spec.nu = nu;

    if (unif01(rng) < 0.2) {
      // Rank-one pair: both determinants are exactly zero, the decoupled class.
      Eigen::Vector2d a{unif(rng), unif(rng)}, b{unif(rng), unif(rng)};
      Eigen::Vector2d c{unif(rng), unif(rng)}, d{unif(rng), unif(rng)};
      spec.m2 = a * b.transpose();
      spec.m3 = c * d.transpose();
    } else {
      Eigen::Matrix2d m2, m3;
      do {
        m2 << unif(rng), unif(rng), unif(rng), unif(rng);
      } while (std::abs(m2.determinant()) < 1e-3);
      do {
        m3 << unif(rng), unif(rng), unif(rng), unif(rng);
      } while (std::abs(m3.determinant()) < 1e-3);
      m3.row(0) *= m2.determinant() / m3.determinant(); // enforce det m3 = det m2
      spec.m2 = m2;
      spec.m3 = m3;
    }
    if (!validate_extension(spec).valid) continue;

    const double d2 = std::abs(hat_m2(spec).determinant());
    const double d3 = std::abs(hat_m3(spec).determinant());
    cert.max_det_mismatch = std::max(cert.max_det_mismatch, std::abs(d2 - d3));
    const double scale = std::max(1.0, std::max(d2, d3));
    const bool sing2 = d2 <= 1e-10 * scale;
    const bool sing3 = d3 <= 1e-10 * scale;
    if (sing2 && sing3) ++cert.decoupled_count;
    if (sing2 != sing3) cert.one_sided_found = true;
  }
  return cert;
}

} // namespace grushin
