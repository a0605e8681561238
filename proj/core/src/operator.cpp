#include "grushin/operator.hpp"

#include "grushin/cutoff.hpp"
#include "grushin/hermite.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace grushin {

namespace {

// Singular profile (no cutoff) value and derivative at a point.
struct ProfileEval {
  double val = 0.0;
  double d1 = 0.0;
};

ProfileEval profile_at(const SingularCoeffs& s, double nu, double x) {
  const double r = std::abs(x);
  const double sgn = (x < 0.0 ? -1.0 : 1.0);
  const double c1 = (x < 0.0 ? s.c1m : s.c1p);
  const double c2 = (x < 0.0 ? s.c2m : s.c2p);
  ProfileEval p;
  if (c1 == 0.0 && c2 == 0.0) return p;
  const double r1 = std::pow(r, nu + 0.5);
  const double r2 = std::pow(r, -nu + 0.5);
  p.val = c1 * r1 + c2 * r2;
  p.d1 = sgn * ((nu + 0.5) * c1 * r1 + (-nu + 0.5) * c2 * r2) / r;
  return p;
}

struct LocalEval {
  int basis = -1;
  double val = 0.0;  // phi
  double aval = 0.0; // (A phi) in strong form
  double srd = 0.0;  // derivative of the split-regular component of phi
};

} // namespace

bool Operator1D::splits_by_side() const {
  return std::none_of(side_.begin(), side_.end(), [](int s) { return s == 0; });
}

Function1D Operator1D::expand(const Eigen::VectorXd& coeffs) const {
  if (coeffs.size() != dim())
    throw std::invalid_argument("Operator1D::expand: coefficient size mismatch");
  Eigen::VectorXd dofs = Eigen::VectorXd::Zero(2 * grid_->n_nodes());
  for (int i = 0; i < n_regular_; ++i)
    dofs[active_dofs_[i]] = coeffs[i] * scale_[i];
  SingularCoeffs sing;
  for (int k = 0; k < 2; ++k) {
    const double a = coeffs[n_regular_ + k] * scale_[n_regular_ + k];
    sing.c1m += a * sing_elems_[k].c1m;
    sing.c2m += a * sing_elems_[k].c2m;
    sing.c1p += a * sing_elems_[k].c1p;
    sing.c2p += a * sing_elems_[k].c2p;
    dofs -= a * sing_corr_[k];
  }
  return Function1D(grid_, spec_.nu, std::move(dofs), sing);
}

Function1D Operator1D::basis_function(int i) const {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(dim());
  e[i] = 1.0;
  return expand(e);
}

Eigen::VectorXd Operator1D::project(const std::function<double(double)>& f) const {
  const Grid1D& g = *grid_;
  const double nu = spec_.nu;

  // Loads against every Hermite DOF (active or not) and the raw cutoff
  // profiles; the corrected singular loads follow by subtracting the
  // interpolant's spline combination.
  Eigen::VectorXd b_spline = Eigen::VectorXd::Zero(2 * g.n_nodes());
  double b_profile[2] = {0.0, 0.0};
  for (int cell = 0; cell < g.n_cells(); ++cell) {
    const bool sing_here = g.cell_lo(cell) < cutoff_support &&
                           g.cell_hi(cell) > -cutoff_support;
    const QuadRule& rule = g.cell_rule(cell);
    for (int q = 0; q < rule.size(); ++q) {
      const double x = rule.points[q], wq = rule.weights[q];
      const double fx = f(x);
      if (fx == 0.0) continue;
      const HermiteShapes s = hermite_shapes_at(g, cell, x);
      for (int l = 0; l < 4; ++l) b_spline[2 * cell + l] += wq * fx * s.val[l];
      if (sing_here) {
        const double chi = cutoff_value(x);
        if (chi > 0.0)
          for (int k = 0; k < 2; ++k)
            b_profile[k] += wq * fx * chi * profile_at(sing_elems_[k], nu, x).val;
      }
    }
  }
  Eigen::VectorXd b(dim());
  for (int i = 0; i < n_regular_; ++i) b[i] = b_spline[active_dofs_[i]];
  for (int k = 0; k < 2; ++k)
    b[n_regular_ + k] = b_profile[k] - sing_corr_[k].dot(b_spline);
  const Eigen::VectorXd bhat = scale_.asDiagonal() * b;
  return M_.ldlt().solve(bhat);
}

Operator1D assemble(std::shared_ptr<const Grid1D> grid, const ExtensionSpec& spec,
                    int n, double gamma) {
  if (!grid) throw std::invalid_argument("assemble: null grid");
  if (!(spec.nu >= nu_clamp_lo && spec.nu <= nu_clamp_hi))
    throw std::invalid_argument(
        "assemble: nu outside the supported clamp [0.05, 0.95]");
  if (!(gamma > 0.0)) throw std::invalid_argument("assemble: gamma must be > 0");
  if (n < 0) throw std::invalid_argument("assemble: mode number must be >= 0");
  if (!spec.dirichlet_minus || !spec.dirichlet_plus)
    throw std::invalid_argument(
        "assemble: only Dirichlet outer boundary conditions are supported");
  if (!validate_extension(spec).valid)
    throw std::invalid_argument("assemble: extension spec fails validation");

  Operator1D op;
  op.grid_ = std::move(grid);
  op.spec_ = spec;
  op.n_ = n;
  op.gamma_ = gamma;

  const Grid1D& g = *op.grid_;
  const int nn = g.n_nodes();
  const int c = g.center_node();

  std::vector<int> dof_to_basis(2 * nn, -1);
  for (int i = 0; i < nn; ++i) {
    for (int d = 0; d < 2; ++d) {
      if (i == c) continue;                          // double zero at x = 0
      if (d == 0 && (i == 0 || i == nn - 1)) continue; // Dirichlet at -1, +1
      dof_to_basis[2 * i + d] = static_cast<int>(op.active_dofs_.size());
      op.active_dofs_.push_back(2 * i + d);
    }
  }
  op.n_regular_ = static_cast<int>(op.active_dofs_.size());
  op.sing_elems_ = singular_basis(spec);
  const int dim = op.n_regular_ + 2;

  op.side_.assign(dim, 0);
  for (int i = 0; i < op.n_regular_; ++i)
    op.side_[i] = (op.active_dofs_[i] / 2 < c) ? -1 : +1;
  const bool coupled = transmission_map(spec).coupled;
  op.side_[op.n_regular_] = coupled ? 0 : -1;
  op.side_[op.n_regular_ + 1] = coupled ? 0 : +1;

  const double nu = spec.nu;
  const double cnu = c_of_nu(nu);
  const double freq = n * std::numbers::pi;
  const double pot_coef = freq * freq;

  // Hermite interpolant of each cutoff profile over the active spline space
  // (value/slope forced to zero at x = 0 and at the Dirichlet ends).  It is
  // subtracted from the cutoff profile so the enrichment keeps only what the
  // splines cannot represent; without this the profiles are nearly
  // spline-representable on fine graded grids and the scaled mass matrix
  // becomes numerically singular.
  for (int k = 0; k < 2; ++k) {
    Eigen::VectorXd corr = Eigen::VectorXd::Zero(2 * nn);
    for (int i = 0; i < nn; ++i) {
      const double x = g.node(i);
      if (i == c || std::abs(x) >= cutoff_support) continue;
      const double chi = cutoff_value(x);
      const double dchi = cutoff_deriv(x);
      const ProfileEval p = profile_at(op.sing_elems_[k], nu, x);
      if (dof_to_basis[2 * i] >= 0) corr[2 * i] = chi * p.val;
      if (dof_to_basis[2 * i + 1] >= 0) corr[2 * i + 1] = chi * p.d1 + dchi * p.val;
    }
    op.sing_corr_[k] = std::move(corr);
  }

  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(dim, dim);

  LocalEval loc[6];
  for (int cell = 0; cell < g.n_cells(); ++cell) {
    const double lo = g.cell_lo(cell), hi = g.cell_hi(cell);
    // Singular elements touch this cell if either the cutoff profile
    // (support |x| < 3/4) or its split-regular corrector (|x| > 1/2, running
    // out to the boundary) is alive here.
    const bool sing_val_here = lo < cutoff_support && hi > -cutoff_support;
    const bool sing_reg_here = hi > cutoff_plateau || lo < -cutoff_plateau;
    const bool sing_here = sing_val_here || sing_reg_here;

    int n_loc = 0;
    int loc_dofs[4];
    for (int l = 0; l < 4; ++l) {
      const int bi = dof_to_basis[2 * cell + l];
      if (bi >= 0) {
        loc[n_loc].basis = bi;
        loc_dofs[n_loc] = l;
        ++n_loc;
      }
    }
    const int n_reg_loc = n_loc;
    if (sing_here) {
      loc[n_loc++].basis = op.n_regular_;
      loc[n_loc++].basis = op.n_regular_ + 1;
    }
    if (n_loc == 0) continue;

    const QuadRule& rule = g.cell_rule(cell);
    for (int q = 0; q < rule.size(); ++q) {
      const double x = rule.points[q], wq = rule.weights[q];
      const double wgt = std::pow(std::abs(x), 2.0 * gamma);
      const double pot = pot_coef * wgt;
      const double invx2 = 1.0 / (x * x);
      const HermiteShapes s = hermite_shapes_at(g, cell, x);

      for (int a = 0; a < n_reg_loc; ++a) {
        const int l = loc_dofs[a];
        loc[a].val = s.val[l];
        loc[a].aval = -s.d2[l] + cnu * (s.val[l] * invx2) + pot * s.val[l];
        loc[a].srd = s.d1[l];
      }
      if (sing_here) {
        const double chi = cutoff_value(x);
        const double dchi = cutoff_deriv(x);
        const double d2chi = cutoff_second_deriv(x);
        for (int k = 0; k < 2; ++k) {
          const ProfileEval p = profile_at(op.sing_elems_[k], nu, x);
          const Eigen::VectorXd& corr = op.sing_corr_[k];
          double cv = 0.0, cd1 = 0.0, cd2 = 0.0;
          for (int l = 0; l < 4; ++l) {
            const double cl = corr[2 * cell + l];
            cv += cl * s.val[l];
            cd1 += cl * s.d1[l];
            cd2 += cl * s.d2[l];
          }
          LocalEval& e = loc[n_reg_loc + k];
          // A(chi p) uses (-d2 + c/x^2) p = 0; the spline part gets the same
          // strong form as the regular DOFs.
          e.val = chi * p.val - cv;
          e.aval = -2.0 * dchi * p.d1 - d2chi * p.val + pot * (chi * p.val) +
                   cd2 - cnu * (cv * invx2) - pot * cv;
          e.srd = dchi * p.val + (chi - 1.0) * p.d1 - cd1;
        }
      }

      for (int a = 0; a < n_loc; ++a) {
        const int ia = loc[a].basis;
        for (int b = 0; b < n_loc; ++b) {
          const int ib = loc[b].basis;
          K(ia, ib) += wq * loc[a].aval * loc[b].val;
          M(ia, ib) += wq * loc[a].val * loc[b].val;
          D(ia, ib) += wq * loc[a].srd * loc[b].srd;
          W(ia, ib) += wq * wgt * loc[a].val * loc[b].val;
        }
      }
    }
  }

  const double knorm = K.norm();
  op.symmetry_defect_ = (knorm > 0.0) ? (K - K.transpose()).norm() / knorm : 0.0;
  if (op.symmetry_defect_ > 1e-8)
    throw std::runtime_error(
        "assemble: stiffness symmetry defect " + std::to_string(op.symmetry_defect_) +
        " exceeds 1e-8; quadrature or grading is inadequate for this spec");
  K = 0.5 * (K + K.transpose()).eval();
  M = 0.5 * (M + M.transpose()).eval();
  D = 0.5 * (D + D.transpose()).eval();
  W = 0.5 * (W + W.transpose()).eval();

  op.scale_.resize(dim);
  for (int i = 0; i < dim; ++i) {
    const double mii = M(i, i);
    if (!(mii > 0.0))
      throw std::runtime_error("assemble: mass diagonal not positive");
    op.scale_[i] = 1.0 / std::sqrt(mii);
  }
  const auto S = op.scale_.asDiagonal();
  op.K_ = S * K * S;
  op.M_ = S * M * S;
  op.D_ = S * D * S;
  op.W_ = S * W * S;
  return op;
}

namespace {

struct BlockPairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors; // dim x count, embedded in the full index set
};

BlockPairs solve_block(const Eigen::MatrixXd& K, const Eigen::MatrixXd& M,
                       const std::vector<int>& idx, int dim) {
  const int b = static_cast<int>(idx.size());
  Eigen::MatrixXd Kb(b, b), Mb(b, b);
  for (int i = 0; i < b; ++i)
    for (int j = 0; j < b; ++j) {
      Kb(i, j) = K(idx[i], idx[j]);
      Mb(i, j) = M(idx[i], idx[j]);
    }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Kb, Mb);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigensolve: generalized eigensolver failed");
  BlockPairs out;
  out.values = es.eigenvalues();
  out.vectors = Eigen::MatrixXd::Zero(dim, b);
  for (int j = 0; j < b; ++j)
    for (int i = 0; i < b; ++i) out.vectors(idx[i], j) = es.eigenvectors()(i, j);
  return out;
}

std::string fmt_sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

} // namespace

EigenSystem eigensolve(const Operator1D& op, int k) {
  const int dim = op.dim();
  if (k == -1) k = dim;
  if (k < 1 || k > dim)
    throw std::invalid_argument("eigensolve: k must lie in [1, dim]");

  EigenSystem sys;
  if (op.splits_by_side()) {
    std::vector<int> left, right;
    for (int i = 0; i < dim; ++i)
      (op.side_tags()[i] < 0 ? left : right).push_back(i);
    const BlockPairs bl = solve_block(op.stiffness(), op.mass(), left, dim);
    const BlockPairs br = solve_block(op.stiffness(), op.mass(), right, dim);
    // Merge ascending; ties keep the left block first (deterministic).
    sys.values.resize(dim);
    sys.vectors.resize(dim, dim);
    int i = 0, j = 0;
    for (int t = 0; t < dim; ++t) {
      const bool take_left =
          j >= br.values.size() ||
          (i < bl.values.size() && bl.values[i] <= br.values[j]);
      if (take_left) {
        sys.values[t] = bl.values[i];
        sys.vectors.col(t) = bl.vectors.col(i++);
      } else {
        sys.values[t] = br.values[j];
        sys.vectors.col(t) = br.vectors.col(j++);
      }
    }
  } else {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(op.stiffness(),
                                                                 op.mass());
    if (es.info() != Eigen::Success)
      throw std::runtime_error("eigensolve: generalized eigensolver failed");
    sys.values = es.eigenvalues();
    sys.vectors = es.eigenvectors();
  }

  if (k < dim) {
    sys.values.conservativeResize(k);
    sys.vectors.conservativeResize(Eigen::NoChange, k);
  }

  const Eigen::MatrixXd gram =
      sys.vectors.transpose() * op.mass() * sys.vectors;
  sys.orthonormality_defect =
      (gram - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff();
  if (sys.orthonormality_defect > 1e-10)
    throw std::runtime_error("eigensolve: eigenvector orthonormality defect " +
                             fmt_sci(sys.orthonormality_defect) +
                             " exceeds 1e-10");

  const Eigen::MatrixXd kv = op.stiffness() * sys.vectors;
  const Eigen::MatrixXd res =
      kv - op.mass() * sys.vectors * sys.values.asDiagonal();
  sys.relative_residuals.resize(k);
  for (int j = 0; j < k; ++j) {
    const double denom = kv.col(j).norm();
    sys.relative_residuals[j] =
        (denom > 0.0) ? res.col(j).norm() / denom : res.col(j).norm();
  }
  return sys;
}

CoercivityReport coercivity_check(const Operator1D& op, int n_samples,
                                  std::uint64_t seed) {
  if (n_samples < 1)
    throw std::invalid_argument("coercivity_check: need n_samples >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double mnu = coercivity_constant(op.nu());
  const double freq = op.mode() * std::numbers::pi;

  CoercivityReport rep;
  rep.normalized_margins.resize(n_samples);
  for (int s = 0; s < n_samples; ++s) {
    Eigen::VectorXd cvec(op.dim());
    for (int i = 0; i < op.dim(); ++i) cvec[i] = gauss(rng);
    const double quad = cvec.dot(op.stiffness() * cvec);
    const double dir = cvec.dot(op.regular_dirichlet() * cvec);
    const double deg = cvec.dot(op.degenerate_weight() * cvec);
    const double mass = cvec.dot(op.mass() * cvec);
    rep.normalized_margins[s] = (quad - mnu * dir - freq * freq * deg) / mass;
  }
  rep.min_margin = rep.normalized_margins.minCoeff();
  return rep;
}

} // namespace grushin
