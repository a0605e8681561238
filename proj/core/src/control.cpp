#include "grushin/control.hpp"

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>

#include "grushin/function.hpp"

namespace grushin {

namespace {

// Nearest grid node to x (ties resolve to the lower node).
int nearest_node(const Grid1D& grid, double x) {
  const Eigen::VectorXd& nodes = grid.nodes();
  int best = 0;
  double dist = std::abs(nodes[0] - x);
  for (int i = 1; i < grid.n_nodes(); ++i) {
    const double d = std::abs(nodes[i] - x);
    if (d < dist) {
      dist = d;
      best = i;
    }
  }
  return best;
}

void check_layout(const Field2D& f, const ModeFamily& fam, const char* where) {
  if (f.n_modes() != fam.n_modes())
    throw std::invalid_argument(std::string(where) + ": mode count mismatch");
  if (f.grid != fam.grid())
    throw std::invalid_argument(std::string(where) + ": field grid differs from family grid");
  for (int j = 0; j < f.n_modes(); ++j)
    if (f.modes[j].size() != fam.ops[j].dim())
      throw std::invalid_argument(std::string(where) + ": coefficient size mismatch");
}

Field2D field_like(const ModeFamily& fam) { return zero_field(fam); }

void axpy(double a, const Field2D& x, Field2D& y) {
  for (int j = 0; j < y.n_modes(); ++j) y.modes[j] += a * x.modes[j];
}

Field2D lincomb(double a, const Field2D& x, double b, const Field2D& y,
                const ModeFamily& fam) {
  Field2D out = field_like(fam);
  for (int j = 0; j < out.n_modes(); ++j)
    out.modes[j] = a * x.modes[j] + b * y.modes[j];
  return out;
}

int time_steps(double T, double dt) {
  if (dt <= 0.0) return 64;
  return static_cast<int>(std::max<long long>(1, std::llround(T / dt)));
}

} // namespace

// ---------------------------------------------------------------------------
// Rect and the restriction operator

Rect::Rect(double x_lo, double x_hi, double y_lo, double y_hi)
    : x0(x_lo), x1(x_hi), y0(y_lo), y1(y_hi) {
  if (!(x0 >= -1.0 && x0 < x1 && x1 <= 1.0))
    throw std::invalid_argument("Rect: need -1 <= x0 < x1 <= 1");
  if (!(y0 >= 0.0 && y0 < y1 && y1 <= 1.0))
    throw std::invalid_argument("Rect: need 0 <= y0 < y1 <= 1");
}

Eigen::MatrixXd sine_window_overlap(int n_modes, double y0, double y1) {
  if (n_modes < 1) throw std::invalid_argument("sine_window_overlap: n_modes >= 1");
  if (y0 == 0.0 && y1 == 1.0)
    return Eigen::MatrixXd::Identity(n_modes, n_modes);
  const double pi = std::numbers::pi;
  Eigen::MatrixXd Y(n_modes, n_modes);
  for (int n = 1; n <= n_modes; ++n) {
    for (int m = n; m <= n_modes; ++m) {
      double v;
      if (n == m) {
        auto F = [&](double y) { return y - std::sin(2.0 * n * pi * y) / (2.0 * n * pi); };
        v = F(y1) - F(y0);
      } else {
        auto F = [&](double y) {
          return std::sin((n - m) * pi * y) / ((n - m) * pi) -
                 std::sin((n + m) * pi * y) / ((n + m) * pi);
        };
        v = F(y1) - F(y0);
      }
      Y(n - 1, m - 1) = v;
      Y(m - 1, n - 1) = v;
    }
  }
  return Y;
}

Eigen::MatrixXd windowed_mass(const Operator1D& op, double lo, double hi,
                              double* snapped_lo, double* snapped_hi) {
  const Grid1D& grid = *op.grid();
  const int ilo = nearest_node(grid, lo);
  const int ihi = nearest_node(grid, hi);
  if (ilo >= ihi)
    throw std::invalid_argument(
        "windowed_mass: window collapses after snapping to grid nodes");
  const double slo = grid.node(ilo);
  const double shi = grid.node(ihi);
  if (snapped_lo) *snapped_lo = slo;
  if (snapped_hi) *snapped_hi = shi;

  const QuadRule rule = grid.quadrature_on_interval(slo, shi);
  const int m = op.dim();
  const int nq = rule.size();
  Eigen::MatrixXd values(nq, m);
  for (int i = 0; i < m; ++i) {
    const Function1D phi = op.basis_function(i);
    for (int q = 0; q < nq; ++q) values(q, i) = phi.value(rule.points[q]);
  }
  return values.transpose() * rule.weights.asDiagonal() * values;
}

OmegaProjector::OmegaProjector(const ModeFamily& fam, const Rect& omega)
    : requested_(omega) {
  Y_ = sine_window_overlap(fam.n_modes(), omega.y0, omega.y1);
  const Operator1D& op = fam.ops.front();
  if (omega.x0 == -1.0 && omega.x1 == 1.0) {
    sx0_ = -1.0;
    sx1_ = 1.0;
    B_ = op.mass();
    Px_ = Eigen::MatrixXd::Identity(op.dim(), op.dim());
  } else {
    B_ = windowed_mass(op, omega.x0, omega.x1, &sx0_, &sx1_);
    Px_ = op.mass().ldlt().solve(B_);
  }
}

Field2D OmegaProjector::apply(const Field2D& f, const ModeFamily& fam) const {
  check_layout(f, fam, "OmegaProjector::apply");
  if (Y_.rows() != fam.n_modes() || Px_.rows() != fam.ops.front().dim())
    throw std::invalid_argument("OmegaProjector::apply: projector/family mismatch");
  Field2D out = field_like(fam);
  const int N = fam.n_modes();
  for (int n = 0; n < N; ++n) {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(f.modes[0].size());
    for (int m = 0; m < N; ++m) {
      const double ynm = Y_(n, m);
      if (ynm != 0.0) s += ynm * f.modes[m];
    }
    out.modes[n] = Px_ * s;
  }
  return out;
}

Field2D restrict_omega(const Field2D& f, const Rect& omega,
                       const ModeFamily& fam) {
  return OmegaProjector(fam, omega).apply(f, fam);
}

double side_mass(const Field2D& f, const ModeFamily& fam, int side) {
  if (side != 1 && side != -1)
    throw std::invalid_argument("side_mass: side must be +1 or -1");
  check_layout(f, fam, "side_mass");
  const Eigen::MatrixXd B = (side > 0)
                                ? windowed_mass(fam.ops.front(), 0.0, 1.0)
                                : windowed_mass(fam.ops.front(), -1.0, 0.0);
  double sq = 0.0;
  for (int j = 0; j < f.n_modes(); ++j)
    sq += f.modes[j].dot(B * f.modes[j]);
  return std::sqrt(std::max(0.0, sq));
}

std::function<double(double)> bump1d(double center, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("bump1d: radius must be > 0");
  return [center, radius](double x) {
    const double s = (x - center) / radius;
    const double s2 = s * s;
    if (s2 >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s2));
  };
}

std::function<double(double, double)> bump2d(double cx, double rx, double cy,
                                             double ry) {
  auto bx = bump1d(cx, rx);
  auto by = bump1d(cy, ry);
  return [bx, by](double x, double y) { return bx(x) * by(y); };
}

// ---------------------------------------------------------------------------
// Gramian and the penalized-HUM solve

GramianOperator::GramianOperator(const ModeFamily& fam,
                                 const OmegaProjector& proj, double T,
                                 double dt) {
  if (!(T > 0.0))
    throw std::invalid_argument("GramianOperator: T must be > 0");
  const int N = fam.n_modes();
  const Eigen::MatrixXd& B = proj.window_gram();
  const Eigen::MatrixXd& Y = proj.y_overlap();
  if (Y.rows() != N || B.rows() != fam.ops.front().dim())
    throw std::invalid_argument("GramianOperator: projector/family mismatch");
  n_steps_ = time_steps(T, dt);
  h_ = T / n_steps_;

  // Retain eigenpairs whose propagator factor at the closest sample
  // s = h/2 exceeds exp(-60); dropped pairs change nothing at double
  // precision (every sample weight is below 1e-26).
  const double lam_cut = 120.0 / h_;
  kept_.assign(static_cast<size_t>(N), 0);
  offsets_.assign(static_cast<size_t>(N), 0);
  basis_.resize(static_cast<size_t>(N));
  adjoint_.resize(static_cast<size_t>(N));
  std::vector<Eigen::VectorXd> lam(static_cast<size_t>(N));
  int K = 0;
  for (int n = 0; n < N; ++n) {
    const EigenSystem& eig = fam.eigs[static_cast<size_t>(n)];
    int k = 0;
    while (k < eig.count() && eig.values[k] <= lam_cut) ++k;
    const auto un = static_cast<size_t>(n);
    kept_[un] = k;
    offsets_[un] = K;
    K += k;
    basis_[un] = eig.vectors.leftCols(k);
    adjoint_[un] = (fam.ops[un].mass() * basis_[un]).transpose();
    lam[un] = eig.values.head(k);
  }

  // Midpoint quadrature sum h sum_j exp(-s (j+1/2) h) in closed form; the
  // expm1 ratio is stable for s h << 1 and tends to the flat limit T as
  // s -> 0.
  const double Ttot = h_ * n_steps_;
  auto tau_factor = [h = h_, Ttot](double s) {
    if (!(s > 0.0)) return Ttot;
    return h * std::exp(-0.5 * s * h) * (std::expm1(-s * Ttot) / std::expm1(-s * h));
  };

  // A[(n,i),(m,j)] = Y(n,m) (V_n^T B V_m)(i,j) tau(lam_{n,i} + lam_{m,j}).
  A_ = Eigen::MatrixXd::Zero(K, K);
  std::vector<Eigen::MatrixXd> BV(static_cast<size_t>(N));
  for (int m = 0; m < N; ++m)
    if (kept_[static_cast<size_t>(m)] > 0)
      BV[static_cast<size_t>(m)] = B * basis_[static_cast<size_t>(m)];
  for (int n = 0; n < N; ++n) {
    const auto un = static_cast<size_t>(n);
    if (kept_[un] == 0) continue;
    for (int m = n; m < N; ++m) {
      const auto um = static_cast<size_t>(m);
      if (kept_[um] == 0) continue;
      const double ynm = Y(n, m);
      if (ynm == 0.0) continue;
      Eigen::MatrixXd blk = basis_[un].transpose() * BV[um];
      for (int i = 0; i < kept_[un]; ++i)
        for (int j = 0; j < kept_[um]; ++j)
          blk(i, j) *= ynm * tau_factor(lam[un][i] + lam[um][j]);
      A_.block(offsets_[un], offsets_[um], kept_[un], kept_[um]) = blk;
      if (m != n)
        A_.block(offsets_[um], offsets_[un], kept_[um], kept_[un]) =
            blk.transpose();
    }
  }
  A_ = (0.5 * (A_ + A_.transpose())).eval();  // exact symmetry for CG
}

Field2D GramianOperator::apply(const Field2D& g, const ModeFamily& fam) const {
  check_layout(g, fam, "GramianOperator::apply");
  if (static_cast<int>(kept_.size()) != fam.n_modes())
    throw std::invalid_argument("GramianOperator::apply: family mismatch");
  const int N = fam.n_modes();
  Eigen::VectorXd ghat(A_.rows());
  for (int n = 0; n < N; ++n) {
    const auto un = static_cast<size_t>(n);
    if (kept_[un] > 0)
      ghat.segment(offsets_[un], kept_[un]) = adjoint_[un] * g.modes[un];
  }
  const Eigen::VectorXd hhat = A_ * ghat;
  Field2D out = field_like(fam);
  for (int n = 0; n < N; ++n) {
    const auto un = static_cast<size_t>(n);
    if (kept_[un] > 0)
      out.modes[un] = basis_[un] * hhat.segment(offsets_[un], kept_[un]);
  }
  return out;
}

Field2D gramian_apply(const Field2D& gT, const ModeFamily& fam,
                      const OmegaProjector& proj, double T, double dt,
                      int n_threads) {
  (void)n_threads;
  return GramianOperator(fam, proj, T, dt).apply(gT, fam);
}

ControlResult solve_control(const ControlProblem& problem,
                            const ModeFamily& fam) {
  if (!(problem.T > 0.0))
    throw std::invalid_argument("solve_control: T must be > 0");
  if (!(problem.beta > 0.0))
    throw std::invalid_argument("solve_control: beta must be > 0");
  if (problem.cg_maxiter < 1)
    throw std::invalid_argument("solve_control: cg_maxiter must be >= 1");
  check_layout(problem.f0, fam, "solve_control(f0)");
  check_layout(problem.fT, fam, "solve_control(fT)");

  const double T = problem.T;
  const double beta = problem.beta;
  const int J = time_steps(T, problem.dt);
  const double h = T / J;
  const OmegaProjector proj(fam, problem.omega);
  const GramianOperator gram(fam, proj, T, h);

  // Normal equations (Lambda + beta I) gT = fT - S(T) f0, solved by CG in
  // the L2 field inner product (Lambda is L2-self-adjoint).
  const Field2D free_T = evolve2d(problem.f0, fam, T, problem.n_threads);
  const Field2D rhs = lincomb(1.0, problem.fT, -1.0, free_T, fam);
  const double rhs_norm = field_norm(rhs, fam);

  ControlResult res;
  res.beta = beta;
  res.times = Eigen::VectorXd(J);
  for (int k = 0; k < J; ++k) res.times[k] = (k + 0.5) * h;

  Field2D gT = field_like(fam);
  if (rhs_norm > 0.0) {
    Field2D r = rhs;
    Field2D p = r;
    double rr = field_inner(r, r, fam);
    int it = 0;
    bool done = false;
    while (it < problem.cg_maxiter) {
      Field2D Ap = gram.apply(p, fam);
      axpy(beta, p, Ap);
      const double pAp = field_inner(p, Ap, fam);
      if (!(pAp > 0.0)) break;  // numerical breakdown; keep partial iterate
      const double alpha = rr / pAp;
      axpy(alpha, p, gT);
      axpy(-alpha, Ap, r);
      const double rr_new = field_inner(r, r, fam);
      ++it;
      const double stop = std::max(problem.cg_tol * rhs_norm,
                                   1e-9 * beta * field_norm(gT, fam));
      if (std::sqrt(std::max(0.0, rr_new)) <= stop) {
        done = true;
        break;
      }
      p = lincomb(1.0, r, rr_new / rr, p, fam);
      rr = rr_new;
    }
    res.cg_iters = it;
    res.converged = done;
  }

  // Control samples u(tau_k) = chi_omega S(T - tau_k) gT at the midpoints.
  res.control.reserve(J);
  double unorm_sq = 0.0;
  for (int k = 0; k < J; ++k) {
    Field2D u = proj.apply(evolve2d(gT, fam, T - res.times[k], problem.n_threads), fam);
    unorm_sq += h * std::pow(field_norm(u, fam), 2);
    res.control.push_back(std::move(u));
  }
  res.control_norm = std::sqrt(unorm_sq);
  res.dual_state_norm = field_norm(gT, fam);

  // Controlled trajectory by the same midpoint Duhamel quadrature; the
  // source lookup indexes the precomputed samples (mild_solution evaluates
  // the source exactly at the midpoints).
  auto source = [&](double t) -> Field2D {
    const int k = static_cast<int>(std::llround(t / h - 0.5));
    if (k < 0 || k >= J)
      throw std::logic_error("solve_control: source sampled off the midpoint grid");
    return res.control[k];
  };
  const EvolutionResult traj =
      mild_solution(problem.f0, source, T, h, fam, problem.n_threads);
  res.terminal_state = traj.states.back();
  const Field2D& fT_reached = res.terminal_state;

  const Field2D miss = lincomb(1.0, problem.fT, -1.0, fT_reached, fam);
  const double fT_norm = field_norm(problem.fT, fam);
  const double miss_norm = field_norm(miss, fam);
  res.terminal_error = fT_norm > 0.0 ? miss_norm / fT_norm : miss_norm;
  if (res.dual_state_norm > 0.0) {
    const Field2D defect = lincomb(1.0, miss, -beta, gT, fam);
    res.identity_defect =
        field_norm(defect, fam) / (beta * res.dual_state_norm);
  }
  return res;
}

// ---------------------------------------------------------------------------
// Coarse observability certificate

UCReport uc_certificate(const ModeFamily& fam, const Rect& omega, double T,
                        double dt, int coarse_nx, int coarse_ny,
                        int n_threads) {
  if (coarse_nx < 1 || coarse_ny < 1)
    throw std::invalid_argument("uc_certificate: coarse dimensions must be >= 1");
  if (coarse_ny > fam.n_modes())
    throw std::invalid_argument("uc_certificate: coarse_ny exceeds the mode count");
  for (int j = 0; j < coarse_ny; ++j)
    if (coarse_nx > fam.eigs[j].count())
      throw std::invalid_argument("uc_certificate: coarse_nx exceeds the eigensystem size");

  (void)n_threads;
  const OmegaProjector proj(fam, omega);
  const GramianOperator gram(fam, proj, T, dt);
  const int dim = coarse_nx * coarse_ny;

  // The coarse basis e_{(j,i)} = (mode j, eigenvector i) is L2-orthonormal,
  // so the compressed Gramian is a submatrix of gram.matrix().  Pairs beyond
  // the retained count are annihilated by the semigroup (below exp(-60) at
  // every quadrature sample) and contribute zero rows.
  UCReport rep;
  rep.dim = dim;
  rep.gramian = Eigen::MatrixXd::Zero(dim, dim);
  for (int j = 0; j < coarse_ny; ++j) {
    for (int i = 0; i < coarse_nx && i < gram.kept(j); ++i) {
      const int a = j * coarse_nx + i;
      for (int j2 = 0; j2 < coarse_ny; ++j2)
        for (int i2 = 0; i2 < coarse_nx && i2 < gram.kept(j2); ++i2)
          rep.gramian(a, j2 * coarse_nx + i2) =
              gram.matrix()(gram.offset(j) + i, gram.offset(j2) + i2);
    }
  }
  rep.gramian = 0.5 * (rep.gramian + rep.gramian.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rep.gramian);
  rep.eigenvalues = es.eigenvalues();
  rep.min_eig = rep.eigenvalues[0];
  return rep;
}

// ---------------------------------------------------------------------------
// Single-mode control

ControlResult1D control_1d(const ControlProblem1D& problem,
                           const Operator1D& op, const EigenSystem& eig) {
  if (!(problem.T > 0.0))
    throw std::invalid_argument("control_1d: T must be > 0");
  if (!(problem.beta > 0.0))
    throw std::invalid_argument("control_1d: beta must be > 0");
  if (problem.f0.size() != op.dim() || problem.fT.size() != op.dim())
    throw std::invalid_argument("control_1d: coefficient size mismatch");

  const double T = problem.T;
  const double beta = problem.beta;
  const int J = time_steps(T, problem.dt);
  const double h = T / J;

  const Eigen::MatrixXd B = windowed_mass(op, problem.x0, problem.x1);
  const Eigen::MatrixXd Px = op.mass().ldlt().solve(B);

  auto gramian = [&](const Eigen::VectorXd& g) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(op.dim());
    for (int k = 0; k < J; ++k) {
      const double s = T - (k + 0.5) * h;
      acc += h * evolve1d(op, eig, Px * evolve1d(op, eig, g, s), s);
    }
    return acc;
  };

  const Eigen::VectorXd rhs = problem.fT - evolve1d(op, eig, problem.f0, T);
  const double rhs_norm = op.norm(rhs);

  ControlResult1D res;
  res.beta = beta;
  res.times = Eigen::VectorXd(J);
  for (int k = 0; k < J; ++k) res.times[k] = (k + 0.5) * h;

  Eigen::VectorXd gT = Eigen::VectorXd::Zero(op.dim());
  if (rhs_norm > 0.0) {
    Eigen::VectorXd r = rhs;
    Eigen::VectorXd p = r;
    double rr = op.inner(r, r);
    int it = 0;
    bool done = false;
    while (it < problem.cg_maxiter) {
      Eigen::VectorXd Ap = gramian(p) + beta * p;
      const double pAp = op.inner(p, Ap);
      if (!(pAp > 0.0)) break;
      const double alpha = rr / pAp;
      gT += alpha * p;
      r -= alpha * Ap;
      const double rr_new = op.inner(r, r);
      ++it;
      const double stop =
          std::max(problem.cg_tol * rhs_norm, 1e-9 * beta * op.norm(gT));
      if (std::sqrt(std::max(0.0, rr_new)) <= stop) {
        done = true;
        break;
      }
      p = r + (rr_new / rr) * p;
      rr = rr_new;
    }
    res.cg_iters = it;
    res.converged = done;
  }

  res.control.reserve(J);
  double unorm_sq = 0.0;
  for (int k = 0; k < J; ++k) {
    Eigen::VectorXd u = Px * evolve1d(op, eig, gT, T - res.times[k]);
    unorm_sq += h * op.inner(u, u);
    res.control.push_back(std::move(u));
  }
  res.control_norm = std::sqrt(std::max(0.0, unorm_sq));
  res.dual_state_norm = op.norm(gT);

  // Controlled trajectory: f <- S(h) f + h S(h/2) u(t_mid), matching the
  // Gramian quadrature exactly.
  Eigen::VectorXd f = problem.f0;
  for (int k = 0; k < J; ++k)
    f = evolve1d(op, eig, f, h) + h * evolve1d(op, eig, res.control[k], 0.5 * h);
  res.terminal_state = f;

  const Eigen::VectorXd miss = problem.fT - f;
  const double fT_norm = op.norm(problem.fT);
  res.terminal_error = fT_norm > 0.0 ? op.norm(miss) / fT_norm : op.norm(miss);
  if (res.dual_state_norm > 0.0)
    res.identity_defect =
        op.norm(miss - beta * gT) / (beta * res.dual_state_norm);
  return res;
}

} // namespace grushin
