#include "eikonal/plaplace.hpp"

#include "eikonal/errors.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include <chrono>
#include <cmath>

namespace eikonal {

namespace {

using ColMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

using Cholesky = Eigen::SimplicialLDLT<ColMat>;

// Block-diagonal inverse of the lagged-diffusivity operator, one block per
// component, in the form Eigen's Krylov solvers expect.
class LaggedPreconditioner {
 public:
  using StorageIndex = int;
  enum { ColsAtCompileTime = Eigen::Dynamic, MaxColsAtCompileTime = Eigen::Dynamic };

  LaggedPreconditioner() = default;
  void set(const Cholesky* chol, int blocks, int m) {
    chol_ = chol;
    blocks_ = blocks;
    m_ = m;
  }

  template <typename M>
  LaggedPreconditioner& analyzePattern(const M&) { return *this; }
  template <typename M>
  LaggedPreconditioner& factorize(const M&) { return *this; }
  template <typename M>
  LaggedPreconditioner& compute(const M&) { return *this; }

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
    Eigen::VectorXd x(b.size());
    for (int a = 0; a < blocks_; ++a) x.segment(a * m_, m_) = -chol_->solve(b.segment(a * m_, m_));
    return x;
  }

  Eigen::ComputationInfo info() const { return Eigen::Success; }

 private:
  const Cholesky* chol_ = nullptr;
  int blocks_ = 0;
  int m_ = 0;
};

void require_p(double p) {
  if (!(p >= 2.0 && p <= 64.0)) throw ParameterError("p must lie in [2, 64]");
}

Eigen::VectorXd gradient_norm_sq(const DiffOps& ops, const VectorField& u) {
  return frobenius_sq(gradient_fd(ops, u)).values();
}

Eigen::VectorXd weights_from(const Eigen::VectorXd& n2, double p, double delta) {
  return (n2.array() + delta).pow(0.5 * (p - 2.0)).matrix();
}

// Visits every edge of the five-point stencil once as (k, l, coeff), where
// coeff / 2 multiplies (w_k + w_l) (u_l - u_k) in the row of k and the
// negative in the row of l.
template <typename F>
void for_each_edge(const AnnulusGrid& g, F&& f) {
  const double cs = 1.0 / (g.ds() * g.ds());
  const double ct = angular_balance(g) / (g.dtheta() * g.dtheta());
  for (int i = 0; i < g.nr(); ++i)
    for (int j = 0; j < g.nt(); ++j) {
      const int k = g.index(i, j);
      if (i + 1 < g.nr()) f(k, g.index(i + 1, j), cs);
      f(k, g.index(i, (j + 1) % g.nt()), ct);
    }
}

// A(w) restricted to interior rows, all columns.
SpMat assemble_operator(const AnnulusGrid& g, const Eigen::VectorXd& w) {
  std::vector<Triplet> t;
  t.reserve(10 * g.size());
  for_each_edge(g, [&](int k, int l, double c) {
    const double a = 0.5 * c * (w[k] + w[l]);
    if (!g.on_boundary(k)) {
      t.emplace_back(k, l, a);
      t.emplace_back(k, k, -a);
    }
    if (!g.on_boundary(l)) {
      t.emplace_back(l, k, a);
      t.emplace_back(l, l, -a);
    }
  });
  SpMat A(g.size(), g.size());
  A.setFromTriplets(t.begin(), t.end());
  return A;
}

// Linear map w -> A(w) v, interior rows.
SpMat assemble_weight_map(const AnnulusGrid& g, const Eigen::VectorXd& v) {
  std::vector<Triplet> t;
  t.reserve(10 * g.size());
  for_each_edge(g, [&](int k, int l, double c) {
    const double f = 0.5 * c * (v[l] - v[k]);
    if (!g.on_boundary(k)) {
      t.emplace_back(k, k, f);
      t.emplace_back(k, l, f);
    }
    if (!g.on_boundary(l)) {
      t.emplace_back(l, k, -f);
      t.emplace_back(l, l, -f);
    }
  });
  SpMat C(g.size(), g.size());
  C.setFromTriplets(t.begin(), t.end());
  return C;
}

struct State {
  Eigen::MatrixXd grad;  // 2N x nodes
  Eigen::VectorXd n2, w;
  SpMat A;
  Eigen::MatrixXd R;  // N x nodes, zero on the boundary
  double norm = 0.0;  // weighted L2 of R / r^2 over interior nodes
  double sup = 0.0;   // sup |R / r^2| / sup(w |Du|)
  double energy = 0.0;
};

State evaluate(const DiffOps& ops, const Eigen::MatrixXd& u, double p, double delta) {
  const AnnulusGrid& g = *ops.grid();
  const int N = static_cast<int>(u.rows());
  State s;
  s.grad.resize(2 * N, g.size());
  for (int a = 0; a < N; ++a) {
    const Eigen::VectorXd ua = u.row(a).transpose();
    s.grad.row(2 * a) = (ops.dx() * ua).transpose();
    s.grad.row(2 * a + 1) = (ops.dy() * ua).transpose();
  }
  s.n2 = s.grad.colwise().squaredNorm().transpose();
  s.w = weights_from(s.n2, p, delta);
  s.A = assemble_operator(g, s.w);
  s.R.resize(N, g.size());
  for (int a = 0; a < N; ++a) s.R.row(a) = (s.A * u.row(a).transpose()).transpose();
  double sq = 0.0, sup = 0.0;
  for (int k = 0; k < g.size(); ++k) {
    if (g.on_boundary(k)) continue;
    const double r2 = g.r()[k] * g.r()[k];
    for (int a = 0; a < N; ++a) {
      const double v = s.R(a, k) / r2;
      sq += g.weights()[k] * v * v;
      sup = std::max(sup, std::abs(v));
    }
  }
  const double scale = (s.w.array() * s.n2.array().sqrt()).maxCoeff();
  s.norm = std::sqrt(sq);
  s.sup = scale > 0.0 ? sup / scale : sup;
  s.energy = std::pow(g.weights().dot(s.n2.array().pow(0.5 * p).matrix()), 1.0 / p);
  return s;
}

}  // namespace

double energy_p(const DiffOps& ops, const VectorField& u, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw ParameterError("energy exponent must be finite and >= 1");
  const Eigen::VectorXd n2 = gradient_norm_sq(ops, u);
  return std::pow(ops.grid()->weights().dot(n2.array().pow(0.5 * p).matrix()), 1.0 / p);
}

double energy_sup(const DiffOps& ops, const VectorField& u) {
  return sup_norm(gradient_fd(ops, u));
}

double angular_balance(const AnnulusGrid& grid) {
  const double h = grid.ds(), k = grid.dtheta();
  return (std::cosh(h) - 1.0) * k * k / ((1.0 - std::cos(k)) * h * h);
}

VectorField p_laplacian_residual(const DiffOps& ops, const VectorField& u, double p, double delta) {
  require_p(p);
  if (u.grid() != ops.grid()) throw ShapeError("field lives on a different grid than the operators");
  const State s = evaluate(ops, u.values(), p, delta);
  Eigen::MatrixXd R = s.R;
  for (int k = 0; k < R.cols(); ++k) R.col(k) /= u.grid()->r()[k] * u.grid()->r()[k];
  return VectorField(u.grid(), std::move(R));
}

PSolveResult solve_p_harmonic(const DiffOps& ops, double p, const VectorField& boundary,
                              const VectorField& init, const PSolveOptions& opt) {
  require_p(p);
  const GridPtr& grid = ops.grid();
  const AnnulusGrid& g = *grid;
  if (boundary.grid() != grid || init.grid() != grid || boundary.dim() != init.dim()) {
    throw ShapeError("boundary data and initial guess must share grid and dimension");
  }
  const int N = boundary.dim();

  std::vector<int> interior, slot(g.size(), -1);
  for (int k = 0; k < g.size(); ++k)
    if (!g.on_boundary(k)) {
      slot[k] = static_cast<int>(interior.size());
      interior.push_back(k);
    }
  const int m = static_cast<int>(interior.size());

  Eigen::MatrixXd u = init.values();
  for (int k = 0; k < g.size(); ++k)
    if (g.on_boundary(k)) u.col(k) = boundary.values().col(k);

  PSolveResult out{VectorField(grid, u), 0, 0, 0.0, {}, {}, {}};
  State s = evaluate(ops, u, p, opt.delta);
  for (int it = 0;; ++it) {
    out.residual_history.push_back(s.sup);
    out.energy_history.push_back(s.energy);
    out.iterations = it;
    if (s.sup <= opt.tol) break;
    if (it >= opt.max_iter) {
      throw NoConvergenceError("p-harmonic solve (p = " + std::to_string(p) +
                               ") stalled at relative residual " + std::to_string(s.sup));
    }

    const Eigen::VectorXd wp =
        (p - 2.0) * (s.n2.array() + opt.delta).pow(0.5 * (p - 4.0)).matrix();
    std::vector<Triplet> t;
    for (int a = 0; a < N; ++a) {
      const SpMat Ka = assemble_weight_map(g, u.row(a).transpose()) * wp.asDiagonal();
      for (int b = 0; b < N; ++b) {
        const SpMat Gb = SpMat(s.grad.row(2 * b).transpose().asDiagonal() * ops.dx()) +
                         SpMat(s.grad.row(2 * b + 1).transpose().asDiagonal() * ops.dy());
        SpMat J = Ka * Gb;
        if (a == b) J += s.A;
        for (int row = 0; row < m; ++row) {
          for (SpMat::InnerIterator e(J, interior[row]); e; ++e) {
            const int c = slot[e.col()];
            if (c >= 0) t.emplace_back(a * m + row, b * m + c, e.value());
          }
        }
      }
    }
    ColMat J(N * m, N * m);
    J.setFromTriplets(t.begin(), t.end());

    // -A on interior unknowns is symmetric positive definite.
    std::vector<Triplet> ta;
    for (int row = 0; row < m; ++row)
      for (SpMat::InnerIterator e(s.A, interior[row]); e; ++e) {
        const int c = slot[e.col()];
        if (c >= 0) ta.emplace_back(row, c, -e.value());
      }
    ColMat negA(m, m);
    negA.setFromTriplets(ta.begin(), ta.end());
    Cholesky chol(negA);
    if (chol.info() != Eigen::Success) throw NoConvergenceError("lagged-diffusivity matrix is not definite");

    Eigen::VectorXd rhs(N * m);
    for (int a = 0; a < N; ++a)
      for (int row = 0; row < m; ++row) rhs[a * m + row] = -s.R(a, interior[row]);
    Eigen::BiCGSTAB<ColMat, LaggedPreconditioner> krylov;
    krylov.compute(J);
    krylov.preconditioner().set(&chol, N, m);
    krylov.setTolerance(opt.inner_tol);
    krylov.setMaxIterations(opt.inner_max_iter);
    const Eigen::VectorXd d = krylov.solve(rhs);
    out.inner_iterations += static_cast<int>(krylov.iterations());
    if (!d.allFinite()) throw NoConvergenceError("Newton correction is not finite");

    double theta = 1.0;
    Eigen::MatrixXd trial;
    State next;
    while (true) {
      trial = u;
      for (int a = 0; a < N; ++a)
        for (int row = 0; row < m; ++row) trial(a, interior[row]) += theta * d[a * m + row];
      next = evaluate(ops, trial, p, opt.delta);
      if (next.norm < (1.0 - 1e-4 * theta) * s.norm || theta < 1e-6) break;
      theta *= 0.5;
    }
    out.step_history.push_back(theta);
    u = trial;
    s = std::move(next);
  }
  out.u = VectorField(grid, u);
  out.residual = s.sup;
  return out;
}

RadialCheck radial_benchmark(const DiffOps& ops, double p, const PSolveOptions& opt) {
  require_p(p);
  const GridPtr& grid = ops.grid();
  const double r0 = grid->r0(), r1 = grid->r1();
  const double alpha = (p - 2.0) / (p - 1.0);
  auto exact = [&](double r) {
    if (alpha == 0.0) return std::log(r / r0) / std::log(r1 / r0);
    return (std::pow(r, alpha) - std::pow(r0, alpha)) / (std::pow(r1, alpha) - std::pow(r0, alpha));
  };
  Eigen::MatrixXd bnd = Eigen::MatrixXd::Zero(1, grid->size());
  Eigen::MatrixXd init(1, grid->size());
  for (int k = 0; k < grid->size(); ++k) {
    if (grid->ring(k) == grid->nr() - 1) bnd(0, k) = 1.0;
    init(0, k) = std::log(grid->r()[k] / r0) / std::log(r1 / r0);
  }
  const PSolveResult res =
      solve_p_harmonic(ops, p, VectorField(grid, bnd), VectorField(grid, init), opt);
  RadialCheck c;
  c.p = p;
  c.iterations = res.iterations;
  for (int k = 0; k < grid->size(); ++k) {
    c.error = std::max(c.error, std::abs(res.u.values()(0, k) - exact(grid->r()[k])));
  }
  return c;
}

PLimitReport compare_p_limit(const DiffOps& ops, const std::vector<double>& ps,
                             const VectorField& analytic, const PSolveOptions& opt,
                             double init_fraction) {
  for (std::size_t i = 1; i < ps.size(); ++i) {
    if (!(ps[i] > ps[i - 1])) throw ParameterError("exponents must be increasing");
  }
  const GridPtr& grid = ops.grid();
  const VectorField id = VectorField::identity(grid);
  PLimitReport rep;
  rep.dist_analytic_identity = sup_norm(analytic - id);
  rep.einf_analytic = energy_sup(ops, analytic);
  rep.einf_identity = energy_sup(ops, id);
  rep.einf_gap = rep.einf_analytic - rep.einf_identity;
  const VectorField init = id + (analytic - id).scaled(init_fraction);
  for (double p : ps) {
    const auto t0 = std::chrono::steady_clock::now();
    const PSolveResult res = solve_p_harmonic(ops, p, id, init, opt);
    PLimitEntry e;
    e.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    e.p = p;
    e.err_identity = sup_norm(res.u - id);
    e.gap_analytic = sup_norm(res.u - analytic);
    e.einf = energy_sup(ops, res.u);
    e.iterations = res.iterations;
    e.residual = res.residual;
    for (std::size_t i = 1; i < res.energy_history.size(); ++i) {
      const double rise = res.energy_history[i] / res.energy_history[i - 1] - 1.0;
      e.energy_max_rise = std::max(e.energy_max_rise, rise);
    }
    e.energy_monotone = e.energy_max_rise <= 1e-10;
    rep.entries.push_back(e);
  }
  return rep;
}

}  // namespace eikonal
