#include "eikonal/div_solver.hpp"

#include "eikonal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace eikonal {

namespace {

std::string fmt_g(double v) {
  std::ostringstream o;
  o << v;
  return o.str();
}

}  // namespace

bool check_compatibility(const ScalarField& f, double tol) {
  return std::abs(mean_value(f)) <= tol;
}

DivergenceSolver::DivergenceSolver(const DiffOps& ops) : ops_(ops) {
  const AnnulusGrid& g = *ops.grid();
  for (int k = 0; k < g.size(); ++k)
    if (!g.on_boundary(k)) interior_.push_back(k);
  const int m = static_cast<int>(interior_.size());

  std::vector<int> col_of(g.size(), -1);
  for (int c = 0; c < m; ++c) col_of[interior_[c]] = c;

  std::vector<Eigen::Triplet<double>> t;
  for (int row = 0; row < m; ++row) {
    const int k = interior_[row];
    for (int comp = 0; comp < 2; ++comp) {
      const SpMat& D = comp == 0 ? ops.dx() : ops.dy();
      for (SpMat::InnerIterator it(D, k); it; ++it) {
        const int c = col_of[it.col()];
        if (c >= 0) t.emplace_back(row, comp * m + c, it.value());
      }
    }
  }
  D_.resize(m, 2 * m);
  D_.setFromTriplets(t.begin(), t.end());

  omega_.resize(2 * m);
  w_int_.resize(m);
  for (int c = 0; c < m; ++c) {
    const int i = g.ring(interior_[c]);
    const double d = std::min(i, g.nr() - 1 - i);
    omega_[c] = omega_[m + c] = d;
    w_int_[c] = g.weights()[interior_[c]];
  }
  A_ = D_ * omega_.asDiagonal() * SpMat(D_.transpose());
  diag_ = A_.diagonal();
}

Eigen::VectorXd DivergenceSolver::apply_interior(const VectorField& u) const {
  const int m = static_cast<int>(interior_.size());
  Eigen::VectorXd x(2 * m);
  for (int c = 0; c < m; ++c) {
    x[c] = u.values()(0, interior_[c]);
    x[m + c] = u.values()(1, interior_[c]);
  }
  return D_ * x;
}

double DivergenceSolver::solver_norm(const VectorField& u) const {
  const int m = static_cast<int>(interior_.size());
  double s = 0.0;
  for (int c = 0; c < m; ++c) {
    const int k = interior_[c];
    s += (u.values()(0, k) * u.values()(0, k) + u.values()(1, k) * u.values()(1, k)) / omega_[c];
  }
  return std::sqrt(s);
}

DivSolution DivergenceSolver::solve(const ScalarField& f, const DivSolveOptions& opt) const {
  const GridPtr& grid = ops_.grid();
  if (f.grid() != grid) throw ShapeError("right-hand side lives on a different grid");
  if (!check_compatibility(f, opt.compat_tol)) {
    throw IncompatibleDataError("data has mean " + fmt_g(mean_value(f)) +
                                "; no zero-boundary field has this divergence");
  }
  const int m = static_cast<int>(interior_.size());
  const int max_iter =
      opt.max_iter > 0 ? opt.max_iter : static_cast<int>(10.0 * std::sqrt(grid->size()));

  Eigen::VectorXd b(m);
  for (int c = 0; c < m; ++c) b[c] = f[interior_[c]];
  auto wnorm = [&](const Eigen::VectorXd& v) { return std::sqrt(w_int_.dot(v.cwiseAbs2())); };
  const double bnorm = wnorm(b);

  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(m);
  int it = 0;
  double rel = 0.0;
  if (bnorm > 0.0) {
    Eigen::VectorXd r = b;
    Eigen::VectorXd z = r.cwiseQuotient(diag_);
    Eigen::VectorXd p = z;
    double rz = r.dot(z);
    rel = 1.0;
    while (true) {
      if (it >= max_iter) {
        throw NoConvergenceError("divergence solve stalled at relative residual " +
                                 fmt_g(rel) + " after " + std::to_string(it) +
                                 " iterations");
      }
      const Eigen::VectorXd Ap = A_ * p;
      const double alpha = rz / p.dot(Ap);
      lambda += alpha * p;
      r -= alpha * Ap;
      ++it;
      rel = wnorm(r) / bnorm;
      if (rel <= opt.tol) break;
      z = r.cwiseQuotient(diag_);
      const double rz_new = r.dot(z);
      p = z + (rz_new / rz) * p;
      rz = rz_new;
    }
  }

  const Eigen::VectorXd x = omega_.cwiseProduct(D_.transpose() * lambda);
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(2, grid->size());
  for (int c = 0; c < m; ++c) {
    u(0, interior_[c]) = x[c];
    u(1, interior_[c]) = x[m + c];
  }
  DivSolution sol{VectorField(grid, std::move(u)), it, 0.0, 0.0};
  const Eigen::VectorXd ri = D_ * x - b;
  sol.interior_residual = bnorm > 0.0 ? wnorm(ri) / bnorm : wnorm(ri);
  const ScalarField full(grid, divergence(ops_, sol.u).values() - f.values());
  const double fn = l2_norm(f);
  sol.residual = fn > 0.0 ? l2_norm(full) / fn : l2_norm(full);
  return sol;
}

double bump_value(const Eigen::Vector2d& center, double radius, double amplitude,
                  const Eigen::Vector2d& x) {
  const double q = (x - center).squaredNorm() / (radius * radius);
  if (q >= 1.0) return 0.0;
  return amplitude * radius * radius * std::exp(-1.0 / (1.0 - q));
}

ScalarField make_bump_potential(const GridPtr& grid, const Eigen::Vector2d& center, double radius,
                                double amplitude) {
  const double c = center.norm();
  if (!(radius > 0.0) || c - radius <= grid->r0() || c + radius >= grid->r1()) {
    throw GeometryError("bump support must lie inside the open annulus");
  }
  Eigen::VectorXd v(grid->size());
  for (int k = 0; k < grid->size(); ++k) {
    v[k] = bump_value(center, radius, amplitude, {grid->x1()[k], grid->x2()[k]});
  }
  return ScalarField(grid, std::move(v));
}

}  // namespace eikonal
