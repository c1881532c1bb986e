#include "eikonal/ift_solver.hpp"

#include "eikonal/errors.hpp"

#include <cmath>
#include <string>

namespace eikonal {

SeedSpec default_seed(const AnnulusGrid& grid, double amplitude, double angle) {
  const double frac = 4.0 / kTwoPi;
  const double rc = grid.r0() * std::pow(grid.r1() / grid.r0(), frac);
  SeedSpec s;
  s.center = rc * Eigen::Vector2d(std::cos(angle), std::sin(angle));
  s.radius = 0.5 * rc;
  s.amplitude = amplitude;
  return s;
}

VectorField make_seed(const DiffOps& ops, const SeedSpec& spec) {
  return curl_star(ops, make_bump_potential(ops.grid(), spec.center, spec.radius, spec.amplitude));
}

ScalarField eval_M(const DiffOps& ops, const VectorField& u) {
  if (u.dim() != 2) throw ShapeError("M needs a planar vector field");
  const ScalarField n2 = frobenius_sq(gradient_fd(ops, u));
  const double avg = mean_value(n2);
  return ScalarField(u.grid(), (0.5 * n2.values() + divergence(ops, u).values()).array() - 0.5 * avg);
}

ScalarField eval_M_derivative(const DiffOps& ops, const VectorField& u, const VectorField& phi) {
  if (u.dim() != 2 || phi.dim() != 2) throw ShapeError("M' needs planar vector fields");
  if (u.grid() != phi.grid()) throw ShapeError("M' arguments live on different grids");
  const MatrixField Du = gradient_fd(ops, u), Dphi = gradient_fd(ops, phi);
  const ScalarField inner(u.grid(), Du.values().cwiseProduct(Dphi.values()).colwise().sum().transpose());
  const double avg = mean_value(inner);
  return ScalarField(u.grid(), (inner.values() + divergence(ops, phi).values()).array() - avg);
}

RootSolution solve_root(const DivergenceSolver& solver, const VectorField& phi,
                        const RootOptions& opt) {
  const DiffOps& ops = solver.ops();
  const GridPtr& grid = ops.grid();
  if (phi.dim() != 2 || phi.grid() != grid) throw ShapeError("seed must be a planar field on the solver grid");
  for (int k = 0; k < grid->size(); ++k) {
    if (grid->on_boundary(k) && phi.at(k).cwiseAbs().maxCoeff() != 0.0) {
      throw IncompatibleDataError("seed does not vanish on the boundary");
    }
  }
  const double seed_grad = sup_norm(gradient_fd(ops, phi));
  if (seed_grad > opt.seed_cap) {
    throw NoConvergenceError("seed outside the admissible neighbourhood: sup|Dphi| = " +
                             std::to_string(seed_grad) + " > " + std::to_string(opt.seed_cap));
  }

  RootSolution sol{phi, VectorField::zero(grid, 2), phi, 0.0, {}, 0, 0, false};
  int growth = 0;
  for (int k = 0;; ++k) {
    const ScalarField m = eval_M(ops, sol.u);
    const double res = l2_norm(m);
    sol.residual_history.push_back(res);
    sol.iterations = k + 1;
    if (!std::isfinite(res)) throw NoConvergenceError("residual became non-finite");
    if (res <= opt.tol) break;
    if (k > 0 && res >= sol.residual_history[k - 1]) {
      if (++growth >= 3) {
        throw NoConvergenceError("residual fails to contract: " + std::to_string(res));
      }
    } else {
      growth = 0;
    }
    if (k + 1 >= opt.max_iter) {
      throw NoConvergenceError("no root after " + std::to_string(opt.max_iter) +
                               " steps; residual " + std::to_string(res));
    }
    const DivSolution d = solver.solve(ScalarField(grid, -m.values()), opt.div);
    sol.div_iterations += d.iterations;
    sol.gamma = sol.gamma + d.u;
    sol.u = sol.phi + sol.gamma;
  }
  sol.C = mean_value(frobenius_sq(gradient_fd(ops, sol.u)));
  sol.trivial = sup_norm(sol.u) == 0.0;
  return sol;
}

AccumulationResult accumulation_check(const DivergenceSolver& solver,
                                      const std::vector<double>& amplitudes,
                                      const RootOptions& opt) {
  for (std::size_t i = 0; i < amplitudes.size(); ++i) {
    if (!(amplitudes[i] > 0.0) || (i > 0 && !(amplitudes[i] < amplitudes[i - 1]))) {
      throw ParameterError("amplitudes must be positive and strictly decreasing");
    }
  }
  const DiffOps& ops = solver.ops();
  AccumulationResult out;
  out.decreasing = out.all_nontrivial = out.all_C_positive = true;
  for (double a : amplitudes) {
    const VectorField phi = make_seed(ops, default_seed(*ops.grid(), a));
    const RootSolution root = solve_root(solver, phi, opt);
    out.amplitudes.push_back(a);
    out.u_sup.push_back(sup_norm(root.u));
    out.seed_sup.push_back(sup_norm(phi));
    out.C.push_back(root.C);
    out.residual.push_back(root.residual_history.back());
    const std::size_t i = out.u_sup.size() - 1;
    if (i > 0 && !(out.u_sup[i] < out.u_sup[i - 1])) out.decreasing = false;
    if (!(out.u_sup[i] > 0.1 * out.seed_sup[i])) out.all_nontrivial = false;
    if (!(root.C > 0.0)) out.all_C_positive = false;
  }
  return out;
}

double determinant_safety_bound() {
  // det(I + A) = 1 + tr A + det A >= 1 - sqrt(2)|A| - |A|^2 / 2
  return std::sqrt(3.0) - std::sqrt(2.0);
}

Counterexample build_counterexample(const DiffOps& ops, const RootSolution& root) {
  const GridPtr& grid = ops.grid();
  const VectorField id = VectorField::identity(grid);
  const VectorField w = id + root.u;
  const MatrixField Dw = gradient_fd(ops, w);
  const MatrixField Du = gradient_fd(ops, root.u);

  Counterexample cx{w, Dw};
  cx.sup_Du = sup_norm(Du);
  cx.within_safety_bound = cx.sup_Du < determinant_safety_bound();
  cx.min_det = determinant_field(Dw).values().minCoeff();
  if (!(cx.min_det > 0.5)) {
    throw DeterminantError("det(Dw) drops to " + std::to_string(cx.min_det) + " <= 1/2");
  }
  const EikonalDeviation dev = eikonal_deviation(Dw);
  cx.constant = dev.mean;
  cx.spread = dev.spread;
  cx.identity_norm_sq = mean_value(frobenius_sq(gradient_fd(ops, id)));

  for (int k = 0; k < grid->size(); ++k) {
    if (grid->on_boundary(k)) {
      cx.boundary_error = std::max(cx.boundary_error, (w.at(k) - id.at(k)).cwiseAbs().maxCoeff());
    }
  }
  cx.einf_w = sup_norm(Dw);
  cx.einf_id = sup_norm(gradient_fd(ops, id));
  cx.einf_gap = cx.einf_w - cx.einf_id;

  const Jet jet = make_jet(ops, w);
  cx.dinf_sup = sup_norm(infinity_laplacian(jet));
  const auto [first, second] = split_residuals(jet);
  cx.first_split_sup = sup_norm(first);
  cx.second_split_sup = sup_norm(second);
  return cx;
}

}  // namespace eikonal
