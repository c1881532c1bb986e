#pragma once

#include "eikonal/core_fields.hpp"
#include "eikonal/diff_ops.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <vector>

namespace eikonal {

struct DivSolveOptions {
  double tol = 1e-10;
  int max_iter = 0;  // 0 selects 10 * sqrt(node count)
  // Largest admissible |mean(f)|.
  double compat_tol = 1e-8;
};

struct DivSolution {
  VectorField u;
  int iterations = 0;
  // Relative residual over interior rows, the quantity the solve controls.
  double interior_residual = 0.0;
  // Relative residual over all nodes.
  double residual = 0.0;
};

bool check_compatibility(const ScalarField& f, double tol);

// Right inverse of the discrete divergence with u = 0 on both circles.
// Unknowns are the interior-node values of u; equations are the interior
// rows of the divergence (boundary rows are extrapolations of them). Among
// all solutions it returns the one minimising sum_k |u_k|^2 / d_k, where d_k
// is the ring distance of node k to the nearer boundary circle.
class DivergenceSolver {
 public:
  explicit DivergenceSolver(const DiffOps& ops);

  const DiffOps& ops() const { return ops_; }
  DivSolution solve(const ScalarField& f, const DivSolveOptions& opt = {}) const;

  // The norm minimised by solve().
  double solver_norm(const VectorField& u) const;

  // Applies the interior divergence rows to interior unknowns.
  Eigen::VectorXd apply_interior(const VectorField& u) const;

 private:
  const DiffOps& ops_;
  std::vector<int> interior_;
  SpMat D_;  // interior rows x 2 * interior unknowns
  Eigen::VectorXd omega_;
  SpMat A_;
  Eigen::VectorXd diag_;
  Eigen::VectorXd w_int_;
};

double bump_value(const Eigen::Vector2d& center, double radius, double amplitude,
                  const Eigen::Vector2d& x);

// amplitude * radius^2 * exp(-1 / (1 - |x - c|^2 / radius^2)) inside the ball.
ScalarField make_bump_potential(const GridPtr& grid, const Eigen::Vector2d& center, double radius,
                                double amplitude);

}  // namespace eikonal
