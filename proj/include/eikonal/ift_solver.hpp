#pragma once

#include "eikonal/core_fields.hpp"
#include "eikonal/diff_ops.hpp"
#include "eikonal/div_solver.hpp"

#include <Eigen/Dense>

#include <vector>

namespace eikonal {

struct SeedSpec {
  Eigen::Vector2d center;
  double radius = 0.0;
  double amplitude = 0.0;
};

// Bump at log-radius fraction 2/pi of the annulus with radius half its
// distance to the origin; on the default annulus the center is (e^4, 0).
SeedSpec default_seed(const AnnulusGrid& grid, double amplitude, double angle = 0.0);

// curl* of the bump potential: divergence-free up to truncation, zero on the boundary.
VectorField make_seed(const DiffOps& ops, const SeedSpec& spec);

// M[u] = |Du|^2 / 2 + div u - mean(|Du|^2) / 2
ScalarField eval_M(const DiffOps& ops, const VectorField& u);

// M'[u] phi = Du : Dphi + div phi - mean(Du : Dphi)
ScalarField eval_M_derivative(const DiffOps& ops, const VectorField& u, const VectorField& phi);

struct RootOptions {
  double tol = 1e-9;
  int max_iter = 30;
  // Largest admissible sup |Dphi| of the seed.
  double seed_cap = 1.0;
  DivSolveOptions div;
};

struct RootSolution {
  VectorField phi;
  VectorField gamma;
  VectorField u;
  double C = 0.0;
  std::vector<double> residual_history;  // ||M[u_k]||_L2, one entry per evaluation
  int iterations = 0;                    // residual evaluations
  int div_iterations = 0;                // CG iterations summed over all corrections
  bool trivial = false;
};

// Quasi-Newton iteration gamma += div^{-1}(-M[phi + gamma]).
RootSolution solve_root(const DivergenceSolver& solver, const VectorField& phi,
                        const RootOptions& opt = {});

struct AccumulationResult {
  std::vector<double> amplitudes;
  std::vector<double> u_sup;
  std::vector<double> seed_sup;
  std::vector<double> C;
  std::vector<double> residual;
  bool decreasing = false;
  bool all_nontrivial = false;
  bool all_C_positive = false;
};

AccumulationResult accumulation_check(const DivergenceSolver& solver,
                                      const std::vector<double>& amplitudes,
                                      const RootOptions& opt = {});

// sqrt(3) - sqrt(2): |A| below this gives det(I + A) > 1/2 for 2x2 A.
double determinant_safety_bound();

struct Counterexample {
  VectorField w;
  MatrixField Dw;
  double constant = 0.0;  // mean |Dw|^2
  double spread = 0.0;    // max - min of |Dw|^2
  double identity_norm_sq = 0.0;
  double min_det = 0.0;
  double sup_Du = 0.0;
  bool within_safety_bound = false;
  double boundary_error = 0.0;
  double einf_w = 0.0;
  double einf_id = 0.0;
  double einf_gap = 0.0;
  double dinf_sup = 0.0;
  double first_split_sup = 0.0;
  double second_split_sup = 0.0;
};

Counterexample build_counterexample(const DiffOps& ops, const RootSolution& root);

}  // namespace eikonal
