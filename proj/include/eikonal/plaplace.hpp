#pragma once

#include "eikonal/core_fields.hpp"
#include "eikonal/diff_ops.hpp"

#include <vector>

namespace eikonal {

// (sum_k W_k |Du_k|^p)^(1/p)
double energy_p(const DiffOps& ops, const VectorField& u, double p);

// sup_k |Du_k|
double energy_sup(const DiffOps& ops, const VectorField& u);

// Angular coefficient of the five-point operator. It makes x1 and x2 exact
// discrete solutions of the constant-weight problem, so the identity is a
// discrete p-harmonic map for every p.
double angular_balance(const AnnulusGrid& grid);

// div(|Du|^(p-2) Du) on interior nodes, in conservative five-point form
// r^-2 [d_s(w d_s u) + kappa d_t(w d_t u)] with nodal weights
// w = (|Du|^2 + delta)^((p-2)/2) from gradient_fd. Boundary entries are 0.
VectorField p_laplacian_residual(const DiffOps& ops, const VectorField& u, double p,
                                 double delta = 1e-12);

struct PSolveOptions {
  double tol = 1e-10;  // on sup|residual| / sup(w |Du|)
  int max_iter = 100;
  double delta = 1e-12;
  double inner_tol = 1e-10;
  int inner_max_iter = 2000;
};

struct PSolveResult {
  VectorField u;
  int iterations = 0;
  int inner_iterations = 0;
  double residual = 0.0;
  std::vector<double> residual_history;
  std::vector<double> energy_history;
  std::vector<double> step_history;
};

// Dirichlet problem with u = boundary on both circles, started from init.
// Newton iteration whose matrix is the lagged-diffusivity operator plus the
// derivative of the weight, with backtracking on the residual norm. Each
// correction is a BiCGSTAB solve preconditioned by the lagged-diffusivity
// operator.
PSolveResult solve_p_harmonic(const DiffOps& ops, double p, const VectorField& boundary,
                              const VectorField& init, const PSolveOptions& opt = {});

struct RadialCheck {
  double p = 0.0;
  double error = 0.0;
  int iterations = 0;
};

// Scalar problem u(r0) = 0, u(r1) = 1 against (r^a - r0^a) / (r1^a - r0^a),
// a = (p - 2) / (p - 1).
RadialCheck radial_benchmark(const DiffOps& ops, double p, const PSolveOptions& opt = {});

struct PLimitEntry {
  double p = 0.0;
  double err_identity = 0.0;
  double gap_analytic = 0.0;
  double einf = 0.0;
  int iterations = 0;
  double residual = 0.0;
  double seconds = 0.0;
  // Largest relative increase of E_p between consecutive iterates.
  double energy_max_rise = 0.0;
  bool energy_monotone = false;
};

struct PLimitReport {
  std::vector<PLimitEntry> entries;
  double dist_analytic_identity = 0.0;
  double einf_analytic = 0.0;
  double einf_identity = 0.0;
  double einf_gap = 0.0;
};

// Solves from init = id + init_fraction (analytic - id) for each p.
PLimitReport compare_p_limit(const DiffOps& ops, const std::vector<double>& ps,
                             const VectorField& analytic, const PSolveOptions& opt = {},
                             double init_fraction = 0.5);

}  // namespace eikonal
