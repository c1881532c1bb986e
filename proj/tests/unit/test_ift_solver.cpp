#include "eikonal/diff_ops.hpp"
#include "eikonal/div_solver.hpp"
#include "eikonal/errors.hpp"
#include "eikonal/ift_solver.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <optional>
#include <random>

using namespace eikonal;

namespace {

struct Fixture {
  GridPtr grid = make_grid(64, 256);
  DiffOps ops{grid};
  DivergenceSolver solver{ops};
  std::optional<RootSolution> root;

  const RootSolution& small_root() {
    if (!root) root = solve_root(solver, make_seed(ops, default_seed(*grid, 1e-2)));
    return *root;
  }
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

double boundary_sup(const VectorField& u) {
  double e = 0.0;
  for (int k = 0; k < u.grid()->size(); ++k)
    if (u.grid()->on_boundary(k)) e = std::max(e, u.values().col(k).cwiseAbs().maxCoeff());
  return e;
}

}  // namespace

TEST(EvalM, ZeroFieldGivesZero) {
  auto& f = fixture();
  EXPECT_EQ(sup_norm(eval_M(f.ops, VectorField::zero(f.grid, 2))), 0.0);
}

TEST(EvalM, LinearRotationCancelsItsOwnAverage) {
  auto& f = fixture();
  Eigen::MatrixXd v(2, f.grid->size());
  v.row(0) = -f.grid->x2().transpose();
  v.row(1) = f.grid->x1().transpose();
  EXPECT_LE(sup_norm(eval_M(f.ops, VectorField(f.grid, v))), 1e-12);
}

TEST(EvalM, CurlOfBumpByDirectEvaluation) {
  auto& f = fixture();
  const VectorField u = make_seed(f.ops, default_seed(*f.grid, 0.05));
  const ScalarField du2 = frobenius_sq(gradient_fd(f.ops, u));
  const Eigen::VectorXd direct = 0.5 * du2.values() + divergence(f.ops, u).values() -
                                 Eigen::VectorXd::Constant(f.grid->size(), 0.5 * mean_value(du2));
  EXPECT_LE((eval_M(f.ops, u).values() - direct).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LE(std::abs(mean_value(eval_M(f.ops, u))), 1e-12);
  EXPECT_THROW(eval_M(f.ops, VectorField::zero(f.grid, 3)), ShapeError);
}

TEST(EvalMDerivative, AtZeroIsTheDivergence) {
  auto& f = fixture();
  const VectorField phi = make_seed(f.ops, default_seed(*f.grid, 0.3, 1.0));
  Eigen::MatrixXd w(2, f.grid->size());
  w.row(0) = (0.01 * f.grid->x1()).array().sin().matrix().transpose();
  w.row(1) = (0.02 * f.grid->x2()).array().cos().matrix().transpose();
  const VectorField psi(f.grid, w);
  const ScalarField d = eval_M_derivative(f.ops, VectorField::zero(f.grid, 2), psi);
  const ScalarField div = divergence(f.ops, psi);
  EXPECT_LE((d.values() - div.values()).cwiseAbs().maxCoeff(), 1e-15);
  // Kernel direction: curl* of a bump is divergence-free up to truncation,
  // so the defect shrinks under refinement.
  const double coarse = sup_norm(eval_M_derivative(f.ops, VectorField::zero(f.grid, 2), phi)) /
                        sup_norm(gradient_fd(f.ops, phi));
  const GridPtr fine = make_grid(128, 512);
  const DiffOps ops_fine(fine);
  const VectorField phi_fine = make_seed(ops_fine, default_seed(*fine, 0.3, 1.0));
  const double refined = sup_norm(eval_M_derivative(ops_fine, VectorField::zero(fine, 2), phi_fine)) /
                         sup_norm(gradient_fd(ops_fine, phi_fine));
  EXPECT_LT(refined, 0.6 * coarse);
  EXPECT_LT(refined, 5e-2);
}

TEST(EvalMDerivative, MatchesCentralDifferenceInFunctionSpace) {
  // M is quadratic in u, so the central difference is exact up to rounding.
  auto& f = fixture();
  const VectorField u = make_seed(f.ops, default_seed(*f.grid, 0.05));
  const VectorField phi = make_seed(f.ops, default_seed(*f.grid, 0.07, 2.0));
  const ScalarField exact = eval_M_derivative(f.ops, u, phi);
  for (double eps : {1e-2, 1e-4}) {
    const Eigen::VectorXd fd = (eval_M(f.ops, u + phi.scaled(eps)).values() -
                                eval_M(f.ops, u - phi.scaled(eps)).values()) /
                               (2.0 * eps);
    EXPECT_LE((fd - exact.values()).cwiseAbs().maxCoeff(), 1e-9 * sup_norm(exact));
  }
}

TEST(SolveRoot, ZeroSeedGivesTheTrivialRoot) {
  auto& f = fixture();
  const RootSolution r = solve_root(f.solver, VectorField::zero(f.grid, 2));
  EXPECT_TRUE(r.trivial);
  EXPECT_EQ(r.C, 0.0);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_EQ(sup_norm(r.u), 0.0);
}

TEST(SolveRoot, SmallSeedConvergesToAnEikonalPerturbation) {
  auto& f = fixture();
  const RootSolution& r = f.small_root();
  EXPECT_FALSE(r.trivial);
  EXPECT_LE(r.iterations, 30);
  EXPECT_LE(l2_norm(eval_M(f.ops, r.u)), 1e-8);
  // Independent re-evaluation of |Du|^2 + 2 div u.
  const ScalarField du2 = frobenius_sq(gradient_fd(f.ops, r.u));
  const Eigen::VectorXd q = du2.values() + 2.0 * divergence(f.ops, r.u).values();
  const double C = mean_value(du2);
  EXPECT_GT(C, 0.0);
  EXPECT_NEAR(r.C, C, 1e-15);
  EXPECT_LE(q.maxCoeff() - q.minCoeff(), 1e-6 * std::max(C, 1.0));
  EXPECT_EQ(boundary_sup(r.u), 0.0);
  EXPECT_EQ(boundary_sup(r.gamma), 0.0);
}

TEST(SolveRoot, ResidualContractsAfterTheFirstStep) {
  auto& f = fixture();
  const auto& h = f.small_root().residual_history;
  ASSERT_GE(h.size(), 3u);
  for (std::size_t i = 2; i < h.size(); ++i) EXPECT_LT(h[i] / h[i - 1], 1.0);
}

TEST(SolveRoot, LargeSeedIsOutsideTheNeighbourhood) {
  auto& f = fixture();
  EXPECT_THROW(solve_root(f.solver, make_seed(f.ops, default_seed(*f.grid, 10.0))), NoConvergenceError);
}

TEST(SolveRoot, SeedMustVanishOnTheBoundary) {
  auto& f = fixture();
  EXPECT_THROW(solve_root(f.solver, VectorField::identity(f.grid).scaled(1e-6)), IncompatibleDataError);
}

TEST(SolveRoot, HalvingTheAmplitudeRoughlyQuartersC) {
  auto& f = fixture();
  for (double a : {1e-2, 4e-3}) {
    const double c1 = solve_root(f.solver, make_seed(f.ops, default_seed(*f.grid, a))).C;
    const double c2 = solve_root(f.solver, make_seed(f.ops, default_seed(*f.grid, a / 2))).C;
    EXPECT_GE(c2 / c1, 0.15);
    EXPECT_LE(c2 / c1, 0.35);
  }
}

TEST(SolveRoot, DistinctCentersGiveDistinctRoots) {
  auto& f = fixture();
  const RootSolution& a = f.small_root();
  const RootSolution b =
      solve_root(f.solver, make_seed(f.ops, default_seed(*f.grid, 1e-2, std::numbers::pi)));
  EXPECT_GT(sup_norm(a.u - b.u), 0.5 * sup_norm(a.u));
  EXPECT_GT(b.C, 0.0);
}

TEST(Accumulation, RootsShrinkTowardZeroButStayNonTrivial) {
  auto& f = fixture();
  const AccumulationResult acc = accumulation_check(f.solver, {1e-2, 1e-3, 1e-4});
  EXPECT_TRUE(acc.decreasing);
  EXPECT_TRUE(acc.all_nontrivial);
  EXPECT_TRUE(acc.all_C_positive);
  for (std::size_t i = 1; i < acc.u_sup.size(); ++i) EXPECT_LT(acc.u_sup[i], acc.u_sup[i - 1]);
  for (std::size_t i = 0; i < acc.u_sup.size(); ++i) EXPECT_GT(acc.u_sup[i], 0.1 * acc.seed_sup[i]);
  EXPECT_THROW(accumulation_check(f.solver, {1e-3, 1e-2}), ParameterError);
}

TEST(DeterminantBound, HoldsOnRandomSmallMatrices) {
  const double eps = determinant_safety_bound();
  EXPECT_NEAR(eps, std::sqrt(3.0) - std::sqrt(2.0), 1e-15);
  std::mt19937_64 rng(71);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 100000; ++trial) {
    Eigen::Matrix2d A;
    A << g(rng), g(rng), g(rng), g(rng);
    A *= eps * std::pow(std::uniform_real_distribution<double>(0.0, 1.0)(rng), 0.25) / A.norm();
    EXPECT_GT((Eigen::Matrix2d::Identity() + A).determinant(), 0.5);
  }
}

TEST(Counterexample, TrivialRootGivesTheIdentity) {
  auto& f = fixture();
  const RootSolution r = solve_root(f.solver, VectorField::zero(f.grid, 2));
  const Counterexample cx = build_counterexample(f.ops, r);
  EXPECT_LE(sup_norm(cx.w - VectorField::identity(f.grid)), 0.0);
  EXPECT_NEAR(cx.constant, 2.0, 1e-12);
  EXPECT_NEAR(cx.min_det, 1.0, 1e-12);
  EXPECT_NEAR(cx.einf_gap, 0.0, 1e-12);
}

TEST(Counterexample, SmallRootGivesAnEikonalDiffeomorphism) {
  auto& f = fixture();
  const RootSolution& r = f.small_root();
  const Counterexample cx = build_counterexample(f.ops, r);
  EXPECT_GT(cx.min_det, 0.5);
  EXPECT_TRUE(cx.within_safety_bound);
  EXPECT_LE(cx.spread, 1e-6 * cx.constant);
  EXPECT_EQ(cx.boundary_error, 0.0);
  EXPECT_NEAR(cx.identity_norm_sq, 2.0, 1e-12);
  EXPECT_NEAR(cx.constant, cx.identity_norm_sq + r.C, 1e-9);
  EXPECT_GT(cx.einf_gap, 0.0);
  EXPECT_NEAR(cx.einf_w, std::sqrt(cx.identity_norm_sq + r.C), 1e-8);
  EXPECT_LE(cx.second_split_sup, 0.0);
}

TEST(Counterexample, LargeGradientIsRejected) {
  auto& f = fixture();
  RootSolution fake = solve_root(f.solver, VectorField::zero(f.grid, 2));
  fake.u = make_seed(f.ops, default_seed(*f.grid, 50.0));
  EXPECT_THROW(build_counterexample(f.ops, fake), DeterminantError);
}
