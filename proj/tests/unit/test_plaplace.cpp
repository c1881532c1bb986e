#include "eikonal/analytic_family.hpp"
#include "eikonal/diff_ops.hpp"
#include "eikonal/errors.hpp"
#include "eikonal/plaplace.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace eikonal;

namespace {

struct Fixture {
  GridPtr grid = make_grid(32, 128);
  DiffOps ops{grid};
  VectorField id = VectorField::identity(grid);
  VectorField analytic = sample_to_field(make_generator(2, {1}, 1), 1, grid).u;
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

}  // namespace

TEST(Energy, IdentityHasConstantGradientNorm) {
  auto& f = fixture();
  for (double p : {2.0, 4.0, 16.0}) {
    EXPECT_NEAR(energy_p(f.ops, f.id, p) / (std::sqrt(2.0) * std::pow(f.grid->area(), 1.0 / p)), 1.0,
                1e-12);
  }
  EXPECT_EQ(energy_p(f.ops, VectorField::zero(f.grid, 2), 4.0), 0.0);
  EXPECT_THROW(energy_p(f.ops, f.id, 0.5), ParameterError);
}

TEST(Energy, SupEnergyOfIdentityAndAnalyticMap) {
  auto& f = fixture();
  EXPECT_NEAR(energy_sup(f.ops, f.id), std::sqrt(2.0), 1e-12);
  // |Du|^2 = n + k^2 = 3 for the analytic map; the grid gradient is O(h^2).
  EXPECT_NEAR(energy_sup(f.ops, f.analytic), std::sqrt(3.0), 5e-2);
}

TEST(Energy, NormalisedEnergyApproachesTheSupremum) {
  auto& f = fixture();
  const double area = f.grid->area();
  const double einf = energy_sup(f.ops, f.analytic);
  double prev = 0.0;
  for (double p : {2.0, 8.0, 32.0, 128.0}) {
    const double e = energy_p(f.ops, f.analytic, p) / std::pow(area, 1.0 / p);
    EXPECT_LE(e, einf * (1.0 + 1e-12));
    EXPECT_GT(e, prev);
    prev = e;
  }
  EXPECT_GT(prev, 0.95 * einf);
}

TEST(Residual, IdentityIsADiscreteSolution) {
  auto& f = fixture();
  // Relative to a map that is not a solution, at the same weight scale.
  for (double p : {2.0, 4.0, 16.0}) {
    const double scale = sup_norm(p_laplacian_residual(f.ops, f.analytic, p));
    EXPECT_LE(sup_norm(p_laplacian_residual(f.ops, f.id, p)), 1e-12 * scale) << "p = " << p;
  }
}

TEST(Residual, HarmonicQuadraticAtPTwo) {
  auto& f = fixture();
  Eigen::MatrixXd v(2, f.grid->size());
  v.row(0) = (f.grid->x1().array().square() - f.grid->x2().array().square()).matrix().transpose();
  v.row(1).setZero();
  const VectorField u(f.grid, v);
  // Plain Laplacian of a harmonic polynomial: truncation only, shrinking with h.
  const double coarse = sup_norm(p_laplacian_residual(f.ops, u, 2.0));
  const GridPtr fine = make_grid(64, 256);
  const DiffOps ops_fine(fine);
  Eigen::MatrixXd vf(2, fine->size());
  vf.row(0) = (fine->x1().array().square() - fine->x2().array().square()).matrix().transpose();
  vf.row(1).setZero();
  const double refined = sup_norm(p_laplacian_residual(ops_fine, VectorField(fine, vf), 2.0));
  EXPECT_LT(refined, 0.5 * coarse);
  EXPECT_LT(refined, 1e-1);
}

TEST(Residual, BoundaryEntriesAreZero) {
  auto& f = fixture();
  const VectorField r = p_laplacian_residual(f.ops, f.analytic, 4.0);
  for (int k = 0; k < f.grid->size(); ++k) {
    if (f.grid->on_boundary(k)) ASSERT_EQ(r.values().col(k).cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(Solve, IdentityIsAFixedPoint) {
  auto& f = fixture();
  const PSolveResult r = solve_p_harmonic(f.ops, 8.0, f.id, f.id);
  EXPECT_LE(r.iterations, 1);
  EXPECT_LE(sup_norm(r.u - f.id), 1e-12);
}

TEST(Solve, PerturbedStartRecoversTheIdentity) {
  auto& f = fixture();
  const VectorField init = f.id + (f.analytic - f.id).scaled(0.5);
  const PSolveResult r = solve_p_harmonic(f.ops, 6.0, f.id, init);
  EXPECT_LE(sup_norm(r.u - f.id), 1e-6);
  EXPECT_LE(r.residual, 1e-10);
  EXPECT_EQ(r.residual_history.size(), r.energy_history.size());
}

TEST(Solve, HalvingTheRegularisationBarelyMoves) {
  auto& f = fixture();
  const VectorField init = f.id + (f.analytic - f.id).scaled(0.5);
  PSolveOptions a, b;
  a.delta = 1e-12;
  b.delta = 5e-13;
  const VectorField ua = solve_p_harmonic(f.ops, 4.0, f.id, init, a).u;
  const VectorField ub = solve_p_harmonic(f.ops, 4.0, f.id, init, b).u;
  EXPECT_LE(sup_norm(ua - ub), 10.0 * a.tol * sup_norm(f.id));
}

TEST(Solve, RejectsExponentsOutOfRange) {
  auto& f = fixture();
  EXPECT_THROW(solve_p_harmonic(f.ops, 1.5, f.id, f.id), ParameterError);
  EXPECT_THROW(solve_p_harmonic(f.ops, 100.0, f.id, f.id), ParameterError);
  EXPECT_THROW(p_laplacian_residual(f.ops, f.id, std::nan("")), ParameterError);
  EXPECT_THROW(solve_p_harmonic(f.ops, 4.0, f.id, VectorField::zero(f.grid, 3)), ShapeError);
}

TEST(Radial, MatchesTheClosedFormProfile) {
  const GridPtr g = make_grid(64, 256);
  const DiffOps ops(g);
  for (double p : {2.0, 4.0, 8.0}) {
    const RadialCheck c = radial_benchmark(ops, p);
    EXPECT_LE(c.error, 1e-4) << "p = " << p;
  }
}

TEST(Limit, SolutionsStayAwayFromTheAnalyticMap) {
  auto& f = fixture();
  const PLimitReport rep = compare_p_limit(f.ops, {4.0, 8.0}, f.analytic);
  ASSERT_EQ(rep.entries.size(), 2u);
  EXPECT_NEAR(rep.einf_identity, std::sqrt(2.0), 1e-12);
  EXPECT_GT(rep.einf_gap, 0.0);
  for (const PLimitEntry& e : rep.entries) {
    EXPECT_LE(e.err_identity, 1e-6);
    EXPECT_GT(e.gap_analytic, 0.5 * rep.dist_analytic_identity);
    EXPECT_LT(e.einf, rep.einf_analytic);
    // Energy may rise only at truncation level once Newton has converged.
    EXPECT_LE(e.energy_max_rise, 1e-4);
  }
  EXPECT_THROW(compare_p_limit(f.ops, {8.0, 4.0}, f.analytic), ParameterError);
}
