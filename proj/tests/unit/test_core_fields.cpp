#include "eikonal/core_fields.hpp"
#include "eikonal/diff_ops.hpp"
#include "eikonal/div_solver.hpp"
#include "eikonal/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

using namespace eikonal;

namespace {

const double kR1 = std::exp(2.0 * std::numbers::pi);

Eigen::MatrixXd random_values(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> d;
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = d(rng);
  return m;
}

}  // namespace

TEST(AnnulusGrid, RadiiAreUniformInLogR) {
  const auto g = make_grid(16, 32);
  EXPECT_EQ(g->radius(0), 1.0);
  EXPECT_EQ(g->radius(15), kR1);
  const double ds = 2.0 * std::numbers::pi / 15.0;
  for (int i = 1; i < 16; ++i) {
    EXPECT_NEAR(std::log(g->radius(i)) - std::log(g->radius(i - 1)), ds, 1e-13);
  }
  for (int j = 0; j < 32; ++j) EXPECT_NEAR(g->theta(j), j * 2.0 * std::numbers::pi / 32.0, 1e-15);
}

TEST(AnnulusGrid, NodesStayInsideTheAnnulus) {
  const auto g = make_grid(33, 64);
  for (int k = 0; k < g->size(); ++k) {
    const double r = std::hypot(g->x1()[k], g->x2()[k]);
    EXPECT_GE(r, 1.0 - 1e-15);
    EXPECT_LE(r, kR1 * (1.0 + 1e-15));
  }
}

TEST(AnnulusGrid, FlatIndexIsRingMajor) {
  const auto g = make_grid(8, 16);
  EXPECT_EQ(g->index(2, 5), 37);
  EXPECT_EQ(g->ring(37), 2);
  EXPECT_EQ(g->slot(37), 5);
  EXPECT_TRUE(g->on_boundary(g->index(0, 3)));
  EXPECT_TRUE(g->on_boundary(g->index(7, 3)));
  EXPECT_FALSE(g->on_boundary(g->index(4, 3)));
}

TEST(AnnulusGrid, RejectsGridsBelowStencilWidth) {
  EXPECT_THROW(make_grid(4, 256), StencilError);
  EXPECT_THROW(make_grid(64, 8), StencilError);
  EXPECT_THROW(make_grid(64, 256, 2.0, 1.0), GeometryError);
  EXPECT_THROW(make_grid(64, 256, 0.0, 1.0), GeometryError);
}

TEST(Quadrature, WeightsArePositive) {
  const auto g = make_grid(20, 40);
  EXPECT_GT(g->weights().minCoeff(), 0.0);
}

TEST(Quadrature, AreaMatchesTrapezoidClosedForm) {
  // Trapezoid sum of e^{2s} over s = log r with step h equals
  // (e^{2 s1} - e^{2 s0}) / 2 * h * coth(h).
  for (int nr : {16, 64, 256}) {
    const auto g = make_grid(nr, 64);
    const double h = g->ds();
    const double exact = std::numbers::pi * (kR1 * kR1 - 1.0);
    const double discrete = exact * h / std::tanh(h);
    EXPECT_NEAR(g->area() / discrete, 1.0, 1e-12);
    EXPECT_LE(std::abs(g->area() / exact - 1.0), h * h / 3.0 + 1e-12);
  }
}

TEST(Norms, SupNormOfZeroAndIdentity) {
  const auto g = make_grid(32, 64);
  EXPECT_EQ(sup_norm(VectorField::zero(g, 2)), 0.0);
  EXPECT_NEAR(sup_norm(VectorField::identity(g)) / kR1, 1.0, 1e-14);
}

TEST(Norms, SupNormOfConstantIdentityGradient) {
  const auto g = make_grid(16, 32);
  Eigen::MatrixXd I(4, g->size());
  I.setZero();
  I.row(0).setOnes();
  I.row(3).setOnes();
  EXPECT_NEAR(sup_norm(MatrixField(g, 2, 2, I)), std::sqrt(2.0), 1e-15);
}

TEST(Norms, MeanOfConstantIsExact) {
  const auto g = make_grid(24, 48);
  EXPECT_NEAR(mean_value(ScalarField::constant(g, 3.25)), 3.25, 1e-14);
}

TEST(Norms, MeanOfOddFieldVanishes) {
  const auto g = make_grid(24, 48);
  const double m = mean_value(ScalarField(g, g->x1()));
  EXPECT_NEAR(m, 0.0, 1e-12 * kR1);
}

TEST(Norms, MeanOfDivergenceOfCurlVanishes) {
  const auto g = make_grid(64, 256);
  const DiffOps ops(g);
  const Eigen::Vector2d c(std::exp(4.0), 0.0);
  const ScalarField psi = make_bump_potential(g, c, 0.5 * std::exp(4.0), 1.0);
  const ScalarField div = divergence(ops, curl_star(ops, psi));
  const double scale = l2_norm(div) / std::sqrt(g->area());
  EXPECT_LT(std::abs(mean_value(div)), 1e-8 * std::max(scale, 1.0));
}

TEST(Norms, L2OfOneIsRootArea) {
  const auto g = make_grid(64, 128);
  const double h = g->ds();
  const double area = std::numbers::pi * (kR1 * kR1 - 1.0) * h / std::tanh(h);
  EXPECT_NEAR(l2_norm(ScalarField::constant(g, 1.0)) / std::sqrt(area), 1.0, 1e-12);
  EXPECT_EQ(l2_norm(ScalarField::constant(g, 0.0)), 0.0);
}

TEST(Norms, HomogeneityAndTriangleInequality) {
  const auto g = make_grid(16, 32);
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const VectorField f(g, random_values(rng, 2, g->size()));
    const VectorField h(g, random_values(rng, 2, g->size()));
    EXPECT_NEAR(l2_norm(f.scaled(2.0)), 2.0 * l2_norm(f), 1e-12 * l2_norm(f));
    EXPECT_NEAR(sup_norm(f.scaled(-3.0)), 3.0 * sup_norm(f), 1e-12 * sup_norm(f));
    EXPECT_LE(l2_norm(f + h), l2_norm(f) + l2_norm(h) + 1e-12);
    EXPECT_LE(sup_norm(f + h), sup_norm(f) + sup_norm(h) + 1e-12);
  }
}

TEST(Fields, RejectWrongShapesAndNonFiniteValues) {
  const auto g = make_grid(8, 16);
  EXPECT_THROW(ScalarField(g, Eigen::VectorXd::Zero(5)), ShapeError);
  EXPECT_THROW(VectorField(g, Eigen::MatrixXd::Zero(2, 5)), ShapeError);
  EXPECT_THROW(MatrixField(g, 2, 2, Eigen::MatrixXd::Zero(3, g->size())), ShapeError);
  Eigen::VectorXd bad = Eigen::VectorXd::Zero(g->size());
  bad[3] = std::nan("");
  EXPECT_THROW(ScalarField(g, bad), ShapeError);
  const auto other = make_grid(8, 16);
  EXPECT_THROW(VectorField::identity(g) + VectorField::identity(other), ShapeError);
}

TEST(Fields, MatrixFieldLayout) {
  const auto g = make_grid(8, 16);
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(6, g->size());
  v(1 * 2 + 0, 4) = 7.0;  // entry (1, 0) at node 4 in a 3 x 2 field
  const MatrixField m(g, 3, 2, v);
  EXPECT_EQ(m.entry(1, 0, 4), 7.0);
  EXPECT_EQ(m.at(4)(1, 0), 7.0);
  EXPECT_EQ(frobenius_sq(m)[4], 49.0);
}

TEST(Csv, HeaderAndRowsRoundTrip) {
  const auto g = make_grid(8, 16);
  const auto path = std::filesystem::temp_directory_path() / "eikonal_core_fields_test.csv";
  write_csv(path.string(), VectorField::identity(g), {"u1", "u2"});
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "i,j,r,theta,x1,x2,u1,u2");
  int rows = 0;
  double max_err = 0.0;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    ASSERT_EQ(vals.size(), 8u);
    const int k = g->index(static_cast<int>(vals[0]), static_cast<int>(vals[1]));
    max_err = std::max(max_err, std::abs(vals[6] - g->x1()[k]) + std::abs(vals[7] - g->x2()[k]));
    ++rows;
  }
  EXPECT_EQ(rows, g->size());
  EXPECT_EQ(max_err, 0.0);
  std::filesystem::remove(path);
  EXPECT_THROW(write_csv(path.string(), VectorField::identity(g), {"u1"}), ShapeError);
}

TEST(SolveReport, ChecksRecordTolerances) {
  SolveReport r;
  EXPECT_TRUE(r.check_le("a", 1e-13, 1e-12));
  EXPECT_FALSE(r.check_le("b", std::nan(""), 1.0));
  EXPECT_TRUE(r.check_in("c", 4.0, 3.2, 4.8));
  EXPECT_FALSE(r.check_gt("d", 0.0, 0.0));
  EXPECT_EQ(r.checks.at("c").tolerance_hi, 4.8);
  EXPECT_EQ(r.checks.at("a").tolerance, 1e-12);
  EXPECT_FALSE(r.all_pass());
  SolveReport ok;
  ok.check_flag("f", true);
  EXPECT_TRUE(ok.all_pass());
}
