#pragma once

#include "eikonal/core_fields.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <utility>

namespace eikonal {

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// N x n x n per node; entry (a, i, j) lives in row (a * n + i) * n + j.
class HessianField {
 public:
  HessianField(GridPtr grid, int rows, int cols, Eigen::MatrixXd values);

  const GridPtr& grid() const { return grid_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const Eigen::MatrixXd& values() const { return values_; }
  double entry(int a, int i, int j, int k) const {
    return values_((a * cols_ + i) * cols_ + j, k);
  }

 private:
  GridPtr grid_;
  int rows_, cols_;
  Eigen::MatrixXd values_;
};

struct Jet {
  VectorField u;
  MatrixField Du;
  HessianField D2u;
};

// Sparse stencils on one grid. Derivatives are taken in the (log r, theta)
// chart and mapped to Cartesian ones with the discrete metric, so every
// operator is exact on affine fields.
class DiffOps {
 public:
  explicit DiffOps(GridPtr grid);

  const GridPtr& grid() const { return grid_; }
  const SpMat& dx(int order = 2) const;
  const SpMat& dy(int order = 2) const;

  // Chart stencils used by the Hessian.
  const SpMat& ds() const { return ds1_; }
  const SpMat& dt() const { return dt1_; }
  const SpMat& dss() const { return dss_; }
  const SpMat& dtt() const { return dtt_; }
  const SpMat& dst() const { return dst_; }

 private:
  GridPtr grid_;
  SpMat dx2_, dy2_, dx4_, dy4_;
  SpMat ds1_, dt1_, dss_, dtt_, dst_;
};

// Weights of the m-th derivative at z from values at nodes x.
Eigen::VectorXd fd_weights(double z, const Eigen::VectorXd& x, int m);

ScalarField partial_x(const DiffOps& ops, const ScalarField& f, int axis, int order = 2);

MatrixField gradient_fd(const DiffOps& ops, const VectorField& u, int order = 2);
HessianField hessian_fd(const DiffOps& ops, const VectorField& u, int order = 2);
Jet make_jet(const DiffOps& ops, const VectorField& u);

// Jet of w(x, y) = u(x) sampled at y = 0.
Jet lift_jet_domain(const Jet& jet, int l_extra);

ScalarField divergence(const DiffOps& ops, const VectorField& u);

// n = 2: a 2x2 skew potential d, or its scalar entry psi = d_12.
VectorField curl_star(const DiffOps& ops, const MatrixField& d);
VectorField curl_star(const DiffOps& ops, const ScalarField& psi);

inline constexpr double kDefaultRankTol = 1e-8;

// I - (projector onto the numerical range of A).
Eigen::MatrixXd orth_projection(const Eigen::MatrixXd& A, double rank_tol = kDefaultRankTol);

VectorField infinity_laplacian(const Jet& jet, double rank_tol = kDefaultRankTol);

// first = (Du (x) Du) : D2u, second = |Du|^2 [[Du]]_perp Laplacian(u)
std::pair<VectorField, VectorField> split_residuals(const Jet& jet,
                                                    double rank_tol = kDefaultRankTol);

struct EikonalDeviation {
  double spread = 0.0;
  double mean = 0.0;
};

EikonalDeviation eikonal_deviation(const MatrixField& Du);

ScalarField determinant_field(const MatrixField& Du);

}  // namespace eikonal
