#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

namespace eikonal {

inline const double kTwoPi = 2.0 * std::numbers::pi;

// Polar grid on {r0 <= |x| <= r1}, uniform in s = log r and in theta.
// Node (i, j) has flat index i * nt + j; ring 0 is the inner circle.
class AnnulusGrid {
 public:
  AnnulusGrid(int nr, int nt, double r0 = 1.0, double r1 = std::exp(kTwoPi));

  int nr() const { return nr_; }
  int nt() const { return nt_; }
  int size() const { return nr_ * nt_; }
  double r0() const { return r0_; }
  double r1() const { return r1_; }
  double ds() const { return ds_; }
  double dtheta() const { return dtheta_; }

  int index(int i, int j) const { return i * nt_ + j; }
  int ring(int k) const { return k / nt_; }
  int slot(int k) const { return k % nt_; }
  bool on_boundary(int k) const {
    const int i = ring(k);
    return i == 0 || i == nr_ - 1;
  }

  double radius(int i) const { return radius_[i]; }
  double theta(int j) const { return theta_[j]; }

  const Eigen::VectorXd& x1() const { return x1_; }
  const Eigen::VectorXd& x2() const { return x2_; }
  const Eigen::VectorXd& r() const { return r_; }
  // Quadrature weights for dx: trapezoid in s with r^2 ds dtheta.
  const Eigen::VectorXd& weights() const { return weights_; }

  double area() const;

 private:
  int nr_, nt_;
  double r0_, r1_, ds_, dtheta_;
  std::vector<double> radius_, theta_;
  Eigen::VectorXd x1_, x2_, r_, weights_;
};

using GridPtr = std::shared_ptr<const AnnulusGrid>;

GridPtr make_grid(int nr, int nt, double r0 = 1.0,
                  double r1 = std::exp(kTwoPi));

class ScalarField {
 public:
  ScalarField(GridPtr grid, Eigen::VectorXd values);
  static ScalarField constant(GridPtr grid, double c);

  const GridPtr& grid() const { return grid_; }
  const Eigen::VectorXd& values() const { return values_; }
  double operator[](int k) const { return values_[k]; }
  int size() const { return static_cast<int>(values_.size()); }

 private:
  GridPtr grid_;
  Eigen::VectorXd values_;
};

// N components, stored as an N x nodes array.
class VectorField {
 public:
  VectorField(GridPtr grid, Eigen::MatrixXd values);
  static VectorField zero(GridPtr grid, int dim);
  static VectorField identity(GridPtr grid);

  const GridPtr& grid() const { return grid_; }
  int dim() const { return static_cast<int>(values_.rows()); }
  const Eigen::MatrixXd& values() const { return values_; }
  ScalarField component(int a) const;
  Eigen::VectorXd at(int k) const { return values_.col(k); }

  VectorField operator+(const VectorField& o) const;
  VectorField operator-(const VectorField& o) const;
  VectorField scaled(double s) const;

 private:
  GridPtr grid_;
  Eigen::MatrixXd values_;
};

// N x n matrix per node; entry (a, i) lives in row a * n + i.
class MatrixField {
 public:
  MatrixField(GridPtr grid, int rows, int cols, Eigen::MatrixXd values);

  const GridPtr& grid() const { return grid_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const Eigen::MatrixXd& values() const { return values_; }
  double entry(int a, int i, int k) const { return values_(a * cols_ + i, k); }
  Eigen::MatrixXd at(int k) const;

 private:
  GridPtr grid_;
  int rows_, cols_;
  Eigen::MatrixXd values_;
};

double sup_norm(const ScalarField& f);
double sup_norm(const VectorField& f);
double sup_norm(const MatrixField& f);

double mean_value(const ScalarField& f);

double l2_norm(const ScalarField& f);
double l2_norm(const VectorField& f);
double l2_norm(const MatrixField& f);

ScalarField frobenius_sq(const MatrixField& f);

void write_csv(const std::string& path, const VectorField& f,
               const std::vector<std::string>& names);
void write_csv(const std::string& path, const ScalarField& f,
               const std::string& name);

struct CheckResult {
  double value = 0.0;
  double tolerance = 0.0;
  // Set for range checks; tolerance is then the lower end.
  double tolerance_hi = std::numeric_limits<double>::quiet_NaN();
  std::string relation;
  bool pass = false;
};

struct SolveReport {
  std::string kind;
  std::map<std::string, CheckResult> checks;
  std::map<std::string, double> metrics;
  std::map<std::string, std::vector<double>> series;
  int iterations = 0;
  double wall_time = 0.0;

  bool check_le(const std::string& name, double value, double tolerance);
  bool check_gt(const std::string& name, double value, double threshold);
  bool check_in(const std::string& name, double value, double lo, double hi);
  bool check_flag(const std::string& name, bool ok);
  bool all_pass() const;
};

}  // namespace eikonal
