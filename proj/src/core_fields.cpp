#include "eikonal/core_fields.hpp"

#include "eikonal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

namespace eikonal {

AnnulusGrid::AnnulusGrid(int nr, int nt, double r0, double r1)
    : nr_(nr), nt_(nt), r0_(r0), r1_(r1) {
  if (nr < 8 || nt < 16) {
    throw StencilError("grid " + std::to_string(nr) + "x" + std::to_string(nt) +
                       " is below the stencil width (need nr >= 8, nt >= 16)");
  }
  if (!(r0 > 0.0) || !(r1 > r0)) {
    throw GeometryError("annulus radii must satisfy 0 < r0 < r1");
  }
  ds_ = std::log(r1 / r0) / (nr - 1);
  dtheta_ = kTwoPi / nt;
  radius_.resize(nr);
  theta_.resize(nt);
  for (int i = 0; i < nr; ++i) radius_[i] = r0 * std::exp(ds_ * i);
  radius_.front() = r0;
  radius_.back() = r1;
  for (int j = 0; j < nt; ++j) theta_[j] = dtheta_ * j;

  const int n = size();
  x1_.resize(n);
  x2_.resize(n);
  r_.resize(n);
  weights_.resize(n);
  for (int i = 0; i < nr; ++i) {
    const double ri = radius_[i];
    const double wi = (i == 0 || i == nr - 1) ? 0.5 * ds_ : ds_;
    for (int j = 0; j < nt; ++j) {
      const int k = index(i, j);
      x1_[k] = ri * std::cos(theta_[j]);
      x2_[k] = ri * std::sin(theta_[j]);
      r_[k] = ri;
      weights_[k] = wi * ri * ri * dtheta_;
    }
  }
}

double AnnulusGrid::area() const { return weights_.sum(); }

GridPtr make_grid(int nr, int nt, double r0, double r1) {
  return std::make_shared<const AnnulusGrid>(nr, nt, r0, r1);
}

namespace {

void require_finite(const Eigen::MatrixXd& v, const char* what) {
  if (!v.allFinite()) throw ShapeError(std::string(what) + " has non-finite entries");
}

}  // namespace

ScalarField::ScalarField(GridPtr grid, Eigen::VectorXd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_->size()) throw ShapeError("scalar field length mismatch");
  require_finite(values_, "scalar field");
}

ScalarField ScalarField::constant(GridPtr grid, double c) {
  const int n = grid->size();
  return ScalarField(std::move(grid), Eigen::VectorXd::Constant(n, c));
}

VectorField::VectorField(GridPtr grid, Eigen::MatrixXd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.cols() != grid_->size() || values_.rows() < 1) {
    throw ShapeError("vector field shape mismatch");
  }
  require_finite(values_, "vector field");
}

VectorField VectorField::zero(GridPtr grid, int dim) {
  const int n = grid->size();
  return VectorField(std::move(grid), Eigen::MatrixXd::Zero(dim, n));
}

VectorField VectorField::identity(GridPtr grid) {
  Eigen::MatrixXd v(2, grid->size());
  v.row(0) = grid->x1().transpose();
  v.row(1) = grid->x2().transpose();
  return VectorField(std::move(grid), std::move(v));
}

ScalarField VectorField::component(int a) const {
  return ScalarField(grid_, values_.row(a).transpose());
}

VectorField VectorField::operator+(const VectorField& o) const {
  if (o.dim() != dim() || o.grid_ != grid_) throw ShapeError("vector field sum mismatch");
  return VectorField(grid_, values_ + o.values_);
}

VectorField VectorField::operator-(const VectorField& o) const {
  if (o.dim() != dim() || o.grid_ != grid_) throw ShapeError("vector field difference mismatch");
  return VectorField(grid_, values_ - o.values_);
}

VectorField VectorField::scaled(double s) const { return VectorField(grid_, s * values_); }

MatrixField::MatrixField(GridPtr grid, int rows, int cols, Eigen::MatrixXd values)
    : grid_(std::move(grid)), rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.rows() != rows * cols || values_.cols() != grid_->size()) {
    throw ShapeError("matrix field shape mismatch");
  }
  require_finite(values_, "matrix field");
}

Eigen::MatrixXd MatrixField::at(int k) const {
  Eigen::MatrixXd m(rows_, cols_);
  for (int a = 0; a < rows_; ++a)
    for (int i = 0; i < cols_; ++i) m(a, i) = values_(a * cols_ + i, k);
  return m;
}

double sup_norm(const ScalarField& f) { return f.values().cwiseAbs().maxCoeff(); }

double sup_norm(const VectorField& f) {
  return std::sqrt(f.values().colwise().squaredNorm().maxCoeff());
}

double sup_norm(const MatrixField& f) {
  return std::sqrt(f.values().colwise().squaredNorm().maxCoeff());
}

double mean_value(const ScalarField& f) {
  const auto& w = f.grid()->weights();
  return w.dot(f.values()) / w.sum();
}

double l2_norm(const ScalarField& f) {
  return std::sqrt(f.grid()->weights().dot(f.values().cwiseAbs2()));
}

double l2_norm(const VectorField& f) {
  return std::sqrt(f.grid()->weights().dot(f.values().colwise().squaredNorm().transpose()));
}

double l2_norm(const MatrixField& f) {
  return std::sqrt(f.grid()->weights().dot(f.values().colwise().squaredNorm().transpose()));
}

ScalarField frobenius_sq(const MatrixField& f) {
  return ScalarField(f.grid(), f.values().colwise().squaredNorm().transpose());
}

namespace {

void write_rows(std::ofstream& out, const AnnulusGrid& g, const Eigen::MatrixXd& v) {
  out << std::setprecision(17);
  for (int i = 0; i < g.nr(); ++i) {
    for (int j = 0; j < g.nt(); ++j) {
      const int k = g.index(i, j);
      out << i << ',' << j << ',' << g.radius(i) << ',' << g.theta(j) << ','
          << g.x1()[k] << ',' << g.x2()[k];
      for (int a = 0; a < v.rows(); ++a) out << ',' << v(a, k);
      out << '\n';
    }
  }
}

std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << "i,j,r,theta,x1,x2";
  return out;
}

}  // namespace

void write_csv(const std::string& path, const VectorField& f,
               const std::vector<std::string>& names) {
  if (static_cast<int>(names.size()) != f.dim()) throw ShapeError("csv column names mismatch");
  auto out = open_csv(path);
  for (const auto& n : names) out << ',' << n;
  out << '\n';
  write_rows(out, *f.grid(), f.values());
}

void write_csv(const std::string& path, const ScalarField& f, const std::string& name) {
  auto out = open_csv(path);
  out << ',' << name << '\n';
  write_rows(out, *f.grid(), f.values().transpose());
}

bool SolveReport::check_le(const std::string& name, double value, double tolerance) {
  CheckResult c;
  c.value = value;
  c.tolerance = tolerance;
  c.relation = "<=";
  c.pass = std::isfinite(value) && value <= tolerance;
  checks[name] = c;
  return c.pass;
}

bool SolveReport::check_gt(const std::string& name, double value, double threshold) {
  CheckResult c;
  c.value = value;
  c.tolerance = threshold;
  c.relation = ">";
  c.pass = std::isfinite(value) && value > threshold;
  checks[name] = c;
  return c.pass;
}

bool SolveReport::check_in(const std::string& name, double value, double lo, double hi) {
  CheckResult c;
  c.value = value;
  c.tolerance = lo;
  c.tolerance_hi = hi;
  c.relation = "in";
  c.pass = std::isfinite(value) && value >= lo && value <= hi;
  checks[name] = c;
  return c.pass;
}

bool SolveReport::check_flag(const std::string& name, bool ok) {
  CheckResult c;
  c.value = ok ? 1.0 : 0.0;
  c.tolerance = 1.0;
  c.relation = "==";
  c.pass = ok;
  checks[name] = c;
  return ok;
}

bool SolveReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const auto& kv) { return kv.second.pass; });
}

}  // namespace eikonal
