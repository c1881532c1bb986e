#include "eikonal/diff_ops.hpp"

#include "eikonal/errors.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <vector>

namespace eikonal {

namespace {

using Triplet = Eigen::Triplet<double>;

struct Entry {
  int col;
  double value;
};
using Stencil = std::vector<std::vector<Entry>>;  // one row per 1D node

// R (radial, 1D) acting on every angular slot.
SpMat radial_op(const Stencil& R, const AnnulusGrid& g) {
  std::vector<Triplet> t;
  for (int i = 0; i < g.nr(); ++i)
    for (const auto& e : R[i])
      for (int j = 0; j < g.nt(); ++j) t.emplace_back(g.index(i, j), g.index(e.col, j), e.value);
  SpMat m(g.size(), g.size());
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

// Periodic angular stencil with offsets -h..h acting on every ring.
SpMat angular_op(const std::vector<double>& w, const AnnulusGrid& g) {
  const int h = static_cast<int>(w.size()) / 2;
  std::vector<Triplet> t;
  for (int i = 0; i < g.nr(); ++i)
    for (int j = 0; j < g.nt(); ++j)
      for (int o = -h; o <= h; ++o) {
        if (w[o + h] == 0.0) continue;
        const int jj = ((j + o) % g.nt() + g.nt()) % g.nt();
        t.emplace_back(g.index(i, j), g.index(i, jj), w[o + h]);
      }
  SpMat m(g.size(), g.size());
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SpMat diag(const Eigen::VectorXd& d) {
  SpMat m(d.size(), d.size());
  std::vector<Triplet> t;
  for (int k = 0; k < d.size(); ++k) t.emplace_back(k, k, d[k]);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

// Chain rule with the discrete metric of the chart stencils (Ds, Dt).
void cartesian_from_chart(const AnnulusGrid& g, const SpMat& Ds, const SpMat& Dt, SpMat& Dx,
                          SpMat& Dy) {
  const Eigen::VectorXd xs = Ds * g.x1(), xt = Dt * g.x1();
  const Eigen::VectorXd ys = Ds * g.x2(), yt = Dt * g.x2();
  const int n = g.size();
  Eigen::VectorXd a(n), b(n), c(n), d(n);
  for (int k = 0; k < n; ++k) {
    const double det = xs[k] * yt[k] - xt[k] * ys[k];
    if (det == 0.0) {
      a[k] = b[k] = c[k] = d[k] = 0.0;
      continue;
    }
    a[k] = yt[k] / det;
    b[k] = -ys[k] / det;
    c[k] = -xt[k] / det;
    d[k] = xs[k] / det;
  }
  Dx = diag(a) * Ds + diag(b) * Dt;
  Dy = diag(c) * Ds + diag(d) * Dt;
}

Stencil central_first(int nr, double h, bool one_sided_ends) {
  Stencil R(nr);
  for (int i = 1; i < nr - 1; ++i) R[i] = {{i - 1, -0.5 / h}, {i + 1, 0.5 / h}};
  if (one_sided_ends) {
    R[0] = {{0, -1.5 / h}, {1, 2.0 / h}, {2, -0.5 / h}};
    R[nr - 1] = {{nr - 3, 0.5 / h}, {nr - 2, -2.0 / h}, {nr - 1, 1.5 / h}};
  }
  return R;
}

Stencil central_second(int nr, double h) {
  const double q = 1.0 / (h * h);
  Stencil R(nr);
  for (int i = 1; i < nr - 1; ++i) R[i] = {{i - 1, q}, {i, -2.0 * q}, {i + 1, q}};
  R[0] = {{0, 2.0 * q}, {1, -5.0 * q}, {2, 4.0 * q}, {3, -q}};
  R[nr - 1] = {{nr - 4, -q}, {nr - 3, 4.0 * q}, {nr - 2, -5.0 * q}, {nr - 1, 2.0 * q}};
  return R;
}

Stencil fourth_order_first(int nr, double h) {
  Stencil R(nr);
  for (int i = 2; i < nr - 2; ++i) {
    R[i] = {{i - 2, 1.0 / (12 * h)}, {i - 1, -8.0 / (12 * h)}, {i + 1, 8.0 / (12 * h)},
            {i + 2, -1.0 / (12 * h)}};
  }
  Eigen::VectorXd nodes(5);
  for (int l = 0; l < 5; ++l) nodes[l] = l;
  for (int i : {0, 1}) {
    const Eigen::VectorXd w = fd_weights(i, nodes, 1);
    for (int l = 0; l < 5; ++l) R[i].push_back({l, w[l] / h});
  }
  for (int i : {nr - 2, nr - 1}) {
    const Eigen::VectorXd w = fd_weights(i - (nr - 5), nodes, 1);
    for (int l = 0; l < 5; ++l) R[i].push_back({nr - 5 + l, w[l] / h});
  }
  return R;
}

// Replaces boundary ring rows by 3 G_1 - 3 G_2 + G_3 (mirrored outside).
SpMat extrapolate_boundary_rows(const SpMat& D, const AnnulusGrid& g) {
  Stencil E(g.nr());
  for (int i = 1; i < g.nr() - 1; ++i) E[i] = {{i, 1.0}};
  E[0] = {{1, 3.0}, {2, -3.0}, {3, 1.0}};
  const int m = g.nr() - 1;
  E[m] = {{m - 1, 3.0}, {m - 2, -3.0}, {m - 3, 1.0}};
  SpMat out = radial_op(E, g) * D;
  out.prune(0.0);
  return out;
}

void require_same_grid(const DiffOps& ops, const GridPtr& g) {
  if (ops.grid() != g) throw ShapeError("field lives on a different grid than the operators");
}

}  // namespace

Eigen::VectorXd fd_weights(double z, const Eigen::VectorXd& x, int m) {
  // Fornberg's recursion.
  const int n = static_cast<int>(x.size()) - 1;
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n + 1, m + 1);
  double c1 = 1.0, c4 = x[0] - z;
  c(0, 0) = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c(i, k) = c1 * (k * c(i - 1, k - 1) - c5 * c(i - 1, k)) / c2;
        c(i, 0) = -c1 * c5 * c(i - 1, 0) / c2;
      }
      for (int k = mn; k >= 1; --k) c(j, k) = (c4 * c(j, k) - k * c(j, k - 1)) / c3;
      c(j, 0) = c4 * c(j, 0) / c3;
    }
    c1 = c2;
  }
  return c.col(m);
}

HessianField::HessianField(GridPtr grid, int rows, int cols, Eigen::MatrixXd values)
    : grid_(std::move(grid)), rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.rows() != rows * cols * cols || values_.cols() != grid_->size()) {
    throw ShapeError("hessian field shape mismatch");
  }
}

DiffOps::DiffOps(GridPtr grid) : grid_(std::move(grid)) {
  const AnnulusGrid& g = *grid_;
  if (g.nr() < 8 || g.nt() < 16) throw StencilError("grid is below the stencil width");
  const double h = g.ds(), k = g.dtheta();

  const SpMat Ds2 = radial_op(central_first(g.nr(), h, false), g);
  const SpMat Dt2 = angular_op({-0.5 / k, 0.0, 0.5 / k}, g);
  SpMat Dx, Dy;
  cartesian_from_chart(g, Ds2, Dt2, Dx, Dy);
  dx2_ = extrapolate_boundary_rows(Dx, g);
  dy2_ = extrapolate_boundary_rows(Dy, g);

  const SpMat Ds4 = radial_op(fourth_order_first(g.nr(), h), g);
  const SpMat Dt4 =
      angular_op({1.0 / (12 * k), -8.0 / (12 * k), 0.0, 8.0 / (12 * k), -1.0 / (12 * k)}, g);
  cartesian_from_chart(g, Ds4, Dt4, dx4_, dy4_);

  ds1_ = radial_op(central_first(g.nr(), h, true), g);
  dt1_ = Dt2;
  dss_ = radial_op(central_second(g.nr(), h), g);
  dtt_ = angular_op({1.0 / (k * k), -2.0 / (k * k), 1.0 / (k * k)}, g);
  dst_ = ds1_ * dt1_;
}

const SpMat& DiffOps::dx(int order) const {
  if (order == 2) return dx2_;
  if (order == 4) return dx4_;
  throw StencilError("gradient order must be 2 or 4");
}

const SpMat& DiffOps::dy(int order) const {
  if (order == 2) return dy2_;
  if (order == 4) return dy4_;
  throw StencilError("gradient order must be 2 or 4");
}

ScalarField partial_x(const DiffOps& ops, const ScalarField& f, int axis, int order) {
  require_same_grid(ops, f.grid());
  const SpMat& D = axis == 0 ? ops.dx(order) : ops.dy(order);
  return ScalarField(f.grid(), D * f.values());
}

MatrixField gradient_fd(const DiffOps& ops, const VectorField& u, int order) {
  require_same_grid(ops, u.grid());
  const SpMat& Dx = ops.dx(order);
  const SpMat& Dy = ops.dy(order);
  const int N = u.dim();
  Eigen::MatrixXd v(2 * N, u.grid()->size());
  for (int a = 0; a < N; ++a) {
    const Eigen::VectorXd ua = u.values().row(a).transpose();
    v.row(2 * a) = (Dx * ua).transpose();
    v.row(2 * a + 1) = (Dy * ua).transpose();
  }
  return MatrixField(u.grid(), N, 2, std::move(v));
}

HessianField hessian_fd(const DiffOps& ops, const VectorField& u, int order) {
  if (order != 2) throw StencilError("hessian is available at order 2 only");
  require_same_grid(ops, u.grid());
  const AnnulusGrid& g = *u.grid();
  const int n = g.size();
  const int N = u.dim();

  const Eigen::VectorXd xs = ops.ds() * g.x1(), xt = ops.dt() * g.x1();
  const Eigen::VectorXd ys = ops.ds() * g.x2(), yt = ops.dt() * g.x2();
  const Eigen::VectorXd xss = ops.dss() * g.x1(), xst = ops.dst() * g.x1(),
                        xtt = ops.dtt() * g.x1();
  const Eigen::VectorXd yss = ops.dss() * g.x2(), yst = ops.dst() * g.x2(),
                        ytt = ops.dtt() * g.x2();

  Eigen::MatrixXd v(4 * N, n);
  for (int a = 0; a < N; ++a) {
    const Eigen::VectorXd f = u.values().row(a).transpose();
    const Eigen::VectorXd fx = ops.dx() * f, fy = ops.dy() * f;
    const Eigen::VectorXd fss = ops.dss() * f, fst = ops.dst() * f, ftt = ops.dtt() * f;
    for (int k = 0; k < n; ++k) {
      Eigen::Matrix2d Hc;
      Hc(0, 0) = fss[k] - fx[k] * xss[k] - fy[k] * yss[k];
      Hc(0, 1) = fst[k] - fx[k] * xst[k] - fy[k] * yst[k];
      Hc(1, 1) = ftt[k] - fx[k] * xtt[k] - fy[k] * ytt[k];
      Hc(1, 0) = Hc(0, 1);
      Eigen::Matrix2d J;
      J << xs[k], xt[k], ys[k], yt[k];
      const Eigen::Matrix2d Ji = J.inverse();
      Eigen::Matrix2d H = Ji.transpose() * Hc * Ji;
      H = 0.5 * (H + H.transpose()).eval();
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) v((a * 2 + i) * 2 + j, k) = H(i, j);
    }
  }
  return HessianField(u.grid(), N, 2, std::move(v));
}

Jet make_jet(const DiffOps& ops, const VectorField& u) {
  return Jet{u, gradient_fd(ops, u), hessian_fd(ops, u)};
}

Jet lift_jet_domain(const Jet& jet, int l_extra) {
  if (l_extra < 1) throw DimensionError("domain lift needs l_extra >= 1");
  const int N = jet.Du.rows(), n = jet.Du.cols(), m = n + l_extra;
  const int nodes = jet.u.grid()->size();
  Eigen::MatrixXd du = Eigen::MatrixXd::Zero(N * m, nodes);
  Eigen::MatrixXd d2 = Eigen::MatrixXd::Zero(N * m * m, nodes);
  for (int a = 0; a < N; ++a)
    for (int i = 0; i < n; ++i) {
      du.row(a * m + i) = jet.Du.values().row(a * n + i);
      for (int j = 0; j < n; ++j)
        d2.row((a * m + i) * m + j) = jet.D2u.values().row((a * n + i) * n + j);
    }
  return Jet{jet.u, MatrixField(jet.u.grid(), N, m, std::move(du)),
             HessianField(jet.u.grid(), N, m, std::move(d2))};
}

ScalarField divergence(const DiffOps& ops, const VectorField& u) {
  if (u.dim() != 2) throw ShapeError("divergence needs a field with N = n = 2");
  require_same_grid(ops, u.grid());
  const Eigen::VectorXd u0 = u.values().row(0).transpose();
  const Eigen::VectorXd u1 = u.values().row(1).transpose();
  return ScalarField(u.grid(), ops.dx() * u0 + ops.dy() * u1);
}

VectorField curl_star(const DiffOps& ops, const ScalarField& psi) {
  require_same_grid(ops, psi.grid());
  Eigen::MatrixXd v(2, psi.grid()->size());
  v.row(0) = -(ops.dy() * psi.values()).transpose();
  v.row(1) = (ops.dx() * psi.values()).transpose();
  return VectorField(psi.grid(), std::move(v));
}

VectorField curl_star(const DiffOps& ops, const MatrixField& d) {
  if (d.rows() != 2 || d.cols() != 2) throw ShapeError("curl_star needs a 2x2 potential");
  const auto& v = d.values();
  const double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
  const double defect = std::max({v.row(0).cwiseAbs().maxCoeff(), v.row(3).cwiseAbs().maxCoeff(),
                                  (v.row(1) + v.row(2)).cwiseAbs().maxCoeff()});
  if (defect > 1e-12 * scale) throw ShapeError("curl_star potential is not skew-symmetric");
  return curl_star(ops, ScalarField(d.grid(), v.row(1).transpose()));
}

Eigen::MatrixXd orth_projection(const Eigen::MatrixXd& A, double rank_tol) {
  const int N = static_cast<int>(A.rows());
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(N, N);
  if (A.cols() == 0 || !(A.cwiseAbs().maxCoeff() > 0.0)) return I;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  int rank = 0;
  while (rank < sv.size() && sv[rank] > rank_tol * sv[0]) ++rank;
  if (rank == N) return Eigen::MatrixXd::Zero(N, N);
  // Built from the complement basis: rows of A that vanish identically give
  // exact zeros here.
  const Eigen::MatrixXd Uc = svd.matrixU().rightCols(N - rank);
  return Uc * Uc.transpose();
}

namespace {

void require_consistent(const Jet& jet) {
  const int N = jet.u.dim();
  if (jet.Du.rows() != N || jet.D2u.rows() != N || jet.D2u.cols() != jet.Du.cols() ||
      jet.Du.grid() != jet.u.grid() || jet.D2u.grid() != jet.u.grid()) {
    throw ShapeError("jet components are inconsistent");
  }
}

}  // namespace

VectorField infinity_laplacian(const Jet& jet, double rank_tol) {
  require_consistent(jet);
  const int N = jet.Du.rows(), n = jet.Du.cols(), nodes = jet.u.grid()->size();
  Eigen::MatrixXd out(N, nodes);
  for (int k = 0; k < nodes; ++k) {
    const Eigen::MatrixXd Du = jet.Du.at(k);
    const double du2 = Du.squaredNorm();
    const Eigen::MatrixXd P = orth_projection(Du, rank_tol);
    for (int a = 0; a < N; ++a) {
      double acc = 0.0;
      for (int b = 0; b < N; ++b)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            const double coeff = Du(a, i) * Du(b, j) + (i == j ? du2 * P(a, b) : 0.0);
            acc += coeff * jet.D2u.entry(b, i, j, k);
          }
      out(a, k) = acc;
    }
  }
  return VectorField(jet.u.grid(), std::move(out));
}

std::pair<VectorField, VectorField> split_residuals(const Jet& jet, double rank_tol) {
  require_consistent(jet);
  const int N = jet.Du.rows(), n = jet.Du.cols(), nodes = jet.u.grid()->size();
  Eigen::MatrixXd first(N, nodes), second(N, nodes);
  for (int k = 0; k < nodes; ++k) {
    const Eigen::MatrixXd Du = jet.Du.at(k);
    Eigen::VectorXd t = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd lap = Eigen::VectorXd::Zero(N);
    for (int b = 0; b < N; ++b)
      for (int i = 0; i < n; ++i) {
        lap[b] += jet.D2u.entry(b, i, i, k);
        for (int j = 0; j < n; ++j) t[i] += Du(b, j) * jet.D2u.entry(b, i, j, k);
      }
    first.col(k) = Du * t;
    const Eigen::MatrixXd P = orth_projection(Du, rank_tol);
    second.col(k) = Du.squaredNorm() * (P * lap);
  }
  return {VectorField(jet.u.grid(), std::move(first)), VectorField(jet.u.grid(), std::move(second))};
}

EikonalDeviation eikonal_deviation(const MatrixField& Du) {
  const ScalarField n2 = frobenius_sq(Du);
  return {n2.values().maxCoeff() - n2.values().minCoeff(), mean_value(n2)};
}

ScalarField determinant_field(const MatrixField& Du) {
  if (Du.rows() != Du.cols()) throw ShapeError("determinant needs square gradients");
  const int nodes = Du.grid()->size();
  Eigen::VectorXd d(nodes);
  for (int k = 0; k < nodes; ++k) d[k] = Du.at(k).determinant();
  return ScalarField(Du.grid(), std::move(d));
}

}  // namespace eikonal
