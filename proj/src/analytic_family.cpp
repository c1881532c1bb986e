#include "eikonal/analytic_family.hpp"

#include "eikonal/errors.hpp"

#include <cmath>

namespace eikonal {

SkewGenerator make_generator(int n, const std::vector<int>& block_signs, int k) {
  if (n <= 0 || n % 2 != 0) {
    throw DimensionError("dimension " + std::to_string(n) +
                         " admits no orthogonal skew-symmetric matrix");
  }
  if (static_cast<int>(block_signs.size()) != n / 2) {
    throw DimensionError("need one block sign per 2x2 block");
  }
  SkewGenerator g;
  g.n = n;
  g.k = k;
  g.S = Eigen::MatrixXd::Zero(n, n);
  for (int b = 0; b < n / 2; ++b) {
    const int s = block_signs[b];
    if (s != 1 && s != -1) throw DimensionError("block signs must be +1 or -1");
    g.S(2 * b, 2 * b + 1) = -s;
    g.S(2 * b + 1, 2 * b) = s;
  }
  return g;
}

Eigen::MatrixXd matrix_exp_skew(const SkewGenerator& S, double t) {
  return std::cos(t) * Eigen::MatrixXd::Identity(S.n, S.n) + std::sin(t) * S.S;
}

namespace {

double checked_norm(const SkewGenerator& S, const Eigen::VectorXd& x) {
  if (x.size() != S.n) throw ShapeError("point dimension does not match generator");
  const double r = x.norm();
  if (!(r > 0.0)) throw SingularPointError("map is undefined at the origin");
  return r;
}

}  // namespace

Eigen::VectorXd eval_map(const SkewGenerator& S, const Eigen::VectorXd& x, int k) {
  const double r = checked_norm(S, x);
  return matrix_exp_skew(S, k * std::log(r)) * x;
}

Eigen::MatrixXd eval_gradient(const SkewGenerator& S, const Eigen::VectorXd& x, int k) {
  const double r = checked_norm(S, x);
  const Eigen::VectorXd e = x / r;
  const Eigen::MatrixXd inner =
      Eigen::MatrixXd::Identity(S.n, S.n) + static_cast<double>(k) * (S.S * e) * e.transpose();
  return matrix_exp_skew(S, k * std::log(r)) * inner;
}

SmoothMap family_map(const SkewGenerator& S, int k) {
  SmoothMap m;
  m.dim_in = S.n;
  m.dim_out = S.n;
  m.value = [S, k](const Eigen::VectorXd& x) { return eval_map(S, x, k); };
  m.gradient = [S, k](const Eigen::VectorXd& x) { return eval_gradient(S, x, k); };
  return m;
}

SmoothMap lift_codomain(const SmoothMap& u, int k_extra) {
  if (k_extra < 1) throw DimensionError("codomain lift needs k_extra >= 1");
  SmoothMap v;
  v.dim_in = u.dim_in;
  v.dim_out = u.dim_out + k_extra;
  v.value = [u, k_extra](const Eigen::VectorXd& x) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(u.dim_out + k_extra);
    out.head(u.dim_out) = u.value(x);
    return out;
  };
  v.gradient = [u, k_extra](const Eigen::VectorXd& x) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(u.dim_out + k_extra, u.dim_in);
    out.topRows(u.dim_out) = u.gradient(x);
    return out;
  };
  return v;
}

SmoothMap lift_domain(const SmoothMap& v, int l_extra) {
  if (l_extra < 1) throw DimensionError("domain lift needs l_extra >= 1");
  SmoothMap w;
  w.dim_in = v.dim_in + l_extra;
  w.dim_out = v.dim_out;
  w.value = [v](const Eigen::VectorXd& xy) { return v.value(xy.head(v.dim_in)); };
  w.gradient = [v, l_extra](const Eigen::VectorXd& xy) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(v.dim_out, v.dim_in + l_extra);
    out.leftCols(v.dim_in) = v.gradient(xy.head(v.dim_in));
    return out;
  };
  return w;
}

SampledMap sample_map(const SmoothMap& m, const GridPtr& grid) {
  if (m.dim_in < 2) throw DimensionError("sampling needs a domain of dimension >= 2");
  const int n = grid->size();
  Eigen::MatrixXd u(m.dim_out, n);
  Eigen::MatrixXd du(m.dim_out * m.dim_in, n);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(m.dim_in);
  for (int k = 0; k < n; ++k) {
    x[0] = grid->x1()[k];
    x[1] = grid->x2()[k];
    u.col(k) = m.value(x);
    const Eigen::MatrixXd g = m.gradient(x);
    for (int a = 0; a < m.dim_out; ++a)
      for (int i = 0; i < m.dim_in; ++i) du(a * m.dim_in + i, k) = g(a, i);
  }
  return {VectorField(grid, std::move(u)), MatrixField(grid, m.dim_out, m.dim_in, std::move(du))};
}

SampledMap sample_to_field(const SkewGenerator& S, int k, const GridPtr& grid) {
  if (S.n != 2) throw DimensionError("annulus grids are planar; generator must have n = 2");
  return sample_map(family_map(S, k), grid);
}

}  // namespace eikonal
