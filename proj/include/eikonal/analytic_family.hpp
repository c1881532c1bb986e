#pragma once

#include "eikonal/core_fields.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace eikonal {

struct SkewGenerator {
  int n = 0;
  Eigen::MatrixXd S;
  int k = 1;
};

// Block-diagonal generator with 2x2 blocks sign * [[0,-1],[1,0]].
SkewGenerator make_generator(int n, const std::vector<int>& block_signs, int k = 1);

// cos(t) I + sin(t) S, valid because S^2 = -I.
Eigen::MatrixXd matrix_exp_skew(const SkewGenerator& S, double t);

// u_k(x) = exp(k log|x| S) x
Eigen::VectorXd eval_map(const SkewGenerator& S, const Eigen::VectorXd& x, int k);

// Du_k(x) = exp(k log|x| S) (I + k (S e) (x) e), e = x / |x|
Eigen::MatrixXd eval_gradient(const SkewGenerator& S, const Eigen::VectorXd& x, int k);

struct SmoothMap {
  int dim_in = 0;
  int dim_out = 0;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> value;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> gradient;
};

SmoothMap family_map(const SkewGenerator& S, int k);

// v(x) = (u(x), 0)
SmoothMap lift_codomain(const SmoothMap& u, int k_extra);

// w(x, y) = v(x)
SmoothMap lift_domain(const SmoothMap& v, int l_extra);

struct SampledMap {
  VectorField u;
  MatrixField Du;
};

// Requires a 2D domain; the grid supplies x, any extra domain slots are 0.
SampledMap sample_map(const SmoothMap& m, const GridPtr& grid);

SampledMap sample_to_field(const SkewGenerator& S, int k, const GridPtr& grid);

}  // namespace eikonal
