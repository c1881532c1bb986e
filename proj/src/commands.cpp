#include "eikonal/commands.hpp"

#include "eikonal/analytic_family.hpp"
#include "eikonal/diff_ops.hpp"
#include "eikonal/div_solver.hpp"
#include "eikonal/errors.hpp"
#include "eikonal/ift_solver.hpp"
#include "eikonal/plaplace.hpp"
#include "eikonal/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

namespace eikonal {
namespace {

constexpr double kExactTol = 1e-12;
constexpr double kFdAgreementTol = 1e-8;
constexpr double kOrderLo = 3.2;
constexpr double kOrderHi = 4.8;
constexpr double kSplitTol = 1e-10;
constexpr double kProp13Tol = 1e-6;
constexpr double kIdentityTol = 1e-6;
constexpr double kRadialTol = 1e-4;
constexpr int kMaxRootSteps = 30;

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

std::string p_tag(double p) {
  std::ostringstream o;
  o << "p" << p;
  return o.str();
}

std::string out_path(const Config& cfg, const std::string& name) {
  return (std::filesystem::path(cfg.output_dir) / name).string();
}

void ensure_output_dir(const Config& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + cfg.output_dir + "': " + ec.message());
}

GridPtr grid_from(const Config& cfg, int scale = 1) {
  return make_grid(cfg.grid_nr * scale, cfg.grid_nt * scale, 1.0, cfg.r1());
}

std::vector<int> alternating_signs(int n) {
  std::vector<int> s(std::max(n / 2, 0));
  for (std::size_t b = 0; b < s.size(); ++b) s[b] = (b % 2 == 0) ? 1 : -1;
  return s;
}

double boundary_identity_error(const VectorField& u) {
  const AnnulusGrid& g = *u.grid();
  double e = 0.0;
  for (int k = 0; k < g.size(); ++k) {
    if (!g.on_boundary(k)) continue;
    e = std::max(e, std::hypot(u.values()(0, k) - g.x1()[k], u.values()(1, k) - g.x2()[k]));
  }
  return e;
}

double boundary_sup(const VectorField& u) {
  const AnnulusGrid& g = *u.grid();
  double e = 0.0;
  for (int k = 0; k < g.size(); ++k) {
    if (g.on_boundary(k)) e = std::max(e, u.values().col(k).cwiseAbs().maxCoeff());
  }
  return e;
}

// max_k |L - first - second| / (|Du|^2 |D2u|) at node k
double split_identity_error(const Jet& jet) {
  const VectorField full = infinity_laplacian(jet);
  const auto [first, second] = split_residuals(jet);
  const int nodes = jet.u.grid()->size();
  double worst = 0.0;
  for (int k = 0; k < nodes; ++k) {
    const double scale = jet.Du.at(k).squaredNorm() * jet.D2u.values().col(k).norm();
    const double diff =
        (full.values().col(k) - first.values().col(k) - second.values().col(k)).norm();
    if (diff == 0.0) continue;
    worst = std::max(worst, diff / std::max(scale, std::numeric_limits<double>::min()));
  }
  return worst;
}

struct DinfLevel {
  double sup = 0.0;
  double second_sup = 0.0;
  double split_error = 0.0;
};

DinfLevel dinf_level(const Jet& jet) {
  DinfLevel d;
  d.sup = sup_norm(infinity_laplacian(jet));
  d.second_sup = sup_norm(split_residuals(jet).second);
  d.split_error = split_identity_error(jet);
  return d;
}

Jet codomain_lift_jet(const DiffOps& ops, const VectorField& u) {
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(u.dim() + 1, u.grid()->size());
  v.topRows(u.dim()) = u.values();
  return make_jet(ops, VectorField(u.grid(), std::move(v)));
}

Eigen::VectorXd random_point(std::mt19937_64& rng, int n, double r0, double r1) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(std::log(r0), std::log(r1));
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = normal(rng);
  return std::exp(unif(rng)) * x / x.norm();
}

Eigen::VectorXd random_unit(std::mt19937_64& rng, int n) { return random_point(rng, n, 1.0, 1.0); }

}  // namespace

int exit_code_for(const std::string& kind) {
  static const char* usage[] = {"ConfigError",   "StencilError",      "DimensionError",
                                "ParameterError", "GeometryError",    "ShapeError",
                                "SingularPointError"};
  for (const char* u : usage)
    if (kind == u) return kExitUsage;
  return kExitFailure;
}

double min_image_separation(const VectorField& u) {
  const int nodes = u.grid()->size();
  std::vector<int> order(nodes);
  std::iota(order.begin(), order.end(), 0);
  const Eigen::MatrixXd& v = u.values();
  std::sort(order.begin(), order.end(), [&](int a, int b) { return v(0, a) < v(0, b); });
  double best = std::numeric_limits<double>::infinity();
  for (int a = 0; a < nodes; ++a) {
    for (int b = a + 1; b < nodes; ++b) {
      const double dx = v(0, order[b]) - v(0, order[a]);
      if (dx >= best) break;
      best = std::min(best, (v.col(order[b]) - v.col(order[a])).norm());
    }
  }
  return best;
}

CommandOutput analytic_pipeline(const Config& cfg, std::ostream& log) {
  CommandOutput out;
  SolveReport& rep = out.report;
  rep.kind = "analytic";
  const int k = cfg.family_k;

  // Pointwise checks for the generator of the configured dimension.
  const SkewGenerator Sn = make_generator(cfg.family_n, alternating_signs(cfg.family_n), k);
  const GridPtr grid = grid_from(cfg);
  std::mt19937_64 rng(cfg.run_seed);
  {
    const int n = cfg.family_n;
    const int samples = 1000;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, det_err = 0.0, bnd_err = 0.0;
    double fd_sum = 0.0;
    int fd_count = 0;
    for (int s = 0; s < samples; ++s) {
      const Eigen::VectorXd x = random_point(rng, n, grid->r0(), grid->r1());
      const Eigen::MatrixXd Du = eval_gradient(Sn, x, k);
      lo = std::min(lo, Du.squaredNorm());
      hi = std::max(hi, Du.squaredNorm());
      det_err = std::max(det_err, std::abs(Du.determinant() - 1.0));
      const Eigen::VectorXd e = random_unit(rng, n);
      for (double rb : {grid->r0(), grid->r1()}) {
        bnd_err = std::max(bnd_err, (eval_map(Sn, rb * e, k) - rb * e).norm());
      }
      if (s % 4 == 0) {
        const double h = 1e-5 * x.norm();
        Eigen::MatrixXd G(n, n);
        for (int i = 0; i < n; ++i) {
          Eigen::VectorXd dx = Eigen::VectorXd::Zero(n);
          dx[i] = h;
          G.col(i) = (eval_map(Sn, x + dx, k) - eval_map(Sn, x - dx, k)) / (2.0 * h);
        }
        fd_sum += G.squaredNorm();
        ++fd_count;
      }
    }
    const double closed = 0.5 * (lo + hi);
    const double fd = fd_sum / fd_count;
    rep.check_le("pointwise_eikonal_spread", hi - lo, kExactTol);
    rep.check_le("pointwise_det_deviation", det_err, kExactTol);
    rep.check_le("pointwise_boundary_identity", bnd_err, kExactTol);
    rep.check_le("constant_fd_agreement", std::abs(fd - closed), kFdAgreementTol);
    rep.metrics["pointwise_constant"] = closed;
    rep.metrics["pointwise_constant_fd"] = fd;
    rep.metrics["constant_n_plus_k2"] = n + static_cast<double>(k) * k;
    rep.metrics["constant_n2_plus_1"] = static_cast<double>(n) * n + 1.0;
  }

  // Grid checks on the planar map.
  const SkewGenerator S = make_generator(2, {1}, k);
  const SampledMap sm = sample_to_field(S, k, grid);
  const EikonalDeviation dev = eikonal_deviation(sm.Du);
  const ScalarField det = determinant_field(sm.Du);
  rep.check_le("boundary_identity", boundary_identity_error(sm.u), kExactTol);
  rep.check_le("eikonal_spread", dev.spread, kExactTol);
  rep.check_le("det_deviation", (det.values().array() - 1.0).abs().maxCoeff(), kExactTol);
  if (cfg.family_n == 2) {
    rep.check_le("constant_grid_vs_pointwise", std::abs(dev.mean - rep.metrics["pointwise_constant"]),
                 kExactTol);
  }
  rep.metrics["eikonal_constant"] = dev.mean;
  rep.metrics["eikonal_constant_formula"] = 2.0 + static_cast<double>(k) * k;
  const double sep = min_image_separation(sm.u);
  rep.check_gt("injectivity_min_separation", sep, 0.0);
  rep.check_gt("det_min", det.values().minCoeff(), 0.0);

  // Residuals at the configured grid and its refinement.
  const DiffOps ops(grid);
  const GridPtr fine = grid_from(cfg, 2);
  const DiffOps ops_fine(fine);
  const VectorField u_fine = sample_to_field(S, k, fine).u;

  const Jet jet = make_jet(ops, sm.u);
  const Jet jet_fine = make_jet(ops_fine, u_fine);
  const DinfLevel c0 = dinf_level(jet), c1 = dinf_level(jet_fine);
  rep.check_in("dinf_ratio", c0.sup / c1.sup, kOrderLo, kOrderHi);
  rep.check_le("split_identity", std::max(c0.split_error, c1.split_error), kSplitTol);
  rep.check_le("second_split_full_rank", std::max(c0.second_sup, c1.second_sup), 0.0);
  rep.metrics["dinf_sup"] = c0.sup;
  rep.metrics["dinf_sup_fine"] = c1.sup;

  const Jet v0 = codomain_lift_jet(ops, sm.u), v1 = codomain_lift_jet(ops_fine, u_fine);
  const Jet w0 = lift_jet_domain(v0, 1), w1 = lift_jet_domain(v1, 1);
  const DinfLevel lv0 = dinf_level(v0), lv1 = dinf_level(v1);
  const DinfLevel lw0 = dinf_level(w0), lw1 = dinf_level(w1);
  const double dv = (frobenius_sq(v0.Du).values() - frobenius_sq(jet.Du).values()).cwiseAbs().maxCoeff();
  const double dw = (frobenius_sq(w0.Du).values() - frobenius_sq(v0.Du).values()).cwiseAbs().maxCoeff();
  rep.check_le("lift_v_eikonal_match", dv, kExactTol);
  rep.check_le("lift_w_eikonal_match", dw, kExactTol);
  rep.check_le("lift_v_second_split", std::max(lv0.second_sup, lv1.second_sup), 0.0);
  rep.check_le("lift_w_second_split", std::max(lw0.second_sup, lw1.second_sup), 0.0);
  rep.check_in("lift_v_dinf_ratio", lv0.sup / lv1.sup, kOrderLo, kOrderHi);
  rep.check_in("lift_w_dinf_ratio", lw0.sup / lw1.sup, kOrderLo, kOrderHi);
  rep.check_le("lift_split_identity",
               std::max({lv0.split_error, lv1.split_error, lw0.split_error, lw1.split_error}),
               kSplitTol);

  ensure_output_dir(cfg);
  write_csv(out_path(cfg, "analytic_map.csv"), sm.u, {"u1", "u2"});
  write_csv(out_path(cfg, "analytic_eikonal.csv"), frobenius_sq(sm.Du), "du2");
  write_csv(out_path(cfg, "analytic_dinf.csv"), infinity_laplacian(jet), {"dinf1", "dinf2"});
  out.artifacts = {"analytic_map.csv", "analytic_eikonal.csv", "analytic_dinf.csv"};
  log << "analytic: dinf " << c0.sup << " -> " << c1.sup << "\n";
  return out;
}

CommandOutput ift_pipeline(const Config& cfg, std::ostream& log) {
  CommandOutput out;
  SolveReport& rep = out.report;
  rep.kind = "ift";
  const GridPtr grid = grid_from(cfg);
  const DiffOps ops(grid);
  const DivergenceSolver solver(ops);

  RootOptions opt;
  opt.tol = cfg.ift_tol;
  opt.max_iter = kMaxRootSteps;
  const VectorField phi = make_seed(ops, default_seed(*grid, cfg.ift_amplitude));
  const RootSolution root = solve_root(solver, phi, opt);
  out.run_extra["trivial"] = root.trivial;
  rep.iterations = root.iterations;

  // Re-evaluate the root independently of the solver's bookkeeping.
  const MatrixField Du = gradient_fd(ops, root.u);
  const Eigen::VectorXd q = frobenius_sq(Du).values() + 2.0 * divergence(ops, root.u).values();
  const double C = mean_value(frobenius_sq(Du));
  rep.check_le("root_residual", l2_norm(eval_M(ops, root.u)), cfg.ift_tol);
  rep.check_le("root_steps", root.iterations, kMaxRootSteps);
  rep.check_le("root_spread", q.maxCoeff() - q.minCoeff(), kProp13Tol * std::max(C, 1.0));
  rep.check_le("root_boundary", boundary_sup(root.u), 0.0);
  rep.metrics["C"] = C;
  rep.metrics["seed_sup"] = sup_norm(phi);
  rep.metrics["u_sup"] = sup_norm(root.u);
  rep.metrics["div_iterations"] = root.div_iterations;
  rep.series["residual_history"] = root.residual_history;

  const Counterexample cx = build_counterexample(ops, root);
  rep.check_gt("w_min_det", cx.min_det, 0.5);
  rep.check_le("w_spread", cx.spread, kProp13Tol * cx.constant);
  rep.check_le("w_boundary_identity", cx.boundary_error, 0.0);
  rep.metrics["w_constant"] = cx.constant;
  rep.metrics["identity_norm_sq"] = cx.identity_norm_sq;
  rep.metrics["einf_w"] = cx.einf_w;
  rep.metrics["einf_id"] = cx.einf_id;
  rep.metrics["einf_gap"] = cx.einf_gap;
  rep.metrics["sup_Du"] = cx.sup_Du;
  rep.metrics["determinant_safety_bound"] = determinant_safety_bound();
  rep.metrics["within_safety_bound"] = cx.within_safety_bound ? 1.0 : 0.0;
  rep.metrics["w_dinf_sup"] = cx.dinf_sup;
  rep.metrics["w_first_split_sup"] = cx.first_split_sup;
  rep.metrics["w_second_split_sup"] = cx.second_split_sup;

  if (!root.trivial) {
    rep.check_gt("C_positive", C, 0.0);
    rep.check_gt("einf_gap", cx.einf_gap, 0.0);
    const double a = cfg.ift_amplitude;
    const AccumulationResult acc = accumulation_check(solver, {a, a / 10.0, a / 100.0}, opt);
    rep.check_flag("accumulation_decreasing", acc.decreasing);
    rep.check_flag("accumulation_nontrivial", acc.all_nontrivial);
    rep.check_flag("accumulation_C_positive", acc.all_C_positive);
    rep.series["accumulation_amplitudes"] = acc.amplitudes;
    rep.series["accumulation_u_sup"] = acc.u_sup;
    rep.series["accumulation_seed_sup"] = acc.seed_sup;
    rep.series["accumulation_C"] = acc.C;
    rep.series["accumulation_residual"] = acc.residual;
  } else {
    rep.check_le("C_trivial", std::abs(C), 0.0);
  }

  ensure_output_dir(cfg);
  write_csv(out_path(cfg, "ift_root.csv"), root.u, {"u1", "u2"});
  write_csv(out_path(cfg, "ift_counterexample.csv"), cx.w, {"w1", "w2"});
  write_csv(out_path(cfg, "ift_eikonal.csv"), frobenius_sq(cx.Dw), "dw2");
  out.artifacts = {"ift_root.csv", "ift_counterexample.csv", "ift_eikonal.csv"};
  log << "ift: C " << C << " after " << root.iterations << " evaluations\n";
  return out;
}

CommandOutput plaplace_pipeline(const Config& cfg, std::ostream& log) {
  CommandOutput out;
  SolveReport& rep = out.report;
  rep.kind = "plaplace";
  const GridPtr grid = grid_from(cfg);
  const DiffOps ops(grid);
  const VectorField id = VectorField::identity(grid);
  const VectorField analytic = sample_to_field(make_generator(2, {1}, cfg.family_k), cfg.family_k, grid).u;
  const VectorField init = id + (analytic - id).scaled(0.5);
  PSolveOptions opt;
  opt.tol = cfg.plaplace_tol;

  ensure_output_dir(cfg);
  for (double p : cfg.plaplace_ps) {
    const std::string tag = p_tag(p);
    Stopwatch sw;
    const PSolveResult fixed = solve_p_harmonic(ops, p, id, id, opt);
    rep.check_le(tag + "_fixed_point_error", sup_norm(fixed.u - id), kIdentityTol);
    const PSolveResult res = solve_p_harmonic(ops, p, id, init, opt);
    rep.check_le(tag + "_identity_error", sup_norm(res.u - id), kIdentityTol);
    rep.check_le(tag + "_residual", res.residual, opt.tol);
    const RadialCheck rc = radial_benchmark(ops, p, opt);
    rep.check_le(tag + "_radial_error", rc.error, kRadialTol);
    rep.metrics[tag + "_iterations"] = res.iterations;
    rep.metrics[tag + "_inner_iterations"] = res.inner_iterations;
    rep.metrics[tag + "_fixed_point_iterations"] = fixed.iterations;
    rep.metrics[tag + "_radial_iterations"] = rc.iterations;
    rep.metrics[tag + "_energy"] = energy_p(ops, res.u, p);
    rep.series[tag + "_residual_history"] = res.residual_history;
    rep.series[tag + "_energy_history"] = res.energy_history;
    rep.iterations += res.iterations;
    const std::string name = "plaplace_" + tag + ".csv";
    write_csv(out_path(cfg, name), res.u, {"u1", "u2"});
    out.artifacts.push_back(name);
    log << "plaplace " << tag << ": " << res.iterations << " Newton steps, " << sw.seconds() << " s\n";
  }
  return out;
}

CommandOutput compare_pipeline(const Config& cfg, std::ostream& log) {
  CommandOutput out;
  SolveReport& rep = out.report;
  rep.kind = "compare";
  const GridPtr grid = grid_from(cfg);
  const DiffOps ops(grid);
  const VectorField analytic = sample_to_field(make_generator(2, {1}, cfg.family_k), cfg.family_k, grid).u;
  PSolveOptions opt;
  opt.tol = cfg.plaplace_tol;

  const PLimitReport lim = compare_p_limit(ops, cfg.plaplace_ps, analytic, opt);
  rep.check_gt("einf_gap", lim.einf_gap, 0.0);
  rep.metrics["dist_analytic_identity"] = lim.dist_analytic_identity;
  rep.metrics["einf_analytic"] = lim.einf_analytic;
  rep.metrics["einf_identity"] = lim.einf_identity;
  for (const PLimitEntry& e : lim.entries) {
    const std::string tag = p_tag(e.p);
    rep.check_le(tag + "_identity_error", e.err_identity, kIdentityTol);
    rep.check_gt(tag + "_gap", e.gap_analytic, 0.5 * lim.dist_analytic_identity);
    rep.check_gt(tag + "_einf_ordering", lim.einf_analytic - e.einf, 0.0);
    rep.metrics[tag + "_einf"] = e.einf;
    rep.metrics[tag + "_iterations"] = e.iterations;
    rep.metrics[tag + "_residual"] = e.residual;
    rep.metrics[tag + "_energy_max_rise"] = e.energy_max_rise;
    rep.metrics[tag + "_energy_monotone"] = e.energy_monotone ? 1.0 : 0.0;
    rep.iterations += e.iterations;
    log << "compare " << tag << ": gap " << e.gap_analytic << ", " << e.seconds << " s\n";
  }
  ensure_output_dir(cfg);
  write_csv(out_path(cfg, "compare_analytic.csv"), analytic, {"u1", "u2"});
  out.artifacts = {"compare_analytic.csv"};
  return out;
}

int run_command(const std::string& command, const Config& cfg, std::ostream& log) {
  RunInfo run;
  run.command = command;
  CommandOutput out;
  Stopwatch sw;
  try {
    if (command == "analytic") {
      out = analytic_pipeline(cfg, log);
    } else if (command == "ift") {
      out = ift_pipeline(cfg, log);
    } else if (command == "plaplace") {
      out = plaplace_pipeline(cfg, log);
    } else if (command == "compare") {
      out = compare_pipeline(cfg, log);
    } else {
      throw ConfigError("unknown command '" + command + "'");
    }
    run.exit_code = out.report.all_pass() ? kExitPass : kExitFailure;
    run.status = run.exit_code == kExitPass ? "pass" : "fail";
  } catch (const Error& e) {
    run.exit_code = exit_code_for(e.kind());
    run.status = "error";
    run.error_kind = e.kind();
    run.error_message = e.what();
    log << e.kind() << ": " << e.what() << "\n";
  }
  run.artifacts = out.artifacts;
  out.report.kind = out.report.kind.empty() ? command : out.report.kind;

  for (const auto& [name, c] : out.report.checks) {
    if (!c.pass) log << "check failed: " << name << " value " << c.value << " tolerance " << c.tolerance << "\n";
  }
  log << command << ": exit " << run.exit_code << " after " << sw.seconds() << " s\n";

  if (run.exit_code == kExitUsage && run.error_kind == "ConfigError") return run.exit_code;
  try {
    ensure_output_dir(cfg);
    nlohmann::json report = build_report(run, cfg, out.report);
    for (const auto& [k, v] : out.run_extra.items()) report["run"][k] = v;
    write_report(out_path(cfg, "report.json"), report);
  } catch (const Error& e) {
    log << e.kind() << ": " << e.what() << "\n";
    return kExitUsage;
  }
  return run.exit_code;
}

int cmd_analytic(const Config& cfg, std::ostream& log) { return run_command("analytic", cfg, log); }
int cmd_ift(const Config& cfg, std::ostream& log) { return run_command("ift", cfg, log); }
int cmd_plaplace(const Config& cfg, std::ostream& log) { return run_command("plaplace", cfg, log); }
int cmd_compare(const Config& cfg, std::ostream& log) { return run_command("compare", cfg, log); }

}  // namespace eikonal
