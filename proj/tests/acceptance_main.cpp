// Acceptance suite: each criterion runs standalone and prints one
// [PASS]/[FAIL] line. Run with no arguments for the full suite or with a
// criterion number to run just that one.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nmf/nmf.hpp"
#include "oracles.hpp"

namespace {

namespace fs = std::filesystem;
using nmf::Algorithm;
using nmf::DenseMatrix;

struct Outcome {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    ok = false;
    if (!detail.empty()) detail += "; ";
    detail += why;
  }
};

bool close_rel(double a, double b, double rel, double abs_tol) {
  return std::abs(a - b) <= std::max(abs_tol, rel * std::max(std::abs(a), std::abs(b)));
}

// 1. Element updates return the constrained quadratic minimizer, checked
// against a 1e5-point grid search on 10,000 random (p, q, w) triples.
Outcome criterion_element_optimality() {
  Outcome out;
  std::mt19937_64 rng(1001);
  double worst_gap = -1e300;
  for (int trial = 0; trial < 10000; ++trial) {
    const double p = (1.0 - oracles::unit_draw(rng)) * 10.0;  // (0, 10]
    const double q = -10.0 + oracles::unit_draw(rng) * 20.0;
    const double w = oracles::unit_draw(rng) * 10.0;
    const double alpha = nmf::w_step(p, q, w);
    if (nmf::h_step(p, q, w) != alpha) {
      out.fail("w_step and h_step disagree");
      break;
    }
    if (alpha < -w || w + alpha < 0.0) {
      out.fail("infeasible step at trial " + std::to_string(trial));
      break;
    }
    const auto grid = oracles::grid_search_quadratic(p, q, w, 100000);
    const double g_impl = 0.5 * p * alpha * alpha + q * alpha;
    const double gap = g_impl - grid.value;
    worst_gap = std::max(worst_gap, gap);
    if (gap > 1e-6) {
      out.fail("grid oracle beats the step by " + nmf::format_double(gap));
      break;
    }
  }
  if (out.ok) out.detail = "worst objective gap vs grid " + nmf::format_double(worst_gap);
  return out;
}

// 2. Additive traces are non-increasing every sweep and strictly
// decreasing while the normalized residual exceeds 1e-8; 20 seeds.
Outcome criterion_monotonicity() {
  Outcome out;
  for (std::uint64_t seed = 0; seed < 20 && out.ok; ++seed) {
    nmf::InstanceSpec spec{nmf::Shape3(30, 20, 4)};
    spec.seed = 2000 + seed;
    const auto inst = nmf::gen_instance(spec);
    nmf::SolverConfig config;
    config.max_sweeps = 200;
    config.tol_delta = 0.0;
    const auto result = nmf::solve_additive(inst.v, inst.w0, inst.h0, config);
    for (std::size_t k = 1; k < result.trace.size(); ++k) {
      const auto& prev = result.trace[k - 1];
      const auto& cur = result.trace[k];
      if (cur.objective > prev.objective) {
        out.fail("objective rose at seed " + std::to_string(seed) + " sweep " +
                 std::to_string(cur.sweep));
        break;
      }
      if (prev.delta_normalized > 1e-8 && cur.objective >= prev.objective) {
        out.fail("no strict decrease at seed " + std::to_string(seed) + " sweep " +
                 std::to_string(cur.sweep));
        break;
      }
    }
  }
  if (out.ok) out.detail = "20 seeds x 200 sweeps monotone";
  return out;
}

// 3. Residual-maintaining sweeps equal per-element recomputation.
Outcome criterion_fast_scheme_equivalence() {
  Outcome out;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 5 && out.ok; ++seed) {
    nmf::InstanceSpec spec{nmf::Shape3(10, 8, 3), {0.0, 10.0}, {0.0, 1.0}, {0.0, 1.0},
                           3000 + seed};
    const auto inst = nmf::gen_instance(spec);
    auto state = nmf::ResidualState::init(inst.v, inst.w0, inst.h0);
    DenseMatrix ref_w = inst.w0;
    DenseMatrix ref_h = inst.h0;
    for (int sweep = 0; sweep < 50; ++sweep) {
      nmf::transform_t(state);
      oracles::naive_transform(inst.v, ref_w, ref_h);
    }
    const double diff =
        std::max(oracles::max_abs_diff(state.w, ref_w), oracles::max_abs_diff(state.h, ref_h));
    worst = std::max(worst, diff);
    if (diff > 1e-9) {
      out.fail("factors diverge by " + nmf::format_double(diff) + " at seed " +
               std::to_string(seed));
    }
  }
  if (out.ok) out.detail = "max entry difference " + nmf::format_double(worst);
  return out;
}

// 4. The additive solver reaches delta < 1e-3 and the baselines end at
// least 10x higher under the same multiply budget; 18 of 20 seeds each.
Outcome criterion_stationarity_ordering() {
  Outcome out;
  const nmf::Shape3 shape(50, 25, 5);
  int additive_ok = 0;
  int ls_ok = 0;
  int gz_ok = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    nmf::InstanceSpec spec{shape};
    spec.seed = 4000 + seed;
    const auto inst = nmf::gen_instance(spec);

    nmf::SolverConfig config;
    config.max_sweeps = 5000;
    config.tol_delta = 1e-3;
    const auto additive = nmf::solve_additive(inst.v, inst.w0, inst.h0, config);
    const double delta_additive = additive.trace.back().delta_normalized;
    if (delta_additive < 1e-3) ++additive_ok;

    const double budget =
        static_cast<double>(additive.sweeps_done) *
        static_cast<double>(nmf::multiplies_per_iteration(Algorithm::additive, shape));
    nmf::BudgetedRun run;
    run.budget_mode = nmf::BudgetMode::multiply_count;
    run.checkpoints = {budget};

    run.algorithm = Algorithm::ls;
    const auto ls_trace = nmf::run_budgeted(inst.v, inst.w0, inst.h0, run, config);
    if (ls_trace.back().delta_normalized >= 10.0 * delta_additive) ++ls_ok;

    run.algorithm = Algorithm::gz;
    const auto gz_trace = nmf::run_budgeted(inst.v, inst.w0, inst.h0, run, config);
    if (gz_trace.back().delta_normalized >= 10.0 * delta_additive) ++gz_ok;
  }
  out.detail = "additive " + std::to_string(additive_ok) + "/20, ls " + std::to_string(ls_ok) +
               "/20, gz " + std::to_string(gz_ok) + "/20";
  if (additive_ok < 18) out.fail("additive convergence below 18/20");
  if (ls_ok < 18) out.fail("ls margin below 18/20");
  if (gz_ok < 18) out.fail("gz margin below 18/20");
  return out;
}

// 5. Five-trial averaged objectives put the additive solver first at every
// checkpoint from the second onward.
Outcome criterion_objective_ordering() {
  Outcome out;
  nmf::InstanceSpec spec{nmf::Shape3(50, 25, 5)};
  spec.seed = 5000;
  nmf::BudgetedRun budgets;
  budgets.checkpoints = {1, 2, 5, 10, 25, 50, 100};
  const auto result = nmf::experiment_two(spec, budgets, 5);

  for (std::size_t c = 1; c < budgets.checkpoints.size(); ++c) {
    double f_add = 0.0, f_ls = 0.0, f_gz = 0.0;
    for (const auto& row : result.rows) {
      if (row.checkpoint != budgets.checkpoints[c]) continue;
      if (row.algorithm == Algorithm::additive) f_add = row.objective;
      if (row.algorithm == Algorithm::ls) f_ls = row.objective;
      if (row.algorithm == Algorithm::gz) f_gz = row.objective;
    }
    if (!(f_add < f_ls && f_add < f_gz)) {
      out.fail("ordering fails at checkpoint " + nmf::format_double(budgets.checkpoints[c]));
    }
  }
  if (out.ok) out.detail = "additive lowest mean objective from checkpoint 2 on";
  return out;
}

// 6. Exact factorizations are fixed points of all three algorithms, and
// the additive solver recovers a planted factorization from random init.
Outcome criterion_exact_recovery() {
  Outcome out;
  std::mt19937_64 rng(6001);
  const DenseMatrix w_true = oracles::rand_matrix(rng, 8, 2, 0.5, 1.5);
  const DenseMatrix h_true = oracles::rand_matrix(rng, 2, 6, 0.5, 1.5);
  const DenseMatrix v = nmf::matmul(w_true, h_true);

  auto state = nmf::ResidualState::init(v, w_true, h_true);
  nmf::transform_t(state);
  if (!(state.w == w_true && state.h == h_true)) out.fail("additive moved off a fixed point");
  const auto ls = nmf::ls_update(v, w_true, h_true);
  if (!(ls.w == w_true && ls.h == h_true)) out.fail("ls moved off a fixed point");
  const auto gz = nmf::gz_update(v, w_true, h_true);
  if (!(gz.w == w_true && gz.h == h_true)) out.fail("gz moved off a fixed point");

  const double v_norm_sq = nmf::frobenius_norm_squared(v);
  int recovered = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 init_rng(6100 + seed);
    const DenseMatrix w0 = oracles::rand_matrix(init_rng, 8, 2, 0.0, 1.0);
    const DenseMatrix h0 = oracles::rand_matrix(init_rng, 2, 6, 0.0, 1.0);
    nmf::SolverConfig config;
    config.max_sweeps = 10000;
    config.tol_delta = 0.0;
    config.trace_every = 100;
    const auto result = nmf::solve_additive(v, w0, h0, config);
    if (result.trace.back().objective / v_norm_sq < 1e-6) ++recovered;
  }
  if (!out.detail.empty()) out.detail += "; ";
  out.detail += "recovered " + std::to_string(recovered) + "/10 from random init";
  if (recovered < 8) out.fail("fewer than 8/10 recoveries");
  return out;
}

// 7. Diagnostics match independent per-entry evaluation; gradients match
// finite differences.
Outcome criterion_diagnostics() {
  Outcome out;
  std::mt19937_64 rng(7001);
  for (int trial = 0; trial < 20 && out.ok; ++trial) {
    const DenseMatrix v = oracles::rand_matrix(rng, 6, 5, 0.0, 10.0);
    const DenseMatrix w = oracles::rand_matrix(rng, 6, 3, 0.0, 1.0);
    const DenseMatrix h = oracles::rand_matrix(rng, 3, 5, 0.0, 1.0);
    const auto fast = nmf::kkt_residual(v, w, h);

    DenseMatrix diff = oracles::naive_matmul(w, h);
    for (std::size_t i = 0; i < diff.rows(); ++i) {
      for (std::size_t j = 0; j < diff.cols(); ++j) diff(i, j) -= v(i, j);
    }
    const DenseMatrix gw = oracles::naive_matmul(diff, nmf::transpose(h));
    const DenseMatrix gh = oracles::naive_matmul(nmf::transpose(w), diff);
    double delta = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < w.rows(); ++i) {
      for (std::size_t a = 0; a < w.cols(); ++a) {
        const double t = std::min(w(i, a), gw(i, a));
        if (t != 0.0) {
          ++count;
          delta += std::abs(t);
        }
      }
    }
    for (std::size_t b = 0; b < h.rows(); ++b) {
      for (std::size_t j = 0; j < h.cols(); ++j) {
        const double t = std::min(h(b, j), gh(b, j));
        if (t != 0.0) {
          ++count;
          delta += std::abs(t);
        }
      }
    }
    if (!close_rel(fast.delta_raw, delta, 1e-12, 1e-12) ||
        fast.count_w + fast.count_h != count) {
      out.fail("kkt residual mismatch at trial " + std::to_string(trial));
    }
  }

  for (int trial = 0; trial < 5 && out.ok; ++trial) {
    const DenseMatrix v = oracles::rand_matrix(rng, 4, 3, 0.0, 1.0);
    const DenseMatrix w = oracles::rand_matrix(rng, 4, 2, 0.0, 1.0);
    const DenseMatrix h = oracles::rand_matrix(rng, 2, 3, 0.0, 1.0);
    const DenseMatrix gw = nmf::grad_w(v, w, h);
    const DenseMatrix gh = nmf::grad_h(v, w, h);
    const DenseMatrix fgw = oracles::fd_grad_w(v, w, h);
    const DenseMatrix fgh = oracles::fd_grad_h(v, w, h);
    for (std::size_t i = 0; i < gw.rows() && out.ok; ++i) {
      for (std::size_t j = 0; j < gw.cols(); ++j) {
        if (!close_rel(gw(i, j), fgw(i, j), 1e-5, 1e-7)) {
          out.fail("grad_w finite-difference mismatch");
          break;
        }
      }
    }
    for (std::size_t i = 0; i < gh.rows() && out.ok; ++i) {
      for (std::size_t j = 0; j < gh.cols(); ++j) {
        if (!close_rel(gh(i, j), fgh(i, j), 1e-5, 1e-7)) {
          out.fail("grad_h finite-difference mismatch");
          break;
        }
      }
    }
  }
  if (out.ok) out.detail = "20 residual checks, 5 finite-difference checks";
  return out;
}

// 8. Benchmark CSVs are byte-identical across runs in sweep-budget mode.
Outcome criterion_reproducibility() {
  Outcome out;
  const fs::path dir = fs::temp_directory_path() / "nmf_acceptance";
  fs::create_directories(dir);
  const auto run_to = [&](const fs::path& csv, const std::string& experiment) {
    const std::string cmd = std::string(NMF_CLI_BIN) + " benchmark --experiment " +
                            experiment + " --n 20 --m 10 --rank 3 --seed 123 " +
                            (experiment == "two" ? "--trials 3 " : "") +
                            "--budget-mode sweeps --checkpoints 5,10 --out " + csv.string() +
                            " > /dev/null 2>&1";
    return std::system(cmd.c_str()) == 0;
  };
  const auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  for (const std::string experiment : {"one", "two"}) {
    const fs::path a = dir / ("rep_a_" + experiment + ".csv");
    const fs::path b = dir / ("rep_b_" + experiment + ".csv");
    if (!run_to(a, experiment) || !run_to(b, experiment)) {
      out.fail("benchmark command failed for experiment " + experiment);
      continue;
    }
    const std::string text_a = slurp(a);
    if (text_a.empty() || text_a != slurp(b)) {
      out.fail("CSV runs differ for experiment " + experiment);
    }
  }
  if (out.ok) out.detail = "experiments one and two byte-identical across runs";
  return out;
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, "element-update optimality", 10.0, criterion_element_optimality},
      {2, "objective monotonicity", 30.0, criterion_monotonicity},
      {3, "fast-scheme equivalence", 10.0, criterion_fast_scheme_equivalence},
      {4, "stationarity ordering", 180.0, criterion_stationarity_ordering},
      {5, "averaged objective ordering", 180.0, criterion_objective_ordering},
      {6, "exact recovery", 60.0, criterion_exact_recovery},
      {7, "diagnostics correctness", 10.0, criterion_diagnostics},
      {8, "benchmark reproducibility", 60.0, criterion_reproducibility},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);

  int failures = 0;
  for (const Criterion& criterion : criteria()) {
    if (only != 0 && criterion.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome = criterion.run();
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (elapsed >= criterion.budget_seconds) {
      outcome.fail("runtime " + nmf::format_double(elapsed) + "s exceeds budget " +
                   nmf::format_double(criterion.budget_seconds) + "s");
    }
    std::printf("[%s] %d. %s%s%s (%.2fs)\n", outcome.ok ? "PASS" : "FAIL", criterion.id,
                criterion.name, outcome.detail.empty() ? "" : " - ",
                outcome.detail.c_str(), elapsed);
    if (!outcome.ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
