// Command-line frontend: factorize a matrix file, diagnose a factorization,
// or run the solver comparison experiments.

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "nmf/nmf.hpp"

namespace {

constexpr int kExitSuccess = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;

struct SolverFlags {
  std::string algorithm = "additive";
  std::size_t max_sweeps = 1000;
  double time_budget = 0.0;  // 0 = unset
  double tol_delta = 1e-4;
  double tol_f = 0.0;
  std::size_t refresh_interval = 64;
  std::uint64_t seed = 0;
  std::size_t trace_every = 1;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--algorithm", algorithm, "Solver: additive, ls, or gz")
        ->capture_default_str();
    cmd.add_option("--max-sweeps", max_sweeps, "Sweep/iteration cap")->capture_default_str();
    cmd.add_option("--time-budget", time_budget, "Wall-time budget in seconds (0 = none)");
    cmd.add_option("--tol-delta", tol_delta, "Stop when the normalized KKT residual <= this")
        ->capture_default_str();
    cmd.add_option("--tol-f", tol_f,
                   "Stop when the relative objective decrease per sweep < this (0 = off)");
    cmd.add_option("--refresh-interval", refresh_interval,
                   "Rebuild the residual matrix every k sweeps (0 = never)")
        ->capture_default_str();
    cmd.add_option("--seed", seed, "PRNG seed")->capture_default_str();
    cmd.add_option("--trace-every", trace_every, "Sample the trace every k sweeps")
        ->capture_default_str();
  }

  nmf::SolverConfig to_config() const {
    nmf::SolverConfig config;
    config.algorithm = nmf::algorithm_from_string(algorithm);
    config.max_sweeps = max_sweeps;
    if (time_budget != 0.0) config.time_budget_seconds = time_budget;
    config.tol_delta = tol_delta;
    config.tol_f = tol_f;
    config.refresh_interval = refresh_interval;
    config.seed = seed;
    config.trace_every = trace_every;
    config.validate();
    return config;
  }
};

struct FactorizeArgs {
  std::string input;
  std::string output_w;
  std::string output_h;
  std::string trace_path;
  std::size_t rank = 0;
  std::vector<double> init_range;
  SolverFlags solver;
};

struct DiagnoseArgs {
  std::string v_path;
  std::string w_path;
  std::string h_path;
};

struct BenchmarkArgs {
  std::string experiment;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t rank = 0;
  std::vector<double> v_range{0.0, 500.0};
  std::vector<double> w0_range{0.0, 5.0};
  std::vector<double> h0_range{0.0, 5.0};
  std::uint64_t seed = 0;
  std::string budget_mode = "sweeps";
  std::vector<double> checkpoints;
  std::size_t trials = 5;
  std::size_t refresh_interval = 64;
  std::string out_path;
  std::string traces_out;
  bool trials_given = false;
};

nmf::Range to_range(const std::vector<double>& pair, const char* flag) {
  if (pair.size() != 2 || pair[0] < 0.0 || pair[0] > pair[1]) {
    throw std::invalid_argument(std::string(flag) + " expects LO HI with 0 <= LO <= HI");
  }
  return nmf::Range{pair[0], pair[1]};
}

nmf::BudgetMode budget_mode_from_string(const std::string& s) {
  if (s == "sweeps") return nmf::BudgetMode::sweep_count;
  if (s == "time") return nmf::BudgetMode::wall_time;
  if (s == "multiplies") return nmf::BudgetMode::multiply_count;
  throw std::invalid_argument("unknown budget mode '" + s +
                              "', expected sweeps, time, or multiplies");
}

std::size_t benchmark_thread_cap() {
  const char* env = std::getenv("NMF_THREADS");
  if (env == nullptr) return 1;
  const std::string value(env);
  std::size_t parsed = 0;
  try {
    std::size_t consumed = 0;
    parsed = std::stoull(value, &consumed);
    if (consumed != value.size()) parsed = 0;
  } catch (const std::exception&) {
    parsed = 0;
  }
  if (parsed == 0) {
    throw std::invalid_argument("NMF_THREADS must be a positive integer, got '" + value + "'");
  }
  return parsed;
}

int run_factorize(const FactorizeArgs& args) {
  nmf::SolverConfig config = args.solver.to_config();
  config.rank = args.rank;

  const nmf::DenseMatrix v = nmf::read_matrix(args.input);
  if (!v.is_nonnegative()) {
    throw std::invalid_argument("NMF requires nonnegative input");
  }

  double lo = 0.0;
  double hi = 0.0;
  if (!args.init_range.empty()) {
    const nmf::Range range = to_range(args.init_range, "--init-range");
    lo = range.lo;
    hi = range.hi;
  } else {
    // Scale so the initial product's magnitude matches V's.
    double mean = 0.0;
    for (double x : v.values()) mean += x;
    mean /= static_cast<double>(v.size());
    hi = std::sqrt(mean / static_cast<double>(args.rank));
  }

  nmf::Prng rng(config.seed);
  nmf::DenseMatrix w0(v.rows(), args.rank);
  for (double& x : w0.values()) x = rng.uniform(lo, hi);
  nmf::DenseMatrix h0(args.rank, v.cols());
  for (double& x : h0.values()) x = rng.uniform(lo, hi);

  const nmf::SolveResult result = nmf::solve(v, w0, h0, config);

  nmf::write_matrix(args.output_w, result.factors.w);
  nmf::write_matrix(args.output_h, result.factors.h);
  if (!args.trace_path.empty()) {
    nmf::detail::atomic_write_text(args.trace_path,
                                   nmf::trace_to_json(result.trace).dump(2) + "\n");
  }

  const nmf::KktReport report = nmf::kkt_residual(v, result.factors.w, result.factors.h);
  std::cout << "sweeps = " << result.sweeps_done << "\n"
            << "objective = " << nmf::format_double(report.objective) << "\n"
            << "delta_normalized = " << nmf::format_double(report.delta_normalized) << "\n";
  return kExitSuccess;
}

int run_diagnose(const DiagnoseArgs& args) {
  const nmf::DenseMatrix v = nmf::read_matrix(args.v_path);
  const nmf::DenseMatrix w = nmf::read_matrix(args.w_path);
  const nmf::DenseMatrix h = nmf::read_matrix(args.h_path);
  const nmf::KktReport report = nmf::kkt_residual(v, w, h);
  const nlohmann::json out = {{"delta_raw", report.delta_raw},
                              {"count_w", report.count_w},
                              {"count_h", report.count_h},
                              {"delta_normalized", report.delta_normalized},
                              {"objective", report.objective}};
  std::cout << out.dump() << "\n";
  return kExitSuccess;
}

int run_benchmark(const BenchmarkArgs& args) {
  if (args.experiment != "one" && args.experiment != "two") {
    throw std::invalid_argument("--experiment must be 'one' or 'two'");
  }
  if (args.experiment == "one" && args.trials_given) {
    throw std::invalid_argument("--trials applies to experiment two only");
  }
  if (args.trials == 0) {
    throw std::invalid_argument("--trials must be positive");
  }

  nmf::InstanceSpec spec{nmf::Shape3(args.n, args.m, args.rank),
                         to_range(args.v_range, "--v-range"),
                         to_range(args.w0_range, "--w0-range"),
                         to_range(args.h0_range, "--h0-range"), args.seed};

  nmf::BudgetedRun budgets;
  budgets.budget_mode = budget_mode_from_string(args.budget_mode);
  budgets.checkpoints = args.checkpoints;
  budgets.validate();

  nmf::SolverConfig config;
  config.refresh_interval = args.refresh_interval;
  config.seed = args.seed;

  const std::size_t threads = benchmark_thread_cap();
  const nmf::ExperimentResult result =
      args.experiment == "one"
          ? nmf::experiment_one(spec, budgets, config, threads)
          : nmf::experiment_two(spec, budgets, args.trials, config, threads);

  std::ostringstream csv;
  nmf::write_comparison_csv(csv, result.rows);
  nmf::detail::atomic_write_text(args.out_path, csv.str());
  if (!args.traces_out.empty()) {
    nmf::detail::atomic_write_text(args.traces_out,
                                   nmf::arm_traces_to_json(result.traces).dump(2) + "\n");
  }
  return kExitSuccess;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dense nonnegative matrix factorization toolkit"};
  app.require_subcommand(1);

  FactorizeArgs fac;
  CLI::App* factorize = app.add_subcommand("factorize", "Factor a nonnegative matrix file");
  factorize->add_option("input", fac.input, "Input matrix file (CSV or .mtx)")->required();
  factorize->add_option("--rank", fac.rank, "Factorization rank")
      ->required()
      ->check(CLI::PositiveNumber);
  factorize->add_option("--output-w", fac.output_w, "Path for the W factor")->required();
  factorize->add_option("--output-h", fac.output_h, "Path for the H factor")->required();
  factorize->add_option("--trace", fac.trace_path, "Write the JSON trace here");
  factorize
      ->add_option("--init-range", fac.init_range,
                   "Initial factor entries drawn uniformly from [LO, HI]")
      ->expected(2);
  fac.solver.add_to(*factorize);

  DiagnoseArgs diag;
  CLI::App* diagnose =
      app.add_subcommand("diagnose", "Report KKT stationarity of a factorization");
  diagnose->add_option("V", diag.v_path, "Matrix V file")->required();
  diagnose->add_option("W", diag.w_path, "Factor W file")->required();
  diagnose->add_option("H", diag.h_path, "Factor H file")->required();

  BenchmarkArgs bench;
  CLI::App* benchmark = app.add_subcommand("benchmark", "Run a solver comparison experiment");
  benchmark->add_option("--experiment", bench.experiment, "Which experiment: one or two")
      ->required();
  benchmark->add_option("--n", bench.n, "Rows of V")->required()->check(CLI::PositiveNumber);
  benchmark->add_option("--m", bench.m, "Columns of V")->required()->check(CLI::PositiveNumber);
  benchmark->add_option("--rank", bench.rank, "Inner rank")
      ->required()
      ->check(CLI::PositiveNumber);
  benchmark->add_option("--v-range", bench.v_range, "Range LO HI for V entries")->expected(2);
  benchmark->add_option("--w0-range", bench.w0_range, "Range LO HI for initial W")->expected(2);
  benchmark->add_option("--h0-range", bench.h0_range, "Range LO HI for initial H")->expected(2);
  benchmark->add_option("--seed", bench.seed, "Instance seed")->capture_default_str();
  benchmark->add_option("--budget-mode", bench.budget_mode,
                        "Checkpoint units: sweeps, time, or multiplies")
      ->capture_default_str();
  benchmark
      ->add_option("--checkpoints", bench.checkpoints,
                   "Ascending checkpoint values, comma separated")
      ->required()
      ->delimiter(',');
  benchmark->add_option("--trials", bench.trials, "Trials to average (experiment two)")
      ->capture_default_str();
  benchmark->add_option("--refresh-interval", bench.refresh_interval,
                        "Residual rebuild interval for the additive arm")
      ->capture_default_str();
  benchmark->add_option("--out", bench.out_path, "Output CSV path")->required();
  benchmark->add_option("--traces-out", bench.traces_out, "Optional JSON traces path");

  try {
    app.parse(argc, argv);
    bench.trials_given = benchmark->count("--trials") > 0;
    if (factorize->parsed()) return run_factorize(fac);
    if (diagnose->parsed()) return run_diagnose(diag);
    if (benchmark->parsed()) return run_benchmark(bench);
    return kExitUsage;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const nmf::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const nmf::FileError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
