#ifndef NMF_BENCH_HPP
#define NMF_BENCH_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iterator>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "json.hpp"

#include "nmf/additive.hpp"
#include "nmf/baselines.hpp"
#include "nmf/config.hpp"
#include "nmf/kkt.hpp"
#include "nmf/matrix.hpp"
#include "nmf/number_format.hpp"

namespace nmf {

/// Seedable uniform generator with a fixed portable mapping: mt19937_64
/// outputs reduced to 53-bit unit doubles, so identical seeds give
/// bit-identical draws on every conforming platform.
class Prng {
 public:
  explicit Prng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double next_unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + next_unit() * (hi - lo); }

 private:
  std::mt19937_64 engine_;
};

struct Range {
  double lo;
  double hi;
};

/// Dimensions, entry ranges, and seed for one random problem instance.
struct InstanceSpec {
  Shape3 shape;
  Range v_range{0.0, 500.0};
  Range w0_range{0.0, 5.0};
  Range h0_range{0.0, 5.0};
  std::uint64_t seed = 0;

  void validate() const {
    for (const Range& range : {v_range, w0_range, h0_range}) {
      if (range.lo < 0.0 || range.lo > range.hi) {
        throw std::invalid_argument("InstanceSpec: ranges must satisfy 0 <= lo <= hi");
      }
    }
  }
};

struct Instance {
  DenseMatrix v;
  DenseMatrix w0;
  DenseMatrix h0;
};

/// Deterministic instance generation: one mt19937_64 stream per spec,
/// filling V row-major, then W0, then H0.
inline Instance gen_instance(const InstanceSpec& spec) {
  spec.validate();
  Prng rng(spec.seed);
  const auto fill = [&rng](std::size_t rows, std::size_t cols, Range range) {
    DenseMatrix mat(rows, cols);
    for (double& x : mat.values()) x = rng.uniform(range.lo, range.hi);
    return mat;
  };
  Instance inst{fill(spec.shape.n, spec.shape.m, spec.v_range),
                fill(spec.shape.n, spec.shape.r, spec.w0_range),
                fill(spec.shape.r, spec.shape.m, spec.h0_range)};
  return inst;
}

enum class BudgetMode { sweep_count, wall_time, multiply_count };

/// One budgeted solver arm: which algorithm to run and where to sample.
/// Checkpoints are sweep counts, wall-clock seconds, or multiply budgets
/// depending on the mode, and must be positive and strictly increasing.
struct BudgetedRun {
  Algorithm algorithm = Algorithm::additive;
  BudgetMode budget_mode = BudgetMode::sweep_count;
  std::vector<double> checkpoints;

  void validate() const {
    if (checkpoints.empty()) {
      throw std::invalid_argument("BudgetedRun: checkpoints must be nonempty");
    }
    double prev = 0.0;
    for (double c : checkpoints) {
      if (c <= prev) {
        throw std::invalid_argument(
            "BudgetedRun: checkpoints must be positive and strictly increasing");
      }
      prev = c;
    }
  }
};

/// Nominal multiplications per iteration of each algorithm on an n x m
/// rank-r problem, dominant terms of this implementation. Used to convert
/// a shared multiply budget into per-algorithm iteration counts.
inline std::uint64_t multiplies_per_iteration(Algorithm algorithm, const Shape3& shape) {
  const std::uint64_t nmr =
      static_cast<std::uint64_t>(shape.n) * shape.m * shape.r;
  const std::uint64_t edge = static_cast<std::uint64_t>(shape.r) * (shape.n + shape.m);
  switch (algorithm) {
    case Algorithm::additive: return 4 * nmr + edge;
    case Algorithm::ls: return 6 * nmr + 2 * edge;
    case Algorithm::gz: return 12 * nmr + 3 * edge;
  }
  throw std::invalid_argument("multiplies_per_iteration: unknown algorithm");
}

namespace detail {

struct AdditiveArm {
  const DenseMatrix& v;
  ResidualState state;
  std::size_t refresh_interval;
  std::size_t sweeps = 0;

  AdditiveArm(const DenseMatrix& v_, const DenseMatrix& w0, const DenseMatrix& h0,
              std::size_t refresh)
      : v(v_), state(ResidualState::init(v_, w0, h0)), refresh_interval(refresh) {}

  void step() {
    transform_t(state);
    ++sweeps;
    if (refresh_interval > 0 && sweeps % refresh_interval == 0) state.refresh(v);
  }
  double objective_value() const { return state.f_cached; }
  const DenseMatrix& w() const { return state.w; }
  const DenseMatrix& h() const { return state.h; }
};

struct LsArm {
  const DenseMatrix& v;
  DenseMatrix w_cur;
  DenseMatrix h_cur;

  LsArm(const DenseMatrix& v_, const DenseMatrix& w0, const DenseMatrix& h0)
      : v(v_), w_cur(w0), h_cur(h0) {}

  void step() {
    FactorPair next = ls_update(v, w_cur, h_cur);
    w_cur = std::move(next.w);
    h_cur = std::move(next.h);
  }
  double objective_value() const { return objective(v, w_cur, h_cur); }
  const DenseMatrix& w() const { return w_cur; }
  const DenseMatrix& h() const { return h_cur; }
};

struct GzArm : LsArm {
  using LsArm::LsArm;
  void step() {
    FactorPair next = gz_update(v, w_cur, h_cur);
    w_cur = std::move(next.w);
    h_cur = std::move(next.h);
  }
};

template <typename ArmFactory>
std::vector<TraceRecord> drive_budgeted(ArmFactory make_arm, const DenseMatrix& v,
                                        const BudgetedRun& run, const Shape3& shape) {
  // The clock starts before the arm is built, so wall-time budgets charge
  // for initialization work such as the first residual computation.
  const StopwatchClock clock;
  auto arm = make_arm();
  std::vector<TraceRecord> records;
  records.reserve(run.checkpoints.size());
  const std::uint64_t iter_cost = multiplies_per_iteration(run.algorithm, shape);

  std::size_t next_cp = 0;
  std::size_t iter = 0;
  std::uint64_t multiplies = 0;
  while (next_cp < run.checkpoints.size()) {
    arm.step();
    ++iter;
    multiplies += iter_cost;
    const double elapsed = clock.seconds();
    const double progress = run.budget_mode == BudgetMode::sweep_count
                                ? static_cast<double>(iter)
                                : (run.budget_mode == BudgetMode::wall_time
                                       ? elapsed
                                       : static_cast<double>(multiplies));
    while (next_cp < run.checkpoints.size() && progress >= run.checkpoints[next_cp]) {
      const KktReport report = kkt_residual(v, arm.w(), arm.h());
      records.push_back(
          TraceRecord{iter, elapsed, arm.objective_value(), report.delta_normalized});
      ++next_cp;
    }
  }
  return records;
}

}  // namespace detail

/// Runs one algorithm from (w0, h0) under the given budget, sampling
/// objective and normalized KKT residual at each checkpoint. All trace
/// samples are taken at iteration boundaries.
inline std::vector<TraceRecord> run_budgeted(const DenseMatrix& v, const DenseMatrix& w0,
                                             const DenseMatrix& h0, const BudgetedRun& run,
                                             const SolverConfig& config) {
  run.validate();
  check_factor_shapes(v, w0, h0, "run_budgeted");
  if (!w0.is_nonnegative() || !h0.is_nonnegative()) {
    throw std::invalid_argument("run_budgeted: initial factors must be nonnegative");
  }
  const Shape3 shape(v.rows(), v.cols(), w0.cols());
  switch (run.algorithm) {
    case Algorithm::additive:
      return detail::drive_budgeted(
          [&]() { return detail::AdditiveArm(v, w0, h0, config.refresh_interval); }, v, run,
          shape);
    case Algorithm::ls:
      return detail::drive_budgeted([&]() { return detail::LsArm(v, w0, h0); }, v, run, shape);
    case Algorithm::gz:
      return detail::drive_budgeted([&]() { return detail::GzArm(v, w0, h0); }, v, run, shape);
  }
  throw std::invalid_argument("run_budgeted: unknown algorithm");
}

/// One cell of a comparison table.
struct ComparisonRow {
  double checkpoint;
  Algorithm algorithm;
  double objective;
  double delta_normalized;
};

/// Checkpoint samples of one (algorithm, trial) arm.
struct ArmTrace {
  Algorithm algorithm;
  std::size_t trial;
  std::vector<TraceRecord> records;
};

struct ExperimentResult {
  std::vector<ComparisonRow> rows;
  std::vector<ArmTrace> traces;
};

inline constexpr Algorithm kComparedAlgorithms[] = {Algorithm::additive, Algorithm::ls,
                                                    Algorithm::gz};

namespace detail {

/// Runs `jobs` with at most `max_threads` workers; results land by index.
template <typename Job>
void run_jobs(const std::vector<Job>& jobs, std::size_t max_threads) {
  const std::size_t workers = std::min(std::max<std::size_t>(max_threads, 1), jobs.size());
  if (workers <= 1) {
    for (const Job& job : jobs) job();
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::atomic<std::size_t> cursor{0};
  for (std::size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&]() {
      for (std::size_t idx = cursor.fetch_add(1); idx < jobs.size();
           idx = cursor.fetch_add(1)) {
        jobs[idx]();
      }
    });
  }
  for (std::thread& th : pool) th.join();
}

}  // namespace detail

/// Convergence comparison on one instance: every algorithm runs from the
/// same (V, W0, H0) under the same budget; rows come out grouped by
/// checkpoint in (additive, ls, gz) order.
inline ExperimentResult experiment_one(const InstanceSpec& scale, const BudgetedRun& budgets,
                                       const SolverConfig& config = {},
                                       std::size_t max_threads = 1) {
  budgets.validate();
  const Instance inst = gen_instance(scale);
  constexpr std::size_t n_algos = std::size(kComparedAlgorithms);

  ExperimentResult result;
  result.traces.resize(n_algos);
  std::vector<std::function<void()>> jobs;
  for (std::size_t a = 0; a < n_algos; ++a) {
    result.traces[a].algorithm = kComparedAlgorithms[a];
    result.traces[a].trial = 0;
    jobs.emplace_back([&, a]() {
      BudgetedRun arm = budgets;
      arm.algorithm = kComparedAlgorithms[a];
      result.traces[a].records = run_budgeted(inst.v, inst.w0, inst.h0, arm, config);
    });
  }
  detail::run_jobs(jobs, max_threads);

  result.rows.reserve(budgets.checkpoints.size() * n_algos);
  for (std::size_t c = 0; c < budgets.checkpoints.size(); ++c) {
    for (std::size_t a = 0; a < n_algos; ++a) {
      const TraceRecord& rec = result.traces[a].records[c];
      result.rows.push_back(ComparisonRow{budgets.checkpoints[c], kComparedAlgorithms[a],
                                          rec.objective, rec.delta_normalized});
    }
  }
  return result;
}

/// Multi-trial comparison: V is fixed by the spec's seed while trial t
/// draws its initial factors from seed + t, so trial 0 reproduces
/// gen_instance(scale) exactly. Objectives and residuals are averaged
/// arithmetically over trials.
inline ExperimentResult experiment_two(const InstanceSpec& scale, const BudgetedRun& budgets,
                                       std::size_t trials, const SolverConfig& config = {},
                                       std::size_t max_threads = 1) {
  if (trials == 0) throw std::invalid_argument("experiment_two: trials must be >= 1");
  budgets.validate();
  const Instance base = gen_instance(scale);
  constexpr std::size_t n_algos = std::size(kComparedAlgorithms);

  ExperimentResult result;
  result.traces.resize(n_algos * trials);
  std::vector<std::function<void()>> jobs;
  for (std::size_t t = 0; t < trials; ++t) {
    InstanceSpec trial_spec = scale;
    trial_spec.seed = scale.seed + t;
    const Instance trial_inst = gen_instance(trial_spec);
    for (std::size_t a = 0; a < n_algos; ++a) {
      ArmTrace& slot = result.traces[t * n_algos + a];
      slot.algorithm = kComparedAlgorithms[a];
      slot.trial = t;
      jobs.emplace_back([&, t, a, w0 = trial_inst.w0, h0 = trial_inst.h0]() {
        BudgetedRun arm = budgets;
        arm.algorithm = kComparedAlgorithms[a];
        result.traces[t * n_algos + a].records = run_budgeted(base.v, w0, h0, arm, config);
      });
    }
  }
  detail::run_jobs(jobs, max_threads);

  result.rows.reserve(budgets.checkpoints.size() * n_algos);
  for (std::size_t c = 0; c < budgets.checkpoints.size(); ++c) {
    for (std::size_t a = 0; a < n_algos; ++a) {
      double f_sum = 0.0;
      double delta_sum = 0.0;
      for (std::size_t t = 0; t < trials; ++t) {
        const TraceRecord& rec = result.traces[t * n_algos + a].records[c];
        f_sum += rec.objective;
        delta_sum += rec.delta_normalized;
      }
      result.rows.push_back(ComparisonRow{budgets.checkpoints[c], kComparedAlgorithms[a],
                                          f_sum / static_cast<double>(trials),
                                          delta_sum / static_cast<double>(trials)});
    }
  }
  return result;
}

inline void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows) {
  out << "checkpoint,algorithm,objective,delta_normalized\n";
  for (const ComparisonRow& row : rows) {
    out << format_double(row.checkpoint) << ',' << to_string(row.algorithm) << ','
        << format_double(row.objective) << ',' << format_double(row.delta_normalized) << '\n';
  }
}

inline nlohmann::json trace_to_json(const std::vector<TraceRecord>& trace) {
  nlohmann::json arr = nlohmann::json::array();
  for (const TraceRecord& rec : trace) {
    arr.push_back({{"sweep", rec.sweep},
                   {"elapsed_seconds", rec.elapsed_seconds},
                   {"objective", rec.objective},
                   {"delta_normalized", rec.delta_normalized}});
  }
  return arr;
}

inline nlohmann::json arm_traces_to_json(const std::vector<ArmTrace>& traces) {
  nlohmann::json arr = nlohmann::json::array();
  for (const ArmTrace& arm : traces) {
    arr.push_back({{"algorithm", std::string(to_string(arm.algorithm))},
                   {"trial", arm.trial},
                   {"trace", trace_to_json(arm.records)}});
  }
  return arr;
}

}  // namespace nmf

#endif  // NMF_BENCH_HPP
