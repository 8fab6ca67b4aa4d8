#ifndef NMF_SOLVE_HPP
#define NMF_SOLVE_HPP

#include <utility>
#include <vector>

#include "nmf/additive.hpp"
#include "nmf/baselines.hpp"
#include "nmf/config.hpp"
#include "nmf/kkt.hpp"
#include "nmf/matrix.hpp"

namespace nmf {

namespace detail {

/// Shared stopping/tracing loop for the update-rule baselines. One
/// iteration replaces (W, H) wholesale via `update`.
template <typename Update>
SolveResult solve_iterative(const DenseMatrix& v, const DenseMatrix& w0, const DenseMatrix& h0,
                            const SolverConfig& config, const char* where, Update update) {
  check_solve_inputs(v, w0, h0, config, where);
  const StopwatchClock clock;
  DenseMatrix w = w0;
  DenseMatrix h = h0;

  std::vector<TraceRecord> trace;
  const KktReport initial = kkt_residual(v, w, h);
  trace.push_back(TraceRecord{0, clock.seconds(), initial.objective, initial.delta_normalized});
  if (initial.delta_normalized <= config.tol_delta) {
    return SolveResult{FactorPair(std::move(w), std::move(h)), std::move(trace),
                       StopReason::delta_tolerance, 0};
  }

  double f_prev = initial.objective;
  for (std::size_t sweep = 1;; ++sweep) {
    FactorPair next = update(v, w, h);
    w = std::move(next.w);
    h = std::move(next.h);
    const double f_now = objective(v, w, h);
    const double elapsed = clock.seconds();

    const bool stop_max = sweep >= config.max_sweeps;
    const bool stop_time =
        config.time_budget_seconds && elapsed >= *config.time_budget_seconds;
    const double rel_decrease = f_prev > 0.0 ? (f_prev - f_now) / f_prev : 0.0;
    const bool stop_f = config.tol_f > 0.0 && rel_decrease < config.tol_f;
    const bool sampled = sweep % config.trace_every == 0;

    if (sampled || stop_max || stop_time || stop_f) {
      const double delta = kkt_residual(v, w, h).delta_normalized;
      trace.push_back(TraceRecord{sweep, elapsed, f_now, delta});
      const bool stop_delta = delta <= config.tol_delta;
      if (stop_max || stop_time || stop_delta || stop_f) {
        StopReason reason = StopReason::max_sweeps;
        if (!stop_max) {
          reason = stop_time ? StopReason::time_budget
                             : (stop_delta ? StopReason::delta_tolerance
                                           : StopReason::objective_tolerance);
        }
        return SolveResult{FactorPair(std::move(w), std::move(h)), std::move(trace), reason,
                           sweep};
      }
    }
    f_prev = f_now;
  }
}

}  // namespace detail

inline SolveResult solve_ls(const DenseMatrix& v, const DenseMatrix& w0, const DenseMatrix& h0,
                            const SolverConfig& config) {
  return detail::solve_iterative(v, w0, h0, config, "solve_ls",
                                 [](const DenseMatrix& v_, const DenseMatrix& w,
                                    const DenseMatrix& h) { return ls_update(v_, w, h); });
}

inline SolveResult solve_gz(const DenseMatrix& v, const DenseMatrix& w0, const DenseMatrix& h0,
                            const SolverConfig& config) {
  return detail::solve_iterative(v, w0, h0, config, "solve_gz",
                                 [](const DenseMatrix& v_, const DenseMatrix& w,
                                    const DenseMatrix& h) { return gz_update(v_, w, h); });
}

/// Runs the algorithm selected by config.algorithm.
inline SolveResult solve(const DenseMatrix& v, const DenseMatrix& w0, const DenseMatrix& h0,
                         const SolverConfig& config) {
  switch (config.algorithm) {
    case Algorithm::additive: return solve_additive(v, w0, h0, config);
    case Algorithm::ls: return solve_ls(v, w0, h0, config);
    case Algorithm::gz: return solve_gz(v, w0, h0, config);
  }
  throw std::invalid_argument("solve: unknown algorithm");
}

}  // namespace nmf

#endif  // NMF_SOLVE_HPP
