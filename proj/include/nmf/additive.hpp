#ifndef NMF_ADDITIVE_HPP
#define NMF_ADDITIVE_HPP

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "nmf/config.hpp"
#include "nmf/element_update.hpp"
#include "nmf/kkt.hpp"
#include "nmf/matrix.hpp"

namespace nmf {

/// Multiplication counters for the fast update schemes, one field per
/// designated site class. q/v are the per-element inner products against
/// the maintained residual, p/u the hoisted squared-norm sums, d_updates
/// the row/column residual adjustments (skipped when a step is zero).
struct SweepCounter {
  std::uint64_t q_inner_products = 0;
  std::uint64_t v_inner_products = 0;
  std::uint64_t p_norms = 0;
  std::uint64_t u_norms = 0;
  std::uint64_t d_updates = 0;

  std::uint64_t total() const {
    return q_inner_products + v_inner_products + p_norms + u_norms + d_updates;
  }
};

/// Solver state for the additive algorithm: the current factors plus the
/// maintained residual D = WH - V and the objective cached from it.
struct ResidualState {
  DenseMatrix w;
  DenseMatrix h;
  DenseMatrix d;
  double f_cached = 0.0;

  static ResidualState init(const DenseMatrix& v, DenseMatrix w0, DenseMatrix h0) {
    check_factor_shapes(v, w0, h0, "ResidualState::init");
    if (!w0.is_nonnegative() || !h0.is_nonnegative()) {
      throw std::invalid_argument("ResidualState::init: initial factors must be nonnegative");
    }
    ResidualState s;
    s.w = std::move(w0);
    s.h = std::move(h0);
    s.refresh(v);
    return s;
  }

  /// Rebuilds D = WH - V from scratch and recomputes the cached objective.
  void refresh(const DenseMatrix& v) {
    d = residual(v, w, h);
    f_cached = 0.5 * frobenius_norm_squared(d);
  }

  void recompute_objective_from_d() { f_cached = 0.5 * frobenius_norm_squared(d); }
};

/// One Gauss-Seidel pass over all entries of W, columns outer, rows inner.
/// For each entry: p is hoisted per column, q comes from the maintained D,
/// the step is the exact constrained quadratic minimizer, and the affected
/// row of D is adjusted in place.
inline void sweep_w(ResidualState& s, SweepCounter* counter = nullptr) {
  const std::size_t n = s.w.rows();
  const std::size_t r = s.w.cols();
  const std::size_t m = s.h.cols();
  for (std::size_t j = 0; j < r; ++j) {
    double p = 0.0;
    for (std::size_t b = 0; b < m; ++b) p += s.h(j, b) * s.h(j, b);
    if (counter) counter->p_norms += m;
    for (std::size_t i = 0; i < n; ++i) {
      double q = 0.0;
      for (std::size_t b = 0; b < m; ++b) q += s.d(i, b) * s.h(j, b);
      if (counter) counter->q_inner_products += m;
      const double alpha = w_step(p, q, s.w(i, j));
      if (alpha != 0.0) {
        s.w(i, j) += alpha;
        for (std::size_t b = 0; b < m; ++b) s.d(i, b) += alpha * s.h(j, b);
        if (counter) counter->d_updates += m;
      }
    }
  }
  s.recompute_objective_from_d();
}

/// One Gauss-Seidel pass over all entries of H, rows outer, columns inner.
/// The affected column of D is adjusted with the W column that scales the
/// step (D = WH - V under H_ij += beta forces D_aj += beta * W_ai).
inline void sweep_h(ResidualState& s, SweepCounter* counter = nullptr) {
  const std::size_t n = s.w.rows();
  const std::size_t r = s.w.cols();
  const std::size_t m = s.h.cols();
  for (std::size_t i = 0; i < r; ++i) {
    double u = 0.0;
    for (std::size_t a = 0; a < n; ++a) u += s.w(a, i) * s.w(a, i);
    if (counter) counter->u_norms += n;
    for (std::size_t j = 0; j < m; ++j) {
      double v = 0.0;
      for (std::size_t a = 0; a < n; ++a) v += s.w(a, i) * s.d(a, j);
      if (counter) counter->v_inner_products += n;
      const double beta = h_step(u, v, s.h(i, j));
      if (beta != 0.0) {
        s.h(i, j) += beta;
        for (std::size_t a = 0; a < n; ++a) s.d(a, j) += beta * s.w(a, i);
        if (counter) counter->d_updates += n;
      }
    }
  }
  s.recompute_objective_from_d();
}

/// Full sweep: update every entry of W, then every entry of H. Strictly
/// decreases the objective unless the state is already a KKT point, in
/// which case it is the identity.
inline void transform_t(ResidualState& s, SweepCounter* counter = nullptr) {
  sweep_w(s, counter);
  sweep_h(s, counter);
}

struct SolveResult {
  FactorPair factors;
  std::vector<TraceRecord> trace;
  StopReason stop_reason;
  std::size_t sweeps_done;
};

namespace detail {

inline void check_solve_inputs(const DenseMatrix& v, const DenseMatrix& w0,
                               const DenseMatrix& h0, const SolverConfig& config,
                               const char* where) {
  config.validate();
  check_factor_shapes(v, w0, h0, where);
  if (config.rank && *config.rank != w0.cols()) {
    throw DimensionError(std::string(where) + ": config rank " + std::to_string(*config.rank) +
                         " does not match factor rank " + std::to_string(w0.cols()));
  }
  if (!w0.is_nonnegative() || !h0.is_nonnegative()) {
    throw std::invalid_argument(std::string(where) +
                                ": initial factors must be entrywise nonnegative");
  }
}

class StopwatchClock {
 public:
  StopwatchClock() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

/// Runs the additive algorithm from (w0, h0) until a stopping criterion
/// fires. The trace holds one record per sampled sweep (every
/// config.trace_every sweeps, plus sweep 0 and the final sweep); the
/// objective sequence is non-increasing.
inline SolveResult solve_additive(const DenseMatrix& v, const DenseMatrix& w0,
                                  const DenseMatrix& h0, const SolverConfig& config) {
  detail::check_solve_inputs(v, w0, h0, config, "solve_additive");
  const detail::StopwatchClock clock;
  ResidualState state = ResidualState::init(v, w0, h0);

  std::vector<TraceRecord> trace;
  const double delta0 = kkt_residual(v, state.w, state.h).delta_normalized;
  trace.push_back(TraceRecord{0, clock.seconds(), state.f_cached, delta0});
  if (delta0 <= config.tol_delta) {
    return SolveResult{FactorPair(state.w, state.h), std::move(trace),
                       StopReason::delta_tolerance, 0};
  }

  double f_prev = state.f_cached;
  for (std::size_t sweep = 1;; ++sweep) {
    transform_t(state);
    if (config.refresh_interval > 0 && sweep % config.refresh_interval == 0) {
      state.refresh(v);
    }
    const double f_now = state.f_cached;
    const double elapsed = clock.seconds();

    const bool stop_max = sweep >= config.max_sweeps;
    const bool stop_time =
        config.time_budget_seconds && elapsed >= *config.time_budget_seconds;
    const double rel_decrease = f_prev > 0.0 ? (f_prev - f_now) / f_prev : 0.0;
    const bool stop_f = config.tol_f > 0.0 && rel_decrease < config.tol_f;
    const bool sampled = sweep % config.trace_every == 0;

    if (sampled || stop_max || stop_time || stop_f) {
      const double delta = kkt_residual(v, state.w, state.h).delta_normalized;
      trace.push_back(TraceRecord{sweep, elapsed, f_now, delta});
      const bool stop_delta = delta <= config.tol_delta;
      if (stop_max || stop_time || stop_delta || stop_f) {
        StopReason reason = StopReason::max_sweeps;
        if (!stop_max) {
          reason = stop_time ? StopReason::time_budget
                             : (stop_delta ? StopReason::delta_tolerance
                                           : StopReason::objective_tolerance);
        }
        return SolveResult{FactorPair(state.w, state.h), std::move(trace), reason, sweep};
      }
    }
    f_prev = f_now;
  }
}

}  // namespace nmf

#endif  // NMF_ADDITIVE_HPP
