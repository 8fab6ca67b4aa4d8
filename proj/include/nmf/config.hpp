#ifndef NMF_CONFIG_HPP
#define NMF_CONFIG_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace nmf {

enum class Algorithm { additive, ls, gz };

inline std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::additive: return "additive";
    case Algorithm::ls: return "ls";
    case Algorithm::gz: return "gz";
  }
  throw std::invalid_argument("unknown algorithm");
}

inline Algorithm algorithm_from_string(std::string_view s) {
  if (s == "additive") return Algorithm::additive;
  if (s == "ls") return Algorithm::ls;
  if (s == "gz") return Algorithm::gz;
  throw std::invalid_argument("unknown algorithm '" + std::string(s) +
                              "', expected additive, ls, or gz");
}

enum class StopReason { max_sweeps, time_budget, delta_tolerance, objective_tolerance };

inline std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::max_sweeps: return "max_sweeps";
    case StopReason::time_budget: return "time_budget";
    case StopReason::delta_tolerance: return "delta_tolerance";
    case StopReason::objective_tolerance: return "objective_tolerance";
  }
  throw std::invalid_argument("unknown stop reason");
}

/// Solver knobs shared by all three algorithms. A solve stops at the first
/// of: sweep count reaching max_sweeps, elapsed wall time reaching
/// time_budget_seconds (when set), normalized KKT residual falling to
/// tol_delta, or the relative per-sweep objective decrease falling below
/// tol_f (tol_f = 0 disables that check). max_sweeps is always active.
struct SolverConfig {
  Algorithm algorithm = Algorithm::additive;
  std::optional<std::size_t> rank;  ///< checked against factor shapes when set
  std::size_t max_sweeps = 1000;
  std::optional<double> time_budget_seconds;
  double tol_delta = 1e-4;
  double tol_f = 0.0;
  std::size_t refresh_interval = 64;  ///< rebuild D every k sweeps; 0 disables
  std::uint64_t seed = 0;
  std::size_t trace_every = 1;  ///< sample (f, delta) every k sweeps

  void validate() const {
    if (max_sweeps == 0) throw std::invalid_argument("SolverConfig: max_sweeps must be positive");
    if (rank && *rank == 0) throw std::invalid_argument("SolverConfig: rank must be positive");
    if (time_budget_seconds && *time_budget_seconds <= 0.0) {
      throw std::invalid_argument("SolverConfig: time budget must be positive");
    }
    if (tol_delta < 0.0 || tol_f < 0.0) {
      throw std::invalid_argument("SolverConfig: tolerances must be nonnegative");
    }
    if (trace_every == 0) throw std::invalid_argument("SolverConfig: trace_every must be positive");
  }
};

/// One per-sweep sample of a solver run.
struct TraceRecord {
  std::size_t sweep;
  double elapsed_seconds;
  double objective;
  double delta_normalized;
};

}  // namespace nmf

#endif  // NMF_CONFIG_HPP
