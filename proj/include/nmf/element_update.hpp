#ifndef NMF_ELEMENT_UPDATE_HPP
#define NMF_ELEMENT_UPDATE_HPP

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace nmf {

/// Thrown when a solver's internal state is contradictory, e.g. a zero
/// curvature paired with a nonzero gradient term. Usually means the
/// maintained residual matrix has drifted.
class InconsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Exact minimizer of g(a) = 1/2*p*a^2 + q*a over a >= -w_ij.
///
/// The zero test on q is deliberately exact: p = 0 forces q = 0
/// structurally, and any nonzero q with positive p yields a valid
/// descent step. When the constraint binds the returned step is
/// exactly -w_ij, so w_ij + step evaluates to exactly 0.0.
inline double w_step(double p, double q, double w_ij) {
  if (q == 0.0) return 0.0;
  if (p <= 0.0) {
    throw InconsistencyError("w_step: curvature p = " + std::to_string(p) +
                             " with nonzero q = " + std::to_string(q));
  }
  const double unconstrained = -q / p;
  if (q > 0.0) return std::max(unconstrained, -w_ij);
  return unconstrained;
}

/// Mirror of w_step for H entries: minimizes 1/2*u*b^2 + v*b over b >= -h_ij.
inline double h_step(double u, double v, double h_ij) {
  if (v == 0.0) return 0.0;
  if (u <= 0.0) {
    throw InconsistencyError("h_step: curvature u = " + std::to_string(u) +
                             " with nonzero v = " + std::to_string(v));
  }
  const double unconstrained = -v / u;
  if (v > 0.0) return std::max(unconstrained, -h_ij);
  return unconstrained;
}

/// One planned single-element update: the target entry, the additive step,
/// and the quadratic coefficients it was computed from.
struct ElementUpdate {
  std::size_t row;
  std::size_t col;
  double step;
  double p_or_u;
  double q_or_v;
};

inline ElementUpdate plan_w_update(double p, double q, std::size_t row, std::size_t col,
                                   double w_ij) {
  return ElementUpdate{row, col, w_step(p, q, w_ij), p, q};
}

inline ElementUpdate plan_h_update(double u, double v, std::size_t row, std::size_t col,
                                   double h_ij) {
  return ElementUpdate{row, col, h_step(u, v, h_ij), u, v};
}

}  // namespace nmf

#endif  // NMF_ELEMENT_UPDATE_HPP
