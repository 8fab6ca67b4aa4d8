#ifndef NMF_KKT_HPP
#define NMF_KKT_HPP

#include <cmath>
#include <cstddef>

#include "nmf/matrix.hpp"

namespace nmf {

/// Stationarity measurement for min f(W,H) s.t. W,H >= 0.
///
/// delta_raw sums |min(W_ia, dF/dW_ia)| over W and |min(H_bj, dF/dH_bj)|
/// over H; it is zero exactly at KKT points. count_w / count_h count the
/// nonzero min terms (exact comparison with 0), and delta_normalized is
/// delta_raw divided by their sum, defined as 0 when the sum is 0.
struct KktReport {
  double delta_raw;
  std::size_t count_w;
  std::size_t count_h;
  double delta_normalized;
  double objective;
};

/// Computes the KKT residual report from scratch: gradients come from a
/// fresh WH - V, never from solver-maintained state, so this doubles as a
/// drift detector for residual-maintaining solvers.
inline KktReport kkt_residual(const DenseMatrix& v, const DenseMatrix& w, const DenseMatrix& h) {
  check_factor_shapes(v, w, h, "kkt_residual");
  const DenseMatrix d = residual(v, w, h);
  const DenseMatrix gw = matmul(d, transpose(h));
  const DenseMatrix gh = matmul(transpose(w), d);

  double delta = 0.0;
  std::size_t count_w = 0;
  for (std::size_t i = 0; i < w.rows(); ++i) {
    for (std::size_t a = 0; a < w.cols(); ++a) {
      const double term = std::min(w(i, a), gw(i, a));
      if (term != 0.0) {
        ++count_w;
        delta += std::abs(term);
      }
    }
  }
  std::size_t count_h = 0;
  for (std::size_t b = 0; b < h.rows(); ++b) {
    for (std::size_t j = 0; j < h.cols(); ++j) {
      const double term = std::min(h(b, j), gh(b, j));
      if (term != 0.0) {
        ++count_h;
        delta += std::abs(term);
      }
    }
  }

  const std::size_t count = count_w + count_h;
  KktReport report;
  report.delta_raw = delta;
  report.count_w = count_w;
  report.count_h = count_h;
  report.delta_normalized = count > 0 ? delta / static_cast<double>(count) : 0.0;
  report.objective = 0.5 * frobenius_norm_squared(d);
  return report;
}

inline bool is_kkt_point(const DenseMatrix& v, const DenseMatrix& w, const DenseMatrix& h,
                         double tol) {
  return kkt_residual(v, w, h).delta_normalized <= tol;
}

}  // namespace nmf

#endif  // NMF_KKT_HPP
