#ifndef NMF_BASELINES_HPP
#define NMF_BASELINES_HPP

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "nmf/matrix.hpp"

namespace nmf {

/// Floor applied to multiplicative-update denominators and to the
/// component-wise division in the step-length function.
inline constexpr double kDenominatorFloor = 1e-12;

namespace detail {

/// Multiplicative target x * num / den with the floored denominator. Both
/// baselines funnel through this so that a unit step length reproduces the
/// multiplicative update bit for bit.
inline double mu_target(double x, double num, double den) {
  return x * (num / std::max(den, kDenominatorFloor));
}

}  // namespace detail

/// One Lee-Seung multiplicative update: H first, then W against the
/// updated H. Denominators keep the literal association W^T(WH) and
/// (WH)H^T, so an exact positive factorization is an exact fixed point.
inline FactorPair ls_update(const DenseMatrix& v, const DenseMatrix& w, const DenseMatrix& h) {
  check_factor_shapes(v, w, h, "ls_update");
  if (!w.is_nonnegative() || !h.is_nonnegative()) {
    throw std::invalid_argument("ls_update: factors must be nonnegative");
  }
  const DenseMatrix wt = transpose(w);
  const DenseMatrix num_h = matmul(wt, v);
  const DenseMatrix den_h = matmul(wt, matmul(w, h));
  DenseMatrix h_new = h;
  for (std::size_t i = 0; i < h.rows(); ++i) {
    for (std::size_t j = 0; j < h.cols(); ++j) {
      h_new(i, j) = detail::mu_target(h(i, j), num_h(i, j), den_h(i, j));
    }
  }
  const DenseMatrix ht = transpose(h_new);
  const DenseMatrix num_w = matmul(v, ht);
  const DenseMatrix den_w = matmul(matmul(w, h_new), ht);
  DenseMatrix w_new = w;
  for (std::size_t i = 0; i < w.rows(); ++i) {
    for (std::size_t j = 0; j < w.cols(); ++j) {
      w_new(i, j) = detail::mu_target(w(i, j), num_w(i, j), den_w(i, j));
    }
  }
  return FactorPair(std::move(w_new), std::move(h_new));
}

/// Inputs of the scalar step-length function theta = g(A, b, x).
struct GzStepInputs {
  DenseMatrix a_mat;
  std::vector<double> b_vec;
  std::vector<double> x_vec;

  GzStepInputs(DenseMatrix a, std::vector<double> b, std::vector<double> x)
      : a_mat(std::move(a)), b_vec(std::move(b)), x_vec(std::move(x)) {
    if (a_mat.rows() != b_vec.size() || a_mat.cols() != x_vec.size()) {
      throw DimensionError("GzStepInputs: A is " + std::to_string(a_mat.rows()) + "x" +
                           std::to_string(a_mat.cols()) + " but |b| = " +
                           std::to_string(b_vec.size()) + ", |x| = " +
                           std::to_string(x_vec.size()));
    }
    for (double xi : x_vec) {
      if (xi < 0.0) throw std::invalid_argument("GzStepInputs: x must be nonnegative");
    }
  }
};

namespace detail {

/// theta = min(p'q / p'A'Ap, 0.99 * max{gamma : x + gamma*p >= 0}) with
/// q = A'(b - Ax) and p = [x ./ A'Ax] o q. Degenerate cases: q = 0 or a
/// vanishing curvature p'A'Ap give theta = 0; when p >= 0 the ratio bound
/// is unbounded and only the first term applies.
inline double gz_theta(const DenseMatrix& a, std::span<const double> b,
                       std::span<const double> x) {
  const std::size_t rows = a.rows();
  const std::size_t cols = a.cols();

  std::vector<double> ax(rows, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < cols; ++k) s += a(i, k) * x[k];
    ax[i] = s;
  }
  std::vector<double> q(cols, 0.0);
  bool q_all_zero = true;
  for (std::size_t k = 0; k < cols; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < rows; ++i) s += a(i, k) * (b[i] - ax[i]);
    q[k] = s;
    if (s != 0.0) q_all_zero = false;
  }
  if (q_all_zero) return 0.0;

  std::vector<double> p(cols, 0.0);
  for (std::size_t k = 0; k < cols; ++k) {
    double atax = 0.0;
    for (std::size_t i = 0; i < rows; ++i) atax += a(i, k) * ax[i];
    p[k] = (x[k] / std::max(atax, kDenominatorFloor)) * q[k];
  }

  double curvature = 0.0;  // p'A'Ap = ||Ap||^2
  for (std::size_t i = 0; i < rows; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < cols; ++k) s += a(i, k) * p[k];
    curvature += s * s;
  }
  if (curvature <= 1e-12) return 0.0;

  double ptq = 0.0;
  for (std::size_t k = 0; k < cols; ++k) ptq += p[k] * q[k];

  double gamma = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < cols; ++k) {
    if (p[k] < 0.0) gamma = std::min(gamma, x[k] / -p[k]);
  }
  const double theta = ptq / curvature;
  return std::isinf(gamma) ? theta : std::min(theta, 0.99 * gamma);
}

inline std::vector<double> matrix_column(const DenseMatrix& a, std::size_t j) {
  std::vector<double> col(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) col[i] = a(i, j);
  return col;
}

inline std::vector<double> matrix_row(const DenseMatrix& a, std::size_t i) {
  std::vector<double> row(a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j) row[j] = a(i, j);
  return row;
}

}  // namespace detail

inline double gz_step_scalar(const GzStepInputs& inputs) {
  return detail::gz_theta(inputs.a_mat, inputs.b_vec, inputs.x_vec);
}

/// Test hook: forcing every step length to 1 reduces the update to the
/// plain multiplicative one.
struct GzOptions {
  std::optional<double> theta_override;
};

/// One Gonzalez-Zhang update: a step length per column of H, then one per
/// row of W, each applied to the scaled gradient direction of the
/// multiplicative scheme. W's pass uses the already-updated H.
inline FactorPair gz_update(const DenseMatrix& v, const DenseMatrix& w, const DenseMatrix& h,
                            const GzOptions& options = {}) {
  check_factor_shapes(v, w, h, "gz_update");
  if (!w.is_nonnegative() || !h.is_nonnegative()) {
    throw std::invalid_argument("gz_update: factors must be nonnegative");
  }
  const std::size_t n = v.rows();
  const std::size_t m = v.cols();
  const std::size_t r = w.cols();

  const DenseMatrix wt = transpose(w);
  const DenseMatrix num_h = matmul(wt, v);
  const DenseMatrix den_h = matmul(wt, matmul(w, h));
  DenseMatrix h_new = h;
  for (std::size_t j = 0; j < m; ++j) {
    const double theta = options.theta_override
                             ? *options.theta_override
                             : detail::gz_theta(w, detail::matrix_column(v, j),
                                                detail::matrix_column(h, j));
    for (std::size_t i = 0; i < r; ++i) {
      if (theta == 1.0) {
        h_new(i, j) = detail::mu_target(h(i, j), num_h(i, j), den_h(i, j));
      } else {
        const double den = std::max(den_h(i, j), kDenominatorFloor);
        h_new(i, j) = h(i, j) + theta * (h(i, j) / den) * (num_h(i, j) - den_h(i, j));
      }
    }
  }

  const DenseMatrix ht = transpose(h_new);
  const DenseMatrix num_w = matmul(v, ht);
  const DenseMatrix den_w = matmul(matmul(w, h_new), ht);
  DenseMatrix w_new = w;
  for (std::size_t i = 0; i < n; ++i) {
    const double theta = options.theta_override
                             ? *options.theta_override
                             : detail::gz_theta(ht, detail::matrix_row(v, i),
                                                detail::matrix_row(w, i));
    for (std::size_t j = 0; j < r; ++j) {
      if (theta == 1.0) {
        w_new(i, j) = detail::mu_target(w(i, j), num_w(i, j), den_w(i, j));
      } else {
        const double den = std::max(den_w(i, j), kDenominatorFloor);
        w_new(i, j) = w(i, j) + theta * (w(i, j) / den) * (num_w(i, j) - den_w(i, j));
      }
    }
  }
  return FactorPair(std::move(w_new), std::move(h_new));
}

}  // namespace nmf

#endif  // NMF_BASELINES_HPP
