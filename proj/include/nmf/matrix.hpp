#ifndef NMF_MATRIX_HPP
#define NMF_MATRIX_HPP

#include <cassert>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nmf {

/// Thrown when matrix shapes do not conform for an operation.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dense row-major matrix of doubles. Constructors reject non-finite
/// entries; element mutation goes through the non-const accessor.
class DenseMatrix {
 public:
  DenseMatrix() = default;

  /// Zero-initialized rows x cols matrix. Dimensions must be positive.
  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(check_dims(rows, cols), 0.0) {}

  /// Takes ownership of row-major data; length must equal rows*cols and
  /// every entry must be finite.
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    check_dims(rows, cols);
    if (data_.size() != rows * cols) {
      throw DimensionError("DenseMatrix: data length " + std::to_string(data_.size()) +
                           " does not equal rows*cols = " + std::to_string(rows * cols));
    }
    for (double x : data_) {
      if (!std::isfinite(x)) {
        throw std::invalid_argument("DenseMatrix: non-finite entry");
      }
    }
  }

  /// Row-of-rows construction, mainly for literals in tests and tools.
  static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    if (rows.size() == 0) throw DimensionError("DenseMatrix::from_rows: no rows");
    const std::size_t cols = rows.begin()->size();
    std::vector<double> data;
    data.reserve(rows.size() * cols);
    for (const auto& row : rows) {
      if (row.size() != cols) {
        throw DimensionError("DenseMatrix::from_rows: ragged rows");
      }
      data.insert(data.end(), row.begin(), row.end());
    }
    return DenseMatrix(rows.size(), cols, std::move(data));
  }

  static DenseMatrix constant(std::size_t rows, std::size_t cols, double value) {
    if (!std::isfinite(value)) throw std::invalid_argument("DenseMatrix::constant: non-finite value");
    DenseMatrix m(rows, cols);
    for (double& x : m.data_) x = value;
    return m;
  }

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double operator()(std::size_t i, std::size_t j) const {
    assert(i < rows_ && j < cols_);
    return data_[i * cols_ + j];
  }
  /// Mutation handle; finiteness is the caller's responsibility here.
  double& operator()(std::size_t i, std::size_t j) {
    assert(i < rows_ && j < cols_);
    return data_[i * cols_ + j];
  }

  std::span<const double> values() const { return data_; }
  std::span<double> values() { return data_; }

  bool same_shape(const DenseMatrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  bool is_nonnegative() const {
    for (double x : data_) {
      if (x < 0.0) return false;
    }
    return true;
  }

  friend bool operator==(const DenseMatrix& a, const DenseMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  static std::size_t check_dims(std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) {
      throw DimensionError("DenseMatrix: dimensions must be positive");
    }
    return rows * cols;
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Problem dimensions: V is n x m, W is n x r, H is r x m.
struct Shape3 {
  std::size_t n;
  std::size_t m;
  std::size_t r;

  Shape3(std::size_t n_, std::size_t m_, std::size_t r_) : n(n_), m(m_), r(r_) {
    if (n == 0 || m == 0 || r == 0) {
      throw DimensionError("Shape3: all dimensions must be positive");
    }
  }
};

/// A candidate factorization: W (n x r) and H (r x m), entrywise >= 0.
struct FactorPair {
  DenseMatrix w;
  DenseMatrix h;

  FactorPair(DenseMatrix w_, DenseMatrix h_) : w(std::move(w_)), h(std::move(h_)) {
    if (w.cols() != h.rows()) {
      throw DimensionError("FactorPair: W has " + std::to_string(w.cols()) +
                           " columns but H has " + std::to_string(h.rows()) + " rows");
    }
    if (!w.is_nonnegative() || !h.is_nonnegative()) {
      throw std::invalid_argument("FactorPair: factors must be entrywise nonnegative");
    }
  }
};

inline DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      t(j, i) = a(i, j);
    }
  }
  return t;
}

/// Standard matrix product. Row-major i-k-j loop; per-entry accumulation
/// runs over k in ascending order, which several exactness tests rely on.
inline DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: inner dimensions " + std::to_string(a.cols()) + " and " +
                         std::to_string(b.rows()) + " do not match");
  }
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) {
        c(i, j) += aik * b(k, j);
      }
    }
  }
  return c;
}

inline void check_factor_shapes(const DenseMatrix& v, const DenseMatrix& w,
                                const DenseMatrix& h, const char* where) {
  if (w.rows() != v.rows() || h.cols() != v.cols() || w.cols() != h.rows()) {
    throw DimensionError(std::string(where) + ": shapes do not conform, V is " +
                         std::to_string(v.rows()) + "x" + std::to_string(v.cols()) + ", W is " +
                         std::to_string(w.rows()) + "x" + std::to_string(w.cols()) + ", H is " +
                         std::to_string(h.rows()) + "x" + std::to_string(h.cols()));
  }
}

/// f(W,H) = 1/2 * sum_ij ((WH)_ij - V_ij)^2.
inline double objective(const DenseMatrix& v, const DenseMatrix& w, const DenseMatrix& h) {
  check_factor_shapes(v, w, h, "objective");
  const std::size_t r = w.cols();
  double acc = 0.0;
  for (std::size_t i = 0; i < v.rows(); ++i) {
    for (std::size_t j = 0; j < v.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < r; ++k) s += w(i, k) * h(k, j);
      const double d = s - v(i, j);
      acc += d * d;
    }
  }
  return 0.5 * acc;
}

/// Residual WH - V.
inline DenseMatrix residual(const DenseMatrix& v, const DenseMatrix& w, const DenseMatrix& h) {
  check_factor_shapes(v, w, h, "residual");
  DenseMatrix d = matmul(w, h);
  for (std::size_t i = 0; i < d.rows(); ++i) {
    for (std::size_t j = 0; j < d.cols(); ++j) {
      d(i, j) -= v(i, j);
    }
  }
  return d;
}

/// Gradient of the objective with respect to W: (WH - V) * H^T, n x r.
inline DenseMatrix grad_w(const DenseMatrix& v, const DenseMatrix& w, const DenseMatrix& h) {
  check_factor_shapes(v, w, h, "grad_w");
  return matmul(residual(v, w, h), transpose(h));
}

/// Gradient of the objective with respect to H: W^T * (WH - V), r x m.
inline DenseMatrix grad_h(const DenseMatrix& v, const DenseMatrix& w, const DenseMatrix& h) {
  check_factor_shapes(v, w, h, "grad_h");
  return matmul(transpose(w), residual(v, w, h));
}

inline double frobenius_norm_squared(const DenseMatrix& a) {
  double acc = 0.0;
  for (double x : a.values()) acc += x * x;
  return acc;
}

}  // namespace nmf

#endif  // NMF_MATRIX_HPP
