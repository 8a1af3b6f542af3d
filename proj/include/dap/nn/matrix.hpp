#pragma once

// Dense row-major matrix and the handful of kernels the layer set needs.
// Plain loops ordered for contiguous access; no BLAS dependency. All
// arithmetic is 64-bit.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "dap/common.hpp"

namespace dap::nn {

class Matrix2D {
public:
  Matrix2D() = default;
  Matrix2D(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return values_.size(); }

  double& at(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double at(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
  double* row(std::size_t r) { return values_.data() + r * cols_; }
  const double* row(std::size_t r) const { return values_.data() + r * cols_; }
  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }

  void fill(double v) { values_.assign(values_.size(), v); }

  bool all_finite() const {
    for (double v : values_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  friend bool operator==(const Matrix2D&, const Matrix2D&) = default;

private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> values_;
};

inline void check_shape(bool ok, const std::string& what) {
  if (!ok) fail(Errc::shape_error, "shape mismatch: " + what);
}

// C = A * B
inline Matrix2D matmul(const Matrix2D& a, const Matrix2D& b) {
  check_shape(a.cols() == b.rows(), "matmul " + std::to_string(a.cols()) + " vs " +
                                        std::to_string(b.rows()));
  Matrix2D c(a.rows(), b.cols());
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  for (std::size_t i = 0; i < n; ++i) {
    double* ci = c.row(i);
    const double* ai = a.row(i);
    for (std::size_t p = 0; p < k; ++p) {
      const double av = ai[p];
      const double* bp = b.row(p);
      for (std::size_t j = 0; j < m; ++j) ci[j] += av * bp[j];
    }
  }
  return c;
}

// C += A^T * B  (outer-product accumulation; used for weight gradients)
inline void matmul_tn_add(Matrix2D& c, const Matrix2D& a, const Matrix2D& b) {
  check_shape(a.rows() == b.rows() && c.rows() == a.cols() && c.cols() == b.cols(),
              "matmul_tn_add");
  const std::size_t n = a.rows(), in = a.cols(), out = b.cols();
  for (std::size_t r = 0; r < n; ++r) {
    const double* ar = a.row(r);
    const double* br = b.row(r);
    for (std::size_t i = 0; i < in; ++i) {
      const double av = ar[i];
      double* ci = c.row(i);
      for (std::size_t j = 0; j < out; ++j) ci[j] += av * br[j];
    }
  }
}

// C = A * B^T  (used for input gradients: dX = dY * W^T). B is transposed
// into a scratch buffer so the inner loop runs the vectorizable i-k-j form
// instead of a scalar dot-product reduction.
inline Matrix2D matmul_nt(const Matrix2D& a, const Matrix2D& b) {
  check_shape(a.cols() == b.cols(), "matmul_nt");
  Matrix2D bt(b.cols(), b.rows());
  for (std::size_t i = 0; i < b.rows(); ++i) {
    const double* bi = b.row(i);
    for (std::size_t j = 0; j < b.cols(); ++j) bt.at(j, i) = bi[j];
  }
  Matrix2D c(a.rows(), b.rows());
  const std::size_t n = a.rows(), k = a.cols(), m = b.rows();
  for (std::size_t i = 0; i < n; ++i) {
    double* ci = c.row(i);
    const double* ai = a.row(i);
    for (std::size_t p = 0; p < k; ++p) {
      const double av = ai[p];
      const double* btp = bt.row(p);
      for (std::size_t j = 0; j < m; ++j) ci[j] += av * btp[j];
    }
  }
  return c;
}

// row-broadcast add: every row of x gets b (b is 1 x cols)
inline void add_row_vector(Matrix2D& x, const Matrix2D& b) {
  check_shape(b.rows() == 1 && b.cols() == x.cols(), "add_row_vector");
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double* xi = x.row(i);
    const double* bv = b.row(0);
    for (std::size_t j = 0; j < x.cols(); ++j) xi[j] += bv[j];
  }
}

// b += column sums of x (bias gradient)
inline void add_col_sums(Matrix2D& b, const Matrix2D& x) {
  check_shape(b.rows() == 1 && b.cols() == x.cols(), "add_col_sums");
  double* bv = b.row(0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double* xi = x.row(i);
    for (std::size_t j = 0; j < x.cols(); ++j) bv[j] += xi[j];
  }
}

// Column slice [c0, c1) of a.
inline Matrix2D columns(const Matrix2D& a, std::size_t c0, std::size_t c1) {
  check_shape(c0 <= c1 && c1 <= a.cols(), "columns");
  Matrix2D out(a.rows(), c1 - c0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* ai = a.row(i) + c0;
    double* oi = out.row(i);
    for (std::size_t j = 0; j < c1 - c0; ++j) oi[j] = ai[j];
  }
  return out;
}

inline void set_columns(Matrix2D& a, std::size_t c0, const Matrix2D& part) {
  check_shape(part.rows() == a.rows() && c0 + part.cols() <= a.cols(), "set_columns");
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* pi = part.row(i);
    double* ai = a.row(i) + c0;
    for (std::size_t j = 0; j < part.cols(); ++j) ai[j] = pi[j];
  }
}

}  // namespace dap::nn
