#pragma once

// Small dense linear algebra: row-major matrices, product, LU with partial
// pivoting, determinant and linear solve.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ringnc/errors.hpp"

namespace ringnc::linalg {

class DenseMatrix {
 public:
  DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {
    if (rows == 0 || cols == 0) throw DimensionMismatch("matrix dimensions must be >= 1");
  }

  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (rows == 0 || cols == 0) throw DimensionMismatch("matrix dimensions must be >= 1");
    if (data_.size() != rows * cols) throw DimensionMismatch("entry count does not match dimensions");
    for (double v : data_)
      if (!std::isfinite(v)) throw Error("matrix entries must be finite");
  }

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> data() const { return data_; }

  // Largest absolute row sum.
  double norm_inf() const {
    double best = 0.0;
    for (std::size_t r = 0; r < rows_; ++r) {
      double s = 0.0;
      for (double v : row(r)) s += std::abs(v);
      best = std::max(best, s);
    }
    return best;
  }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

inline DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows())
    throw DimensionMismatch("matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " times " +
                            std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  DenseMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

inline std::vector<double> matvec(const DenseMatrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw DimensionMismatch("matvec: vector length does not match columns");
  std::vector<double> out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    out[i] = s;
  }
  return out;
}

// A relative pivot below this fraction of ||A||_inf marks the matrix singular.
inline constexpr double kSingularPivotTolerance = 1e-12;

// PA = LU with partial pivoting, L unit lower triangular, both packed in lu.
class LuDecomposition {
 public:
  explicit LuDecomposition(const DenseMatrix& a) : lu_(a), perm_(a.rows()) {
    if (a.rows() != a.cols()) throw DimensionMismatch("LU requires a square matrix");
    const std::size_t n = a.rows();
    scale_ = a.norm_inf();
    for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t p = k;
      double best = std::abs(lu_(k, k));
      for (std::size_t i = k + 1; i < n; ++i)
        if (std::abs(lu_(i, k)) > best) {
          best = std::abs(lu_(i, k));
          p = i;
        }
      if (p != k) {
        for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
        std::swap(perm_[k], perm_[p]);
        sign_ = -sign_;
      }
      const double pivot = lu_(k, k);
      min_pivot_ = std::min(min_pivot_, std::abs(pivot));
      if (pivot == 0.0) continue;
      for (std::size_t i = k + 1; i < n; ++i) {
        const double m = lu_(i, k) / pivot;
        lu_(i, k) = m;
        if (m == 0.0) continue;
        for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= m * lu_(k, j);
      }
    }
  }

  double determinant() const {
    double det = sign_;
    for (std::size_t i = 0; i < lu_.rows(); ++i) det *= lu_(i, i);
    return det;
  }

  bool singular() const { return !(min_pivot_ > kSingularPivotTolerance * scale_); }

  // Smallest pivot relative to ||A||_inf.
  double pivot_margin() const { return scale_ > 0.0 ? min_pivot_ / scale_ : 0.0; }

  std::vector<double> solve(std::span<const double> rhs) const {
    const std::size_t n = lu_.rows();
    if (rhs.size() != n) throw DimensionMismatch("solve: right-hand side length does not match matrix");
    if (singular()) throw SingularMatrix("matrix is singular (relative pivot " + std::to_string(pivot_margin()) + ")");
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = rhs[perm_[i]];
      for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
      x[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
      double s = x[i];
      for (std::size_t j = i + 1; j < n; ++j) s -= lu_(i, j) * x[j];
      x[i] = s / lu_(i, i);
    }
    return x;
  }

 private:
  DenseMatrix lu_;
  std::vector<std::size_t> perm_;
  double sign_ = 1.0;
  double scale_ = 0.0;
  double min_pivot_ = std::numeric_limits<double>::infinity();
};

inline double determinant(const DenseMatrix& a) { return LuDecomposition(a).determinant(); }

// Gaussian elimination with partial pivoting; throws SingularMatrix.
inline std::vector<double> solve(const DenseMatrix& a, std::span<const double> rhs) {
  auto x = LuDecomposition(a).solve(rhs);
#ifndef NDEBUG
  const auto back = matvec(a, x);
  double res = 0.0;
  double ref = 0.0;
  for (std::size_t i = 0; i < back.size(); ++i) {
    res = std::max(res, std::abs(back[i] - rhs[i]));
    ref = std::max(ref, std::abs(rhs[i]));
  }
  if (res > 1e-9 * std::max(ref, 1.0) * std::max(1.0, a.norm_inf()))
    throw SingularMatrix("solve: residual " + std::to_string(res) + " exceeds tolerance");
#endif
  return x;
}

}  // namespace ringnc::linalg
