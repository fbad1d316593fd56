#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "nhscatter/error.hpp"

namespace nhscatter {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

inline constexpr cplx I_unit{0.0, 1.0};

/// Dense row-major complex matrix. Every H_c, S, q, G and D in the library is
/// one of these; sizes are tiny so storage is a flat std::vector.
class ComplexMatrix {
public:
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {
    if (rows == 0 || cols == 0) {
      throw InvalidArgument("ComplexMatrix: dimensions must be positive");
    }
  }

  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
      : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (rows == 0 || cols == 0) {
      throw InvalidArgument("ComplexMatrix: dimensions must be positive");
    }
    if (data_.size() != rows * cols) {
      throw InvalidArgument("ComplexMatrix: entry count does not match shape");
    }
    for (const auto& z : data_) {
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw InvalidArgument("ComplexMatrix: non-finite entry");
      }
    }
  }

  /// Row-wise brace construction, e.g. {{1, 2}, {3, 4}}.
  ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows)
      : ComplexMatrix(rows.size(), rows.size() ? rows.begin()->size() : 0,
                      flatten(rows)) {}

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static ComplexMatrix diagonal(std::span<const cplx> d) {
    ComplexMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const cplx> data() const noexcept { return data_; }
  std::span<cplx> data() noexcept { return data_; }

  ComplexMatrix transpose() const {
    ComplexMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  ComplexMatrix conj() const {
    ComplexMatrix t(*this);
    for (auto& z : t.data_) z = std::conj(z);
    return t;
  }

  /// Conjugate transpose.
  ComplexMatrix adjoint() const { return transpose().conj(); }

  double frobenius_norm() const {
    double s = 0.0;
    for (const auto& z : data_) s += std::norm(z);
    return std::sqrt(s);
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& z : data_) m = std::max(m, std::abs(z));
    return m;
  }

  /// Induced 1-norm (max column sum).
  double norm1() const {
    double best = 0.0;
    for (std::size_t c = 0; c < cols_; ++c) {
      double s = 0.0;
      for (std::size_t r = 0; r < rows_; ++r) s += std::abs((*this)(r, c));
      best = std::max(best, s);
    }
    return best;
  }

  ComplexMatrix& operator+=(const ComplexMatrix& o) {
    require_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  ComplexMatrix& operator-=(const ComplexMatrix& o) {
    require_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  ComplexMatrix& operator*=(cplx s) {
    for (auto& z : data_) z *= s;
    return *this;
  }

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator-(ComplexMatrix a) { return a *= -1.0; }
  friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }
  friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }

  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols_ != b.rows_) throw InvalidArgument("matrix product: inner dimensions differ");
    ComplexMatrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const cplx aik = a(i, k);
        if (aik == cplx{}) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend CVector operator*(const ComplexMatrix& a, std::span<const cplx> x) {
    if (a.cols_ != x.size()) throw InvalidArgument("matrix-vector product: size mismatch");
    CVector y(a.rows_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      cplx s{};
      for (std::size_t j = 0; j < a.cols_; ++j) s += a(i, j) * x[j];
      y[i] = s;
    }
    return y;
  }

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

private:
  static std::vector<cplx> flatten(std::initializer_list<std::initializer_list<cplx>> rows) {
    std::vector<cplx> out;
    const std::size_t width = rows.size() ? rows.begin()->size() : 0;
    for (const auto& row : rows) {
      if (row.size() != width) throw InvalidArgument("ComplexMatrix: ragged initializer");
      out.insert(out.end(), row.begin(), row.end());
    }
    return out;
  }

  void require_same_shape(const ComplexMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) {
      throw InvalidArgument("ComplexMatrix: shape mismatch");
    }
  }

  std::size_t rows_;
  std::size_t cols_;
  std::vector<cplx> data_;
};

inline ComplexMatrix dagger(const ComplexMatrix& h) {
  if (!h.is_square()) throw InvalidArgument("dagger: matrix must be square");
  return h.adjoint();
}

inline double distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a - b).frobenius_norm();
}

/// Pauli matrices and the 2x2 identity.
namespace pauli {
inline ComplexMatrix s0() { return ComplexMatrix::identity(2); }
inline ComplexMatrix sx() { return {{0.0, 1.0}, {1.0, 0.0}}; }
inline ComplexMatrix sy() { return {{0.0, -I_unit}, {I_unit, 0.0}}; }
inline ComplexMatrix sz() { return {{1.0, 0.0}, {0.0, -1.0}}; }
} // namespace pauli

} // namespace nhscatter
