#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "nhscatter/error.hpp"
#include "nhscatter/matrix.hpp"

namespace nhscatter {

/// Pivots smaller than this fraction of the largest |A_ij| are treated as zero.
inline constexpr double kPivotRelTol = 1e-12;

/// Largest dimension accepted by the dense exponential.
inline constexpr std::size_t kExpmMaxDim = 64;

/// LU factorization with partial (row) pivoting, PA = LU, stored in place.
class LuFactorization {
public:
  explicit LuFactorization(ComplexMatrix a) : lu_(std::move(a)), perm_(lu_.rows()) {
    if (!lu_.is_square()) throw InvalidArgument("LU: matrix must be square");
    const std::size_t n = lu_.rows();
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    const double threshold = kPivotRelTol * lu_.max_abs();

    for (std::size_t k = 0; k < n; ++k) {
      std::size_t p = k;
      double best = std::abs(lu_(k, k));
      for (std::size_t r = k + 1; r < n; ++r) {
        const double v = std::abs(lu_(r, k));
        if (v > best) {
          best = v;
          p = r;
        }
      }
      if (best <= threshold || best == 0.0) {
        throw SingularMatrix("LU: pivot below threshold in column " + std::to_string(k));
      }
      if (p != k) {
        for (std::size_t c = 0; c < n; ++c) std::swap(lu_(k, c), lu_(p, c));
        std::swap(perm_[k], perm_[p]);
        sign_ = -sign_;
      }
      const cplx pivot = lu_(k, k);
      for (std::size_t r = k + 1; r < n; ++r) {
        const cplx f = lu_(r, k) / pivot;
        lu_(r, k) = f;
        if (f == cplx{}) continue;
        for (std::size_t c = k + 1; c < n; ++c) lu_(r, c) -= f * lu_(k, c);
      }
    }
  }

  std::size_t size() const noexcept { return lu_.rows(); }

  ComplexMatrix solve(const ComplexMatrix& b) const {
    const std::size_t n = size();
    if (b.rows() != n) throw InvalidArgument("LU solve: right-hand side has wrong row count");
    const std::size_t m = b.cols();
    ComplexMatrix x(n, m);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < m; ++c) x(r, c) = b(perm_[r], c);

    for (std::size_t c = 0; c < m; ++c) {
      for (std::size_t r = 1; r < n; ++r) {
        cplx s = x(r, c);
        for (std::size_t k = 0; k < r; ++k) s -= lu_(r, k) * x(k, c);
        x(r, c) = s;
      }
      for (std::size_t r = n; r-- > 0;) {
        cplx s = x(r, c);
        for (std::size_t k = r + 1; k < n; ++k) s -= lu_(r, k) * x(k, c);
        x(r, c) = s / lu_(r, r);
      }
    }
    return x;
  }

  cplx determinant() const {
    cplx d = static_cast<double>(sign_);
    for (std::size_t i = 0; i < size(); ++i) d *= lu_(i, i);
    return d;
  }

private:
  ComplexMatrix lu_;
  std::vector<std::size_t> perm_;
  int sign_ = 1;
};

inline ComplexMatrix solve_linear(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (!a.is_square()) throw InvalidArgument("solve_linear: A must be square");
  if (b.rows() != a.rows()) throw InvalidArgument("solve_linear: B row count must match A");
  return LuFactorization(a).solve(b);
}

inline ComplexMatrix invert(const ComplexMatrix& a) {
  if (!a.is_square()) throw InvalidArgument("invert: matrix must be square");
  return LuFactorization(a).solve(ComplexMatrix::identity(a.rows()));
}

/// Determinant; zero for matrices the LU rejects as singular.
inline cplx determinant(const ComplexMatrix& a) {
  if (!a.is_square()) throw InvalidArgument("determinant: matrix must be square");
  try {
    return LuFactorization(a).determinant();
  } catch (const SingularMatrix&) {
    return cplx{};
  }
}

/// Matrix exponential by scaling and squaring: scale by 2^s so the 1-norm is
/// at most 1/2, sum 18 Taylor terms, square s times.
inline ComplexMatrix expm(const ComplexMatrix& m) {
  if (!m.is_square()) throw InvalidArgument("expm: matrix must be square");
  const std::size_t n = m.rows();
  if (n > kExpmMaxDim) {
    throw DimensionTooLarge("expm: dimension " + std::to_string(n) + " exceeds oracle cap of " +
                            std::to_string(kExpmMaxDim));
  }
  const double norm = m.norm1();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const ComplexMatrix a = m * cplx(std::ldexp(1.0, -squarings));

  constexpr int kTerms = 18;
  ComplexMatrix result = ComplexMatrix::identity(n);
  ComplexMatrix term = ComplexMatrix::identity(n);
  for (int j = 1; j <= kTerms; ++j) {
    term = (term * a) * cplx(1.0 / j);
    result += term;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

/// Both roots of the characteristic polynomial of a 2x2 matrix, ordered by
/// real part then imaginary part.
inline std::pair<cplx, cplx> eig2(const ComplexMatrix& a) {
  if (a.rows() != 2 || a.cols() != 2) throw InvalidArgument("eig2: matrix must be 2x2");
  const cplx tr = a(0, 0) + a(1, 1);
  const cplx det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  const cplx disc = std::sqrt(tr * tr - 4.0 * det);
  // Avoid cancellation: compute the larger-magnitude root first.
  const cplx big = (std::abs(tr + disc) >= std::abs(tr - disc)) ? (tr + disc) / 2.0
                                                                 : (tr - disc) / 2.0;
  cplx l1 = big;
  cplx l2 = (big == cplx{}) ? cplx{} : det / big;
  auto less = [](cplx x, cplx y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  };
  if (less(l2, l1)) std::swap(l1, l2);
  return {l1, l2};
}

/// Dense real matrix, row-major; only used by the real-linear null-space solver.
struct RealMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> v;

  RealMatrix() = default;
  RealMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), v(r * c, 0.0) {}
  double& operator()(std::size_t r, std::size_t c) { return v[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return v[r * cols + c]; }
};

/// Reduced row echelon form with partial pivoting. Entries below
/// rel_tol * max|A| are treated as zero. Returns the pivot column of each
/// nonzero row.
inline std::vector<std::size_t> rref(RealMatrix& a, double rel_tol) {
  double scale = 0.0;
  for (double x : a.v) scale = std::max(scale, std::abs(x));
  const double tol = rel_tol * scale;
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < a.cols && row < a.rows; ++col) {
    std::size_t p = row;
    double best = std::abs(a(row, col));
    for (std::size_t r = row + 1; r < a.rows; ++r) {
      if (std::abs(a(r, col)) > best) {
        best = std::abs(a(r, col));
        p = r;
      }
    }
    if (best <= tol || best == 0.0) {
      for (std::size_t r = row; r < a.rows; ++r) a(r, col) = 0.0;
      continue;
    }
    if (p != row)
      for (std::size_t c = 0; c < a.cols; ++c) std::swap(a(row, c), a(p, c));
    const double piv = a(row, col);
    for (std::size_t c = col; c < a.cols; ++c) a(row, c) /= piv;
    for (std::size_t r = 0; r < a.rows; ++r) {
      if (r == row) continue;
      const double f = a(r, col);
      if (f == 0.0) continue;
      for (std::size_t c = col; c < a.cols; ++c) a(r, c) -= f * a(row, c);
      a(r, col) = 0.0;
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

/// Basis of the null space of A, one vector per free column.
inline std::vector<std::vector<double>> null_space(RealMatrix a, double rel_tol) {
  const auto pivots = rref(a, rel_tol);
  std::vector<bool> is_pivot(a.cols, false);
  for (auto c : pivots) is_pivot[c] = true;
  std::vector<std::vector<double>> basis;
  for (std::size_t free = 0; free < a.cols; ++free) {
    if (is_pivot[free]) continue;
    std::vector<double> x(a.cols, 0.0);
    x[free] = 1.0;
    for (std::size_t i = 0; i < pivots.size(); ++i) x[pivots[i]] = -a(i, free);
    basis.push_back(std::move(x));
  }
  return basis;
}

} // namespace nhscatter

namespace nhscatter {

/// One solution of A x = b (free variables set to zero), or nullopt when the
/// system is inconsistent at the given relative threshold.
inline std::optional<std::vector<double>> solve_real_affine(const RealMatrix& a,
                                                            std::span<const double> b,
                                                            double rel_tol) {
  if (b.size() != a.rows) throw InvalidArgument("solve_real_affine: size mismatch");
  RealMatrix aug(a.rows, a.cols + 1);
  for (std::size_t r = 0; r < a.rows; ++r) {
    for (std::size_t c = 0; c < a.cols; ++c) aug(r, c) = a(r, c);
    aug(r, a.cols) = b[r];
  }
  const auto pivots = rref(aug, rel_tol);
  std::vector<double> x(a.cols, 0.0);
  for (std::size_t i = 0; i < pivots.size(); ++i) {
    if (pivots[i] == a.cols) return std::nullopt;
    x[pivots[i]] = aug(i, a.cols);
  }
  return x;
}

} // namespace nhscatter
