#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <random>
#include <vector>

#include "nhscatter/matrix.hpp"

namespace nhscatter {

/// Seeded generator whose draws are identical across standard libraries
/// (std::uniform_*_distribution is implementation-defined, so it is avoided).
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi].
  std::size_t integer(std::size_t lo, std::size_t hi) {
    const std::uint64_t span = hi - lo + 1;
    return lo + static_cast<std::size_t>(engine_() % span);
  }

  /// Uniform in the disc |z| <= radius.
  cplx disc(double radius = 1.0) {
    const double r = radius * std::sqrt(uniform());
    const double theta = 2.0 * std::numbers::pi * uniform();
    return std::polar(r, theta);
  }

  ComplexMatrix matrix(std::size_t rows, std::size_t cols, double radius = 1.0) {
    ComplexMatrix m(rows, cols);
    for (auto& z : m.data()) z = disc(radius);
    return m;
  }

  ComplexMatrix hermitian(std::size_t n, double radius = 1.0) {
    const ComplexMatrix a = matrix(n, n, radius);
    return (a + a.adjoint()) * cplx(0.5);
  }

  /// `count` distinct indices from 0..n-1 (partial Fisher-Yates).
  std::vector<std::size_t> distinct(std::size_t n, std::size_t count) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < count; ++i) std::swap(idx[i], idx[integer(i, n - 1)]);
    idx.resize(count);
    return idx;
  }

private:
  std::mt19937_64 engine_;
};

} // namespace nhscatter
