#include <gtest/gtest.h>

#include <numbers>

#include "nhscatter/linalg.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace nhscatter;
using testutil::ComplexNear;
using testutil::MatrixNear;

TEST(Matrix, RejectsNonFiniteAndEmpty) {
  EXPECT_THROW(ComplexMatrix(0, 3), InvalidArgument);
  EXPECT_THROW(ComplexMatrix(1, 1, {cplx(std::nan(""), 0.0)}), InvalidArgument);
  EXPECT_THROW(ComplexMatrix(2, 2, {1.0, 2.0, 3.0}), InvalidArgument);
}

TEST(SolveLinear, IdentityReturnsRightHandSide) {
  Rng rng(7);
  const ComplexMatrix b = rng.matrix(3, 2);
  EXPECT_TRUE(MatrixNear(solve_linear(ComplexMatrix::identity(3), b), b, 0.0));
}

TEST(SolveLinear, DiagonalInverse) {
  const ComplexMatrix a{{2.0 * I_unit, 0.0}, {0.0, -I_unit}};
  const ComplexMatrix want{{-0.5 * I_unit, 0.0}, {0.0, I_unit}};
  EXPECT_TRUE(MatrixNear(solve_linear(a, ComplexMatrix::identity(2)), want, 1e-15));
}

TEST(SolveLinear, MatchesCofactorInverseAt4x4) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix a = testutil::well_conditioned(rng, 4);
    const ComplexMatrix b = rng.matrix(4, 3);
    const ComplexMatrix x = solve_linear(a, b);
    EXPECT_LE((a * x - b).frobenius_norm(), 1e-12 * b.frobenius_norm());
    const ComplexMatrix x_oracle = oracle::cofactor_inverse(a) * b;
    EXPECT_TRUE(MatrixNear(x, x_oracle, 1e-10 * std::max(1.0, x_oracle.frobenius_norm())));
  }
}

TEST(SolveLinear, ShapeAndSingularErrors) {
  EXPECT_THROW(solve_linear(ComplexMatrix(2, 3), ComplexMatrix(2, 1)), InvalidArgument);
  EXPECT_THROW(solve_linear(ComplexMatrix::identity(2), ComplexMatrix(3, 1)), InvalidArgument);
  const ComplexMatrix rank_one{{1.0, 2.0}, {2.0, 4.0}};
  EXPECT_THROW(solve_linear(rank_one, ComplexMatrix::identity(2)), SingularMatrix);
  EXPECT_THROW(invert(ComplexMatrix(3, 3)), SingularMatrix);
}

TEST(Invert, TrivialCases) {
  EXPECT_TRUE(MatrixNear(invert(ComplexMatrix::identity(2)), ComplexMatrix::identity(2), 0.0));
  const ComplexMatrix swap = pauli::sx();
  EXPECT_TRUE(MatrixNear(invert(swap), swap, 0.0));
}

TEST(Invert, DressedDimerMatchesAdjugate) {
  // [[-J e^{-ik}, i g], [i g, -J e^{-ik}]] at J = 1, g = 1/3, k = pi/2.
  const double k = std::numbers::pi / 2;
  const cplx a = -std::exp(-I_unit * k);
  const cplx b = I_unit / 3.0;
  const ComplexMatrix m{{a, b}, {b, a}};
  const ComplexMatrix want = oracle::adjugate_inverse_2x2(m);
  EXPECT_TRUE(MatrixNear(invert(m), want, 1e-15));
  // Frozen: a = i, b = i/3, a^2 - b^2 = -8/9, inverse = [[a, -b], [-b, a]] / (a^2 - b^2).
  EXPECT_TRUE(ComplexNear(want(0, 0), cplx(0.0, -9.0 / 8.0), 1e-15));
  EXPECT_TRUE(ComplexNear(want(0, 1), cplx(0.0, 3.0 / 8.0), 1e-15));
}

TEST(Invert, RandomResidualProperty) {
  Rng rng(3);
  for (std::size_t n = 1; n <= 8; ++n) {
    for (int trial = 0; trial < 10; ++trial) {
      const ComplexMatrix a = testutil::well_conditioned(rng, n);
      const ComplexMatrix inv = invert(a);
      EXPECT_LT((a * inv - ComplexMatrix::identity(n)).frobenius_norm(), 1e-12 * n);
      EXPECT_TRUE(MatrixNear(solve_linear(a, ComplexMatrix::identity(n)), inv, 1e-12));
    }
  }
}

TEST(Expm, ZeroAndDiagonal) {
  EXPECT_TRUE(MatrixNear(expm(ComplexMatrix(3, 3)), ComplexMatrix::identity(3), 0.0));
  const ComplexMatrix m{{-I_unit * (std::numbers::pi / 2)}};
  EXPECT_TRUE(ComplexNear(expm(m)(0, 0), -I_unit, 1e-14));
}

TEST(Expm, MatchesLongTaylorSeries) {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix m = rng.matrix(4, 4, 1.5);
    const ComplexMatrix want = oracle::taylor_expm(m);
    EXPECT_LE(distance(expm(m), want), 1e-10 * want.frobenius_norm());
  }
}

TEST(Expm, LargeNormStillAccurate) {
  // ||M|| about 10: relative error bound from the oracle.
  Rng rng(6);
  ComplexMatrix m = rng.matrix(4, 4);
  m *= 10.0 / m.norm1();
  const ComplexMatrix want = oracle::taylor_expm(m, 400);
  EXPECT_LE(distance(expm(m), want), 1e-10 * want.frobenius_norm());
}

TEST(Expm, InverseProperty) {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    ComplexMatrix m = rng.matrix(5, 5);
    m *= 5.0 / std::max(1.0, m.norm1());
    EXPECT_LT((expm(m) * expm(-m) - ComplexMatrix::identity(5)).frobenius_norm(), 1e-9);
  }
}

TEST(Expm, DimensionCap) {
  EXPECT_THROW(expm(ComplexMatrix(65, 65)), DimensionTooLarge);
  EXPECT_NO_THROW(expm(ComplexMatrix(64, 64)));
}

TEST(Eig2, Hc2AndIdentity) {
  const ComplexMatrix hc2{{2.0, -I_unit}, {-I_unit, -2.0}};
  const auto [a, b] = eig2(hc2);
  EXPECT_TRUE(ComplexNear(a, -std::sqrt(3.0), 1e-14));
  EXPECT_TRUE(ComplexNear(b, std::sqrt(3.0), 1e-14));

  const auto [c, d] = eig2(ComplexMatrix::identity(2));
  EXPECT_EQ(c, cplx(1.0));
  EXPECT_EQ(d, cplx(1.0));
}

TEST(Eig2, Hc1AtZeroDetuning) {
  // lambda^2 + 2i lambda = 0 -> {-2i, 0}.
  const ComplexMatrix hc1{{-I_unit, -I_unit}, {-I_unit, -I_unit}};
  const auto [a, b] = eig2(hc1);
  EXPECT_TRUE(ComplexNear(a, -2.0 * I_unit, 1e-15));
  EXPECT_TRUE(ComplexNear(b, 0.0, 1e-15));
}

TEST(Eig2, VietaProperty) {
  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const ComplexMatrix a = rng.matrix(2, 2, 3.0);
    const auto [l1, l2] = eig2(a);
    const cplx tr = a(0, 0) + a(1, 1);
    const cplx det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    EXPECT_LT(std::abs(l1 + l2 - tr), 1e-12);
    EXPECT_LT(std::abs(l1 * l2 - det), 1e-12);
    EXPECT_TRUE(l1.real() < l2.real() || (l1.real() == l2.real() && l1.imag() <= l2.imag()));
  }
}

TEST(NullSpace, RankDeficientReal) {
  RealMatrix a(2, 3);
  a(0, 0) = 1; a(0, 1) = 2; a(0, 2) = 3;
  a(1, 0) = 2; a(1, 1) = 4; a(1, 2) = 6;
  const auto basis = null_space(a, 1e-12);
  ASSERT_EQ(basis.size(), 2u);
  for (const auto& x : basis) EXPECT_NEAR(x[0] + 2 * x[1] + 3 * x[2], 0.0, 1e-14);
}

TEST(SolveRealAffine, DetectsInconsistency) {
  RealMatrix a(2, 1);
  a(0, 0) = 1.0;
  a(1, 0) = 1.0;
  const std::vector<double> ok{2.0, 2.0};
  const std::vector<double> bad{1.0, 2.0};
  ASSERT_TRUE(solve_real_affine(a, ok, 1e-12).has_value());
  EXPECT_NEAR((*solve_real_affine(a, ok, 1e-12))[0], 2.0, 1e-15);
  EXPECT_FALSE(solve_real_affine(a, bad, 1e-12).has_value());
}
