#include <gtest/gtest.h>

#include "nhscatter/cmt.hpp"
#include "test_util.hpp"

using namespace nhscatter;
using testutil::ComplexNear;
using testutil::MatrixNear;

TEST(CmtSmatrix, DecoupledResonatorIsTransparent) {
  Rng rng(71);
  const ComplexMatrix h = rng.matrix(3, 3);
  const CmtCoupling c{ComplexMatrix(3, 2), 0.4};
  EXPECT_TRUE(MatrixNear(cmt_smatrix(h, c), ComplexMatrix::identity(2), 0.0));
}

TEST(CmtSmatrix, SingleModeOnResonance) {
  // S(w0) = 1 - 2i kappa / (i kappa) = -1
  const double w0 = 0.7, kappa = 0.3;
  const CmtCoupling c{ComplexMatrix{{std::sqrt(kappa)}}, w0};
  EXPECT_TRUE(ComplexNear(cmt_smatrix(ComplexMatrix{{w0}}, c)(0, 0), -1.0, 1e-15));
}

TEST(CmtSmatrix, SingleModeLorentzian) {
  const double w0 = 0.2, kappa = 0.5;
  for (double w : {-1.0, 0.0, 0.6, 2.0}) {
    const CmtCoupling c{ComplexMatrix{{std::sqrt(kappa)}}, w};
    const cplx want = 1.0 - 2.0 * I_unit * kappa / (w - w0 + I_unit * kappa);
    EXPECT_TRUE(ComplexNear(cmt_smatrix(ComplexMatrix{{w0}}, c)(0, 0), want, 1e-15));
  }
}

TEST(CmtSmatrix, HermitianIsUnitary) {
  Rng rng(72);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = rng.integer(1, 5);
    const std::size_t p = rng.integer(1, 3);
    const CmtCoupling c{rng.matrix(n, p), rng.uniform(-2.0, 2.0)};
    const ComplexMatrix s = cmt_smatrix(rng.hermitian(n), c);
    EXPECT_LT((s.adjoint() * s - ComplexMatrix::identity(p)).frobenius_norm(), 1e-10);
  }
}

TEST(CmtSmatrix, ShapeErrors) {
  EXPECT_THROW(cmt_smatrix(ComplexMatrix(2, 2), {ComplexMatrix(3, 2), 0.0}), InvalidArgument);
}

TEST(AlignedCoupling, Layout) {
  const ComplexMatrix d = aligned_coupling(4, 3, 1, 4.0, 9.0);
  EXPECT_EQ(d.rows(), 4u);
  EXPECT_EQ(d.cols(), 2u);
  EXPECT_EQ(d(3, 0), cplx(2.0));
  EXPECT_EQ(d(1, 1), cplx(3.0));
  EXPECT_EQ(d.frobenius_norm(), std::sqrt(13.0));
  EXPECT_THROW(aligned_coupling(2, 0, 0, 1.0, 1.0), InvalidArgument);
  EXPECT_THROW(aligned_coupling(2, 0, 1, 0.0, 1.0), InvalidArgument);
}

TEST(CmtRelations, Hc2WithSigmaZ) {
  const ComplexMatrix h = make_prototype(Prototype::Hc2, 0.0, 1.0 / 3.0);
  for (double w : {-1.0, -0.2, 0.0, 0.35, 1.4}) {
    const CmtCoupling c{aligned_coupling(2, 0, 1, 0.5, 0.8), w};
    const auto r = verify_cmt_relations(h, c, pauli::sz(), 0, 1);
    EXPECT_LT(r.relation, 1e-12) << "omega=" << w;
    EXPECT_LT(r.law, 1e-12) << "omega=" << w;
    // Transmissions flip sign, reflections do not.
    const ComplexMatrix s = cmt_smatrix(h, c);
    const ComplexMatrix sb = cmt_smatrix(dagger(h), c);
    EXPECT_TRUE(ComplexNear(sb(0, 0), s(0, 0), 1e-12));
    EXPECT_TRUE(ComplexNear(sb(1, 0), -s(1, 0), 1e-12));
  }
}

TEST(CmtRelations, Hc2EnergyDifferenceFlux) {
  const ComplexMatrix h = make_prototype(Prototype::Hc2, 0.0, 1.0 / 3.0);
  const CmtCoupling c{aligned_coupling(2, 0, 1, 1.0, 1.0), 0.3};
  const ComplexMatrix s = cmt_smatrix(h, c);
  EXPECT_NEAR(std::norm(s(0, 0)) - std::norm(s(1, 0)), 1.0, 1e-12);
}

TEST(CmtRelations, HermitianWithIdentityMetric) {
  Rng rng(73);
  const ComplexMatrix h = rng.hermitian(3);
  const CmtCoupling c{aligned_coupling(3, 0, 2, 0.7, 0.4), 0.1};
  const auto r = verify_cmt_relations(h, c, ComplexMatrix::identity(3), 0, 2);
  EXPECT_LT(r.relation, 1e-12);
  EXPECT_LT(r.law, 1e-12);
  EXPECT_TRUE(MatrixNear(cmt_smatrix(h, c), cmt_smatrix(dagger(h), c), 1e-14));
}

TEST(CmtRelations, RandomCenterKeepsLawOnly) {
  Rng rng(74);
  double worst_law = 0.0, smallest_relation = 1e300;
  for (int trial = 0; trial < 30; ++trial) {
    const ComplexMatrix h = rng.matrix(2, 2);
    const CmtCoupling c{aligned_coupling(2, 0, 1, 1.0, 1.0), rng.uniform(-1.0, 1.0)};
    const auto r = verify_cmt_relations(h, c, pauli::sz(), 0, 1);
    worst_law = std::max(worst_law, r.law);
    smallest_relation = std::min(smallest_relation, r.relation);
  }
  EXPECT_LT(worst_law, 1e-10);
  EXPECT_GT(smallest_relation, 1e-3);
}

TEST(CmtLaw, RandomPairs) {
  Rng rng(75);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = rng.integer(1, 6);
    const std::size_t p = rng.integer(1, 3);
    const CmtCoupling c{rng.matrix(n, p), rng.uniform(-2.0, 2.0)};
    EXPECT_LT(cmt_law_residual(rng.matrix(n, n), c), 1e-10);
  }
}

TEST(CmtRelations, PremisesAreChecked) {
  const ComplexMatrix h = make_prototype(Prototype::Hc2, 0.0, 0.3);
  // Channel 0 also touches mode 1: q D != D diag(q_mm, q_nn).
  ComplexMatrix d = aligned_coupling(2, 0, 1, 1.0, 1.0);
  d(1, 0) = 0.5;
  EXPECT_THROW(verify_cmt_relations(h, {d, 0.0}, pauli::sz(), 0, 1), PremiseViolated);
  EXPECT_THROW(verify_cmt_relations(h, {aligned_coupling(2, 0, 1, 1.0, 1.0), 0.0}, pauli::sy(), 0,
                                    1),
               ConditionFailed);
  EXPECT_THROW(verify_cmt_relations(h, {ComplexMatrix(2, 3), 0.0}, pauli::sz(), 0, 1),
               NotTwoPort);
}

TEST(CmtRelations, LargerCenterWithFreeBlock) {
  // q = diag(1, -1, -1) with ports on modes 0 and 2; H = K q with K Hermitian.
  Rng rng(76);
  const ComplexMatrix q = ComplexMatrix::diagonal(std::vector<cplx>{1.0, -1.0, -1.0});
  const ComplexMatrix h = rng.hermitian(3) * q;
  const CmtCoupling c{aligned_coupling(3, 0, 2, 0.6, 1.1), 0.25};
  const auto r = verify_cmt_relations(h, c, q, 0, 2);
  EXPECT_LT(r.relation, 1e-12);
  EXPECT_LT(r.law, 1e-12);
}

TEST(CmtRelations, FluxClassFollowsSignature) {
  // H = K q, q = diag(1, +-1, ...): CMT S must show the flux law picked by q_nn.
  Rng rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = rng.integer(2, 4);
    std::vector<cplx> signs(n, 1.0);
    for (std::size_t i = 1; i < n; ++i) signs[i] = rng.uniform() < 0.5 ? -1.0 : 1.0;
    const ComplexMatrix q = ComplexMatrix::diagonal(signs);
    const ComplexMatrix h = rng.hermitian(n) * q;
    const CmtCoupling c{aligned_coupling(n, 0, n - 1, rng.uniform(0.2, 1.5), rng.uniform(0.2, 1.5)),
                        rng.uniform(-1.0, 1.0)};
    const ComplexMatrix s = cmt_smatrix(h, c);
    const double sign = signs[n - 1].real();
    for (std::size_t in = 0; in < 2; ++in) {
      EXPECT_NEAR(std::norm(s(in, in)) + sign * std::norm(s(1 - in, in)), 1.0, 1e-10);
    }
    EXPECT_LT(verify_cmt_relations(h, c, q, 0, n - 1).relation, 1e-10);
  }
}
