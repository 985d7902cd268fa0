#include <gtest/gtest.h>

#include "gks/random.hpp"
#include "gks/structures.hpp"
#include "oracles.hpp"

using namespace gks;

namespace {

RMat std_omega(int m) {
  RMat w = RMat::Zero(m, m);
  for (int i = 0; i + 1 < m; i += 2) {
    w(i, i + 1) = 1.0;
    w(i + 1, i) = -1.0;
  }
  return w;
}

/// Independent quarter turn exp(pi/2 d_rho(J)) by plain Taylor summation.
CMat quarter_turn_oracle(const GeneralizedComplexStructure& j) { return oracle::taylor_exp(0.5 * kPi * j.spin(), 120); }

bool parallel(const CVec& a, const CVec& b, double tol = 1e-12) {
  const cplx s = (b.adjoint() * a)(0, 0) / b.squaredNorm();
  return (a - s * b).norm() < tol * a.norm();
}

}  // namespace

TEST(GeneralizedMetric, IdentityExample) {
  const auto g = GeneralizedMetric::from_g_b(RMat::Identity(2, 2), RMat::Zero(2, 2));
  const RMat p = pairing_matrix(2);
  for (int i = 0; i < 2; ++i) {
    RVec v = RVec::Zero(4);
    v(i) = 1.0;
    v(2 + i) = 1.0;
    EXPECT_LT((g.matrix() * v - v).norm(), 1e-14);  // d_i + dx_i in V+
  }
  EXPECT_LT(g.axiom_residual(), 1e-14);
  EXPECT_GT(g.positivity_margin(), 0.0);
  EXPECT_GT(RVec::Unit(4, 0).dot(p * g.matrix() * RVec::Unit(4, 0)), 0.0);
}

TEST(GeneralizedMetric, RandomAxiomsAndGraphs) {
  RandomSource rs(21);
  for (int m : {2, 3, 4, 6}) {
    const RMat g0 = rs.spd(m);
    const RMat b0 = rs.skew(m);
    const auto g = GeneralizedMetric::from_g_b(g0, b0);
    EXPECT_LT(g.axiom_residual(), 1e-10);
    EXPECT_GT(g.positivity_margin(), 0.0);
    RMat plus(2 * m, m);
    plus << RMat::Identity(m, m), b0 + g0;
    EXPECT_LT(max_abs(RMat(g.matrix() * plus - plus)), 1e-10);
    const auto back = GeneralizedMetric::from_matrix(g.matrix());
    EXPECT_LT(max_abs(RMat(back.g() - g0)), 1e-10);
    EXPECT_LT(max_abs(RMat(back.b() - b0)), 1e-10);
  }
}

TEST(GeneralizedMetric, RejectsIndefiniteG) {
  RMat g = RMat::Identity(2, 2);
  g(1, 1) = -1.0;
  EXPECT_THROW(GeneralizedMetric::from_g_b(g, RMat::Zero(2, 2)), AxiomViolation);
}

TEST(HodgeStar, Examples) {
  const auto g = GeneralizedMetric::from_g_b(RMat::Identity(2, 2), RMat::Zero(2, 2));
  const Spinor one = Spinor::one(2);
  const Spinor top = Spinor::monomial(2, 3u);
  EXPECT_LT((hodge_star(g, 1, one).coeffs() - top.coeffs()).norm(), 1e-14);
  EXPECT_LT((hodge_star(g, 1, top).coeffs() + one.coeffs()).norm(), 1e-14);
}

TEST(HodgeStar, PositivityEq12) {
  RandomSource rs(22);
  for (int m = 1; m <= 6; ++m) {
    const auto g = rs.metric(m);
    const CMat star = star_matrix(g);
    for (int t = 0; t < 200; ++t) {
      const Spinor phi = rs.spinor(m, true);
      const cplx val = chevalley_pairing(phi, Spinor(m, star * phi.coeffs()));
      EXPECT_GT(val.real(), 0.0);
      EXPECT_LT(std::abs(val.imag()), 1e-9 * std::abs(val));
    }
  }
}

TEST(HodgeStar, FrameIndependenceAndOrientationCheck) {
  RandomSource rs(23);
  for (int m : {2, 3, 4}) {
    const auto g = rs.metric(m);
    RMat q = rs.orthogonal(m);
    if (q.determinant() < 0) q.col(0) *= -1.0;
    const RMat frame = g.vplus_frame() * q;
    const Spinor phi = rs.spinor(m);
    const Spinor a = hodge_star(g, 1, phi);
    const Spinor b = hodge_star(g, frame, 1, phi);
    EXPECT_LT((a - b).norm(), 1e-10 * phi.norm());
    RMat flipped = frame;
    flipped.col(0) *= -1.0;
    EXPECT_THROW(hodge_star(g, flipped, 1, phi), AxiomViolation);
  }
}

TEST(GeneralizedComplexStructure, CanonicalLines) {
  const auto jc = GeneralizedComplexStructure::from_complex_structure(standard_complex_structure(2));
  CVec expected = CVec::Zero(4);
  expected(1) = 1.0;  // dx1 + i dx2
  expected(2) = kI;
  EXPECT_TRUE(parallel(jc.canonical().coeffs(), expected));
  const auto js = GeneralizedComplexStructure::from_symplectic(std_omega(2));
  CVec eiw = CVec::Zero(4);
  eiw(0) = 1.0;
  eiw(3) = kI;
  EXPECT_TRUE(parallel(js.canonical().coeffs(), eiw));
  for (const auto* j : {&jc, &js}) {
    EXPECT_LT(j->spectral_residual(), 1e-12);
    EXPECT_LT(canonical_annihilation_residual(*j), 1e-12);
    EXPECT_NEAR(j->projector(1).trace().real(), 1.0, 1e-12);
  }
}

TEST(GeneralizedComplexStructure, CanonicalNormalization) {
  RandomSource rs(24);
  const auto j = rs.compatible_structure(rs.metric(4));
  const CVec& c = j.canonical().coeffs();
  EXPECT_NEAR(c.cwiseAbs().maxCoeff(), 1.0, 1e-12);
}

TEST(GeneralizedComplexStructure, GradingShiftAndTopLine) {
  RandomSource rs(25);
  for (int m : {2, 4, 6}) {
    const auto j = rs.compatible_structure(rs.metric(m));
    const int n = m / 2;
    EXPECT_NEAR(j.projector(n).trace().real(), 1.0, 1e-9);
    EXPECT_LT(j.spectral_residual(), 1e-9);
    EXPECT_LT(canonical_annihilation_residual(j), 1e-9);
    for (Eigen::Index c = 0; c < j.l_frame().cols(); ++c) {
      const CMat act = clifford_matrix(m, j.l_frame().col(c));
      for (int k = -n; k < n; ++k) {
        const CVec img = act * (j.projector(k) * rs.spinor(m).coeffs());
        EXPECT_LT((j.projector(k + 1) * img - img).norm(), 1e-9 * std::max(1.0, img.norm()));
      }
    }
  }
}

TEST(GeneralizedComplexStructure, RejectsNonOrthogonal) {
  RMat bad = RMat::Zero(4, 4);
  bad.topLeftCorner(2, 2) = 2.0 * standard_complex_structure(2);
  bad.bottomRightCorner(2, 2) = 0.5 * standard_complex_structure(2);
  EXPECT_THROW(GeneralizedComplexStructure::from_matrix(bad), AxiomViolation);
}

TEST(HermitianPair, KaehlerT2Bigrading) {
  const auto pair = kaehler_pair(RMat::Identity(2, 2), standard_complex_structure(2));
  std::vector<Bidegree> expected{{-1, 0}, {0, -1}, {0, 1}, {1, 0}};
  EXPECT_EQ(pair.nonzero_bidegrees(), expected);
  for (const auto& [p, q] : expected) EXPECT_EQ(pair.rank(p, q), 1);
  CMat sum = CMat::Zero(4, 4);
  for (const auto& [pq, pr] : pair.bigraded()) sum += pr;
  EXPECT_LT(max_abs(CMat(sum - CMat::Identity(4, 4))), 1e-12);
}

TEST(HermitianPair, KaehlerT4SecondStructureIsSymplectic) {
  const auto pair = kaehler_pair(RMat::Identity(4, 4), standard_complex_structure(4));
  // canonical line of J2 is e^{-i(dx12 + dx34)}
  CVec expected = CVec::Zero(16);
  expected(0) = 1.0;
  expected(3) = -kI;
  expected(12) = -kI;
  expected(15) = -1.0;
  EXPECT_TRUE(parallel(pair.j2().canonical().coeffs(), expected));
  const auto js = GeneralizedComplexStructure::from_symplectic(-std_omega(4));
  EXPECT_LT(max_abs(RMat(js.matrix() - pair.j2().matrix())), 1e-12);
}

TEST(HermitianPair, StarIdentityAgainstTaylorOracle) {
  RandomSource rs(26);
  std::vector<HermitianPair> pairs{kaehler_pair(RMat::Identity(2, 2), standard_complex_structure(2)),
                                   kaehler_pair(RMat::Identity(4, 4), standard_complex_structure(4))};
  for (int t = 0; t < 12; ++t) pairs.push_back(rs.hermitian_pair(t % 3 == 2 ? 6 : (t % 3 == 1 ? 4 : 2)));
  for (const auto& pair : pairs) {
    const CMat rhs = -quarter_turn_oracle(pair.j1()) * quarter_turn_oracle(pair.j2());
    EXPECT_LT(max_abs(CMat(pair.star() - rhs)), 1e-9);
  }
}

TEST(HermitianPair, RejectsNonCommuting) {
  RandomSource rs(27);
  const auto g = rs.metric(2);
  const auto j = GeneralizedComplexStructure::from_complex_structure(standard_complex_structure(2));
  EXPECT_THROW(hermitian_pair(g, j), AxiomViolation);
}

TEST(HermitianPair, FrameShiftsMatchBigradingDiagram) {
  RandomSource rs(28);
  std::vector<HermitianPair> pairs{kaehler_pair(RMat::Identity(4, 4), standard_complex_structure(4)), rs.hermitian_pair(4),
                                   rs.hermitian_pair(6)};
  for (const auto& pair : pairs) {
    for (Eigen::Index c = 0; c < pair.vplus10().cols(); ++c) {
      EXPECT_EQ(pair.frame_shift(pair.vplus10().col(c)), std::optional<Bidegree>(Bidegree{1, 1}));
      EXPECT_EQ(pair.frame_shift(pair.vplus01().col(c)), std::optional<Bidegree>(Bidegree{-1, -1}));
      EXPECT_EQ(pair.frame_shift(pair.vminus10().col(c)), std::optional<Bidegree>(Bidegree{1, -1}));
      EXPECT_EQ(pair.frame_shift(pair.vminus01().col(c)), std::optional<Bidegree>(Bidegree{-1, 1}));
    }
  }
}

TEST(HermitianPair, BigradedProjectorsAreCommutingIdempotents) {
  RandomSource rs(29);
  const auto pair = rs.hermitian_pair(4);
  const int n = 2;
  for (const auto& [pq, pr] : pair.bigraded()) {
    EXPECT_LT(max_abs(CMat(pr * pr - pr)), 1e-9);
    EXPECT_LE(std::abs(pq.first) + std::abs(pq.second), n);
    EXPECT_EQ(((pq.first + pq.second - n) % 2 + 2) % 2, 0);
    for (const auto& [rs2, other] : pair.bigraded()) EXPECT_LT(max_abs(CMat(pr * other - other * pr)), 1e-9);
  }
}

TEST(DeformStructure, Examples) {
  RandomSource rs(30);
  const auto j = GeneralizedComplexStructure::from_complex_structure(standard_complex_structure(4));
  EXPECT_LT(max_abs(RMat(deform_structure(SoDouble(4), j).matrix() - j.matrix())), 1e-15);
  for (int t = 0; t < 5; ++t) {
    const SoDouble a = rs.so(4, 0.2);
    const auto split = split_transverse(a, j);
    const auto kept = deform_structure(SoDouble(4, split.stabilizer.matrix().real().cast<cplx>()), j);
    EXPECT_LT(max_abs(RMat(kept.matrix() - j.matrix())), 1e-10);
    const auto moved = deform_structure(a, j);
    EXPECT_LT(moved.axiom_residual(), 1e-10);
  }
}

TEST(TransverseExtraction, BasisDimension) {
  for (int m : {2, 4, 6}) {
    const auto j = GeneralizedComplexStructure::from_complex_structure(standard_complex_structure(m));
    EXPECT_EQ(static_cast<int>(transverse_basis(j).size()), m * m - m);
  }
}

TEST(TransverseExtraction, ExtractExamples) {
  RandomSource rs(31);
  const auto j = GeneralizedComplexStructure::from_complex_structure(standard_complex_structure(4));
  EXPECT_LT(max_abs(lemma31_extract(j, j).matrix()), 1e-12);
  for (int t = 0; t < 4; ++t) {
    const SoDouble a = rs.so(4, 0.15);
    const auto split = split_transverse(a, j);
    const SoDouble a0(4, split.transverse.matrix().real().cast<cplx>());
    const auto target = deform_structure(a0, j);
    const SoDouble got = lemma31_extract(target, j);
    EXPECT_LT(max_abs(CMat(got.matrix() - a0.matrix())), 1e-9);
    EXPECT_LT(max_abs(RMat(deform_structure(got, j).matrix() - target.matrix())), 1e-10);
    const SoDouble c(4, split.stabilizer.matrix().real().cast<cplx>());
    EXPECT_LT(max_abs(lemma31_extract(deform_structure(c, j), j).matrix()), 1e-10);
  }
}

TEST(TransverseExtraction, ExtractOnRandomStructure) {
  RandomSource rs(32);
  const auto j = rs.compatible_structure(rs.metric(4));
  const SoDouble a = rs.so(4, 0.1);
  const auto target = deform_structure(a, j);
  const SoDouble got = lemma31_extract(target, j);
  EXPECT_LT(max_abs(RMat(deform_structure(got, j).matrix() - target.matrix())), 1e-10);
  EXPECT_LT(max_abs(split_transverse(got, j).stabilizer.matrix()), 1e-9);
}

TEST(TransverseExtraction, LargeDeformationFails) {
  const auto j = GeneralizedComplexStructure::from_complex_structure(standard_complex_structure(2));
  NewtonOptions opts;
  opts.max_iterations = 1;
  const auto far = GeneralizedComplexStructure::from_complex_structure(-standard_complex_structure(2));
  EXPECT_THROW(lemma31_extract(far, j, opts), ConvergenceFailure);
}
