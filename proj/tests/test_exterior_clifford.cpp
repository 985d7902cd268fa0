#include <gtest/gtest.h>

#include "gks/exterior_clifford.hpp"
#include "gks/random.hpp"
#include "oracles.hpp"

using namespace gks;

namespace {

DoubleVector dv(int m, std::initializer_list<std::pair<int, double>> entries) {
  CVec c = CVec::Zero(2 * m);
  for (auto [i, v] : entries) c(i) = v;
  return {m, c};
}

unsigned mask(std::initializer_list<int> idx) {
  unsigned out = 0;
  for (int i : idx) out |= 1u << i;
  return out;
}

}  // namespace

TEST(NaturalPairing, Examples) {
  const int m = 2;
  EXPECT_NEAR(std::abs(natural_pairing(dv(m, {{0, 1}, {2, 1}}), dv(m, {{0, 1}, {2, 1}})) - 1.0), 0.0, 1e-15);
  EXPECT_EQ(natural_pairing(DoubleVector::basis_vector(m, 0), DoubleVector::basis_vector(m, 1)), cplx(0.0));
  EXPECT_EQ(natural_pairing(DoubleVector::basis_vector(m, 0), DoubleVector::basis_covector(m, 0)), cplx(0.5));
}

TEST(NaturalPairing, SelfPairingAndSymmetry) {
  RandomSource rs(1);
  for (int t = 0; t < 20; ++t) {
    const auto v = rs.double_vector(3);
    const auto w = rs.double_vector(3);
    const cplx xi_x = (v.covector_part().transpose() * v.vector_part())(0, 0);
    EXPECT_NEAR(std::abs(natural_pairing(v, v) - xi_x), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(natural_pairing(v, w) - natural_pairing(w, v)), 0.0, 1e-12);
  }
}

TEST(NaturalPairing, DimensionMismatchThrows) {
  EXPECT_THROW(natural_pairing(DoubleVector(2), DoubleVector(3)), DimensionMismatch);
}

TEST(CliffordAct, Examples) {
  const int m = 2;
  const Spinor dx1 = Spinor::monomial(m, mask({0}));
  EXPECT_EQ(clifford_act(DoubleVector::basis_vector(m, 0), dx1).coeffs(), Spinor::one(m).coeffs());
  EXPECT_EQ(clifford_act(DoubleVector::basis_covector(m, 0), Spinor::one(m)).coeffs(), dx1.coeffs());
  const Spinor out = clifford_act(dv(m, {{1, 1}, {3, 1}}), dx1);
  EXPECT_EQ(out.coeffs(), Spinor::monomial(m, mask({0, 1}), -1.0).coeffs());
}

TEST(CliffordAct, MatchesIndexListOracle) {
  RandomSource rs(2);
  for (int m : {1, 2, 3, 4, 5}) {
    for (int t = 0; t < 10; ++t) {
      const auto v = rs.double_vector(m);
      const auto phi = rs.spinor(m);
      const CVec ref = oracle::clifford(v.coeffs(), phi.coeffs(), m);
      EXPECT_LT((clifford_act(v, phi).coeffs() - ref).norm(), 1e-12 * (1 + ref.norm()));
    }
  }
}

TEST(CliffordAct, CliffordRelation) {
  RandomSource rs(3);
  for (int m = 1; m <= 6; ++m) {
    const auto v = rs.double_vector(m);
    const auto phi = rs.spinor(m);
    const Spinor twice = clifford_act(v, clifford_act(v, phi));
    const CVec expected = natural_pairing(v, v) * phi.coeffs();
    EXPECT_LT((twice.coeffs() - expected).norm(), 1e-12 * expected.norm() + 1e-12);
  }
}

TEST(Chevalley, Examples) {
  const int m = 2;
  const Spinor one = Spinor::one(m);
  const Spinor top = Spinor::monomial(m, mask({0, 1}));
  const Spinor dx1 = Spinor::monomial(m, mask({0}));
  const Spinor dx2 = Spinor::monomial(m, mask({1}));
  EXPECT_EQ(chevalley_pairing(one, top), cplx(1.0));
  EXPECT_EQ(chevalley_pairing(dx1, dx1), cplx(0.0));
  EXPECT_EQ(chevalley_pairing(dx1, dx2), cplx(-1.0));
}

TEST(Chevalley, MatchesOracleAndMatrix) {
  RandomSource rs(4);
  for (int m = 1; m <= 6; ++m) {
    const auto a = rs.spinor(m);
    const auto b = rs.spinor(m);
    const cplx ref = oracle::chevalley(a.coeffs(), b.coeffs(), m);
    EXPECT_NEAR(std::abs(chevalley_pairing(a, b) - ref), 0.0, 1e-10);
    const cplx via_matrix = (a.coeffs().transpose() * chevalley_matrix(m).cast<cplx>() * b.coeffs())(0, 0);
    EXPECT_NEAR(std::abs(via_matrix - ref), 0.0, 1e-10);
  }
}

TEST(Chevalley, SymmetrySignDependsOnlyOnDimension) {
  RandomSource rs(5);
  for (int m = 1; m <= 8; ++m) {
    int sign = 0;
    for (int t = 0; t < 5; ++t) {
      const auto a = rs.spinor(m);
      const auto b = rs.spinor(m);
      const cplx ab = chevalley_pairing(a, b);
      const cplx ba = chevalley_pairing(b, a);
      const int s = std::abs(ab - ba) < 1e-9 * std::abs(ab) ? 1 : -1;
      EXPECT_LT(std::abs(ab - static_cast<double>(s) * ba), 1e-9 * std::max(1.0, std::abs(ab)));
      if (sign == 0) sign = s;
      EXPECT_EQ(s, sign) << "m=" << m;
    }
  }
}

TEST(Transpose, InvolutionAndOracle) {
  RandomSource rs(6);
  for (int m = 1; m <= 6; ++m) {
    const auto a = rs.spinor(m);
    EXPECT_LT((transpose(transpose(a)).coeffs() - a.coeffs()).norm(), 1e-14);
    const CVec ref = oracle::to_vector(oracle::transpose(oracle::from_vector(a.coeffs(), m)), m);
    EXPECT_LT((transpose(a).coeffs() - ref).norm(), 1e-12);
  }
}

TEST(Wedge, MatchesOracle) {
  RandomSource rs(7);
  for (int m = 1; m <= 5; ++m) {
    const auto a = rs.spinor(m);
    const auto b = rs.spinor(m);
    const CVec ref = oracle::to_vector(oracle::wedge(oracle::from_vector(a.coeffs(), m), oracle::from_vector(b.coeffs(), m)), m);
    EXPECT_LT((wedge(a, b).coeffs() - ref).norm(), 1e-11 * (1 + ref.norm()));
  }
}

TEST(SpinLieAction, Examples) {
  const int m = 2;
  CMat b = CMat::Zero(2, 2);
  b(0, 1) = 1.0;
  b(1, 0) = -1.0;
  const SoDouble alpha = SoDouble::b_field(b);
  EXPECT_LT((spin_lie_action(alpha, Spinor::one(m)).coeffs() - Spinor::monomial(m, mask({0, 1})).coeffs()).norm(), 1e-14);
  EXPECT_EQ(spin_lie_action(SoDouble(m), Spinor::one(m)).norm(), 0.0);
}

TEST(SpinLieAction, SymplecticCanonicalEigenvector) {
  RMat omega = RMat::Zero(2, 2);
  omega(0, 1) = 1.0;
  omega(1, 0) = -1.0;
  const auto j = GeneralizedComplexStructure::from_symplectic(omega);
  CVec e = CVec::Zero(4);  // e^{i omega} = 1 + i dx12
  e(0) = 1.0;
  e(3) = kI;
  const CVec image = spin_matrix(j.as_so()) * e;
  EXPECT_LT((image - kI * e).norm(), 1e-13);
}

TEST(SpinLieAction, IntertwinesCliffordAction) {
  RandomSource rs(8);
  for (int m = 1; m <= 5; ++m) {
    const SoDouble alpha = rs.so(m, 1.0, false);
    const CMat d = spin_matrix(alpha);
    for (int t = 0; t < 3; ++t) {
      const auto v = rs.double_vector(m);
      const CMat lhs = d * clifford_matrix(v) - clifford_matrix(v) * d;
      const CMat rhs = clifford_matrix(alpha.apply(v));
      EXPECT_LT(max_abs(CMat(lhs - rhs)), 1e-11);
    }
  }
}

TEST(SpinLieAction, LieAlgebraMap) {
  RandomSource rs(9);
  for (int m = 2; m <= 5; ++m) {
    const SoDouble x = rs.so(m);
    const SoDouble y = rs.so(m);
    const CMat lhs = spin_matrix(SoDouble::commutator(x, y));
    const CMat dx = spin_matrix(x);
    const CMat dy = spin_matrix(y);
    EXPECT_LT(max_abs(CMat(lhs - (dx * dy - dy * dx))), 1e-9);
  }
}

TEST(SpinLieAction, ChevalleyInfinitesimallyInvariant) {
  RandomSource rs(10);
  for (int m = 2; m <= 6; ++m) {
    const SoDouble x = rs.so(m);
    const auto a = rs.spinor(m);
    const auto b = rs.spinor(m);
    const cplx s = chevalley_pairing(spin_lie_action(x, a), b) + chevalley_pairing(a, spin_lie_action(x, b));
    EXPECT_LT(std::abs(s), 1e-9);
  }
}

TEST(SpinLieAction, RejectsNonSkew) {
  CMat bad = CMat::Identity(4, 4);
  EXPECT_THROW(spin_lie_action(SoDouble(2, bad), Spinor::one(2)), AxiomViolation);
}

TEST(SpinorExp, Examples) {
  const int m = 2;
  CMat b = CMat::Zero(2, 2);
  b(0, 1) = 1.0;
  b(1, 0) = -1.0;
  const Spinor out = spinor_exp(SoDouble::b_field(b), Spinor::one(m));
  CVec expected = CVec::Zero(4);
  expected(0) = 1.0;
  expected(3) = 1.0;
  EXPECT_LT((out.coeffs() - expected).norm(), 1e-15);
  RandomSource rs(11);
  const auto phi = rs.spinor(3);
  EXPECT_LT((spinor_exp(SoDouble(3), phi).coeffs() - phi.coeffs()).norm(), 1e-15);
}

TEST(SpinorExp, MatchesTaylorOracle) {
  RandomSource rs(12);
  for (int m = 2; m <= 4; ++m) {
    const SoDouble x = rs.so(m, 0.3);
    const CMat ref = oracle::taylor_exp(spin_matrix(x));
    EXPECT_LT(max_abs(CMat(spin_group_matrix(x) - ref)), 1e-11);
  }
}

TEST(SpinorExp, EquivarianceAndChevalleyInvariance) {
  RandomSource rs(13);
  for (int m : {2, 4, 6}) {
    for (int t = 0; t < 5; ++t) {
      const SoDouble x = rs.so(m, 0.5);
      const auto v = rs.double_vector(m);
      const auto phi = rs.spinor(m);
      const auto psi = rs.spinor(m);
      const Spinor lhs = spinor_exp(x, clifford_act(v, phi));
      const DoubleVector ev(m, group_matrix(x) * v.coeffs());
      const Spinor rhs = clifford_act(ev, spinor_exp(x, phi));
      EXPECT_LT((lhs - rhs).norm(), 1e-9 * phi.norm());
      const cplx before = chevalley_pairing(phi, psi);
      const cplx after = chevalley_pairing(spinor_exp(x, phi), spinor_exp(x, psi));
      EXPECT_LT(std::abs(after - before), 1e-9 * std::max(1.0, std::abs(before)));
    }
  }
}

TEST(SpinorExp, ReportsNonConvergence) {
  RandomSource rs(14);
  const SoDouble x = rs.so(3, 50.0);
  ExpOptions opts;
  opts.max_terms = 2;
  EXPECT_THROW(spinor_exp(x, rs.spinor(3), opts), ConvergenceFailure);
}

TEST(SoDecompose, Examples) {
  const auto zero = so_decompose(SoDouble(2));
  EXPECT_EQ(max_abs(zero.endomorphism) + max_abs(zero.two_form) + max_abs(zero.bivector), 0.0);
  CMat b = CMat::Zero(2, 2);
  b(0, 1) = 1.0;
  b(1, 0) = -1.0;
  const auto blocks = so_decompose(SoDouble::b_field(b));
  EXPECT_EQ(blocks.two_form, b);
  EXPECT_EQ(max_abs(blocks.endomorphism), 0.0);
  EXPECT_EQ(max_abs(blocks.bivector), 0.0);
}

TEST(SoDecompose, RoundTripAndSkewBlocks) {
  RandomSource rs(15);
  for (int m = 1; m <= 6; ++m) {
    const SoDouble x = rs.so(m, 1.0, false);
    const auto blocks = so_decompose(x);
    EXPECT_EQ(reassemble(blocks).matrix(), x.matrix());
    EXPECT_LT(max_abs(CMat(blocks.two_form + blocks.two_form.transpose())), 1e-14);
    EXPECT_LT(max_abs(CMat(blocks.bivector + blocks.bivector.transpose())), 1e-14);
  }
  EXPECT_THROW(so_decompose(SoDouble(2, CMat::Identity(4, 4))), AxiomViolation);
}

TEST(SoDouble, WedgeSpinActionOnOrthogonalPair) {
  RandomSource rs(16);
  const int m = 4;
  const auto u = DoubleVector::basis_vector(m, 0) + DoubleVector::basis_covector(m, 1);
  const auto w = DoubleVector::basis_vector(m, 2) + cplx(2.0) * DoubleVector::basis_covector(m, 3);
  ASSERT_EQ(natural_pairing(u, w), cplx(0.0));
  const CMat lhs = spin_matrix(SoDouble::wedge(u, w));
  EXPECT_LT(max_abs(CMat(lhs - clifford_matrix(u) * clifford_matrix(w))), 1e-13);
}
