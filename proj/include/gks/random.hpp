#pragma once

// Seeded random inputs for property checks.

#include <random>

#include "gks/structures.hpp"

namespace gks {

class RandomSource {
 public:
  explicit RandomSource(unsigned long long seed) : rng_(seed) {}

  double normal() { return normal_(rng_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  std::mt19937_64& engine() { return rng_; }

  RMat real_matrix(Eigen::Index r, Eigen::Index c) {
    RMat out(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
      for (Eigen::Index i = 0; i < r; ++i) out(i, j) = normal();
    return out;
  }
  CMat complex_matrix(Eigen::Index r, Eigen::Index c) {
    return real_matrix(r, c).cast<cplx>() + kI * real_matrix(r, c).cast<cplx>();
  }
  RVec real_vector(Eigen::Index n) { return real_matrix(n, 1).col(0); }
  CVec complex_vector(Eigen::Index n) { return complex_matrix(n, 1).col(0); }

  RMat spd(int m) {
    const RMat a = real_matrix(m, m);
    return a * a.transpose() / m + 0.5 * RMat::Identity(m, m);
  }
  RMat skew(int m, double scale = 1.0) {
    const RMat a = real_matrix(m, m);
    return 0.5 * scale * (a - a.transpose());
  }
  RMat orthogonal(int m) {
    Eigen::HouseholderQR<RMat> qr(real_matrix(m, m));
    return qr.householderQ();
  }

  Spinor spinor(int m, bool real = false) { return {m, real ? real_vector(spinor_size(m)).cast<cplx>() : complex_vector(spinor_size(m))}; }
  DoubleVector double_vector(int m, bool real = false) {
    return {m, real ? real_vector(2 * m).cast<cplx>() : complex_vector(2 * m)};
  }
  /// Skew element of so(V + V*) with entries of size ~scale.
  SoDouble so(int m, double scale = 1.0, bool real = true) {
    const auto mk = [&]() { return real ? real_matrix(m, m).cast<cplx>() : complex_matrix(m, m); };
    const CMat a = mk();
    const CMat b0 = mk();
    const CMat be0 = mk();
    return scale * SoDouble::from_blocks(a, 0.5 * (b0 - b0.transpose()), 0.5 * (be0 - be0.transpose()));
  }

  GeneralizedMetric metric(int m) { return GeneralizedMetric::from_g_b(spd(m), skew(m, 0.7)); }

  /// J1 commuting with the metric: independent orthogonal complex structures
  /// on V+ and V- in their orthonormal frames.
  HermitianPair hermitian_pair(int m) {
    const GeneralizedMetric g = metric(m);
    return {g, compatible_structure(g)};
  }
  GeneralizedComplexStructure compatible_structure(const GeneralizedMetric& g) {
    const int m = g.dim();
    RMat e(2 * m, 2 * m);
    e << g.vplus_frame(), g.vminus_frame();
    const RMat js = standard_complex_structure(m);
    const RMat rp = orthogonal(m);
    const RMat rm = orthogonal(m);
    RMat block = RMat::Zero(2 * m, 2 * m);
    block.topLeftCorner(m, m) = rp * js * rp.transpose();
    block.bottomRightCorner(m, m) = rm * js * rm.transpose();
    return GeneralizedComplexStructure::from_matrix(e * block * e.inverse());
  }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_;
};

}  // namespace gks
