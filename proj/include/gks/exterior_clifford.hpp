#pragma once

// Exterior algebra of V* as the spinor module of V + V*.
//
// Conventions:
//   * basis of the double space: (d_1..d_m, dx_1..dx_m), index a < m is the
//     vector d_{a+1}, index a >= m the covector dx_{a-m+1};
//   * a spinor coefficient index is a subset bitmask, bit i <-> dx_{i+1},
//     monomials written with ascending indices;
//   * dx_1 ^ ... ^ dx_m is the positive top form.

#include <bit>
#include <cstdint>
#include <utility>
#include <vector>

#include "gks/core.hpp"

namespace gks {

inline int popcount(unsigned x) { return std::popcount(x); }

/// Sign (-1)^{#bits of mask strictly below bit j}.
inline double parity_below(unsigned mask, int j) {
  return (popcount(mask & ((1u << j) - 1u)) & 1) ? -1.0 : 1.0;
}

class DoubleVector {
 public:
  DoubleVector() = default;
  explicit DoubleVector(int m) : m_(m), coeffs_(CVec::Zero(2 * m)) {}
  DoubleVector(int m, CVec coeffs) : m_(m), coeffs_(std::move(coeffs)) {
    require_dim(coeffs_.size() == 2 * m, "DoubleVector: coefficient length must be 2m");
  }
  DoubleVector(const CVec& vector_part, const CVec& covector_part)
      : m_(static_cast<int>(vector_part.size())), coeffs_(2 * vector_part.size()) {
    require_dim(vector_part.size() == covector_part.size(), "DoubleVector: part sizes differ");
    coeffs_ << vector_part, covector_part;
  }

  /// d_{i+1}
  static DoubleVector basis_vector(int m, int i) {
    DoubleVector v(m);
    v.coeffs_(i) = 1.0;
    return v;
  }
  /// dx_{i+1}
  static DoubleVector basis_covector(int m, int i) {
    DoubleVector v(m);
    v.coeffs_(m + i) = 1.0;
    return v;
  }

  int dim() const { return m_; }
  const CVec& coeffs() const { return coeffs_; }
  CVec vector_part() const { return coeffs_.head(m_); }
  CVec covector_part() const { return coeffs_.tail(m_); }

  DoubleVector operator+(const DoubleVector& o) const { return {m_, coeffs_ + o.coeffs_}; }
  DoubleVector operator-(const DoubleVector& o) const { return {m_, coeffs_ - o.coeffs_}; }
  friend DoubleVector operator*(cplx s, const DoubleVector& v) { return {v.m_, s * v.coeffs_}; }

 private:
  int m_ = 0;
  CVec coeffs_;
};

class Spinor {
 public:
  Spinor() = default;
  explicit Spinor(int m) : m_(m), coeffs_(CVec::Zero(spinor_size(m))) {
    require_dim(m >= 0 && m <= kMaxDim, "Spinor: dimension out of range");
  }
  Spinor(int m, CVec coeffs) : m_(m), coeffs_(std::move(coeffs)) {
    require_dim(coeffs_.size() == spinor_size(m), "Spinor: coefficient length must be 2^m");
  }

  static Spinor monomial(int m, unsigned mask, cplx value = 1.0) {
    Spinor s(m);
    s.coeffs_(mask) = value;
    return s;
  }
  static Spinor one(int m) { return monomial(m, 0u); }

  int dim() const { return m_; }
  const CVec& coeffs() const { return coeffs_; }
  CVec& coeffs() { return coeffs_; }
  cplx operator[](unsigned mask) const { return coeffs_(mask); }

  Spinor degree_part(int k) const {
    Spinor out(m_);
    for (unsigned I = 0; I < coeffs_.size(); ++I)
      if (popcount(I) == k) out.coeffs_(I) = coeffs_(I);
    return out;
  }
  double norm() const { return coeffs_.norm(); }

  Spinor operator+(const Spinor& o) const { return {m_, coeffs_ + o.coeffs_}; }
  Spinor operator-(const Spinor& o) const { return {m_, coeffs_ - o.coeffs_}; }
  friend Spinor operator*(cplx s, const Spinor& v) { return {v.m_, s * v.coeffs_}; }

 private:
  int m_ = 0;
  CVec coeffs_;
};

/// The pairing matrix P with <v, w> = v^T P w.
inline RMat pairing_matrix(int m) {
  RMat p = RMat::Zero(2 * m, 2 * m);
  p.topRightCorner(m, m).setIdentity();
  p.bottomLeftCorner(m, m).setIdentity();
  return 0.5 * p;
}

/// <X + xi, Y + eta> = (eta(X) + xi(Y)) / 2, bilinear (no conjugation).
inline cplx natural_pairing(const DoubleVector& v, const DoubleVector& w) {
  require_dim(v.dim() == w.dim(), "natural_pairing: dimension mismatch");
  const int m = v.dim();
  const CVec& a = v.coeffs();
  const CVec& b = w.coeffs();
  return 0.5 * (a.head(m).transpose() * b.tail(m) + a.tail(m).transpose() * b.head(m))(0, 0);
}

namespace detail {

// Clifford action of one basis element of the double space on a coefficient vector.
inline void accumulate_generator(int m, int a, cplx weight, const CVec& in, CVec& out) {
  if (weight == cplx(0.0)) return;
  const unsigned size = static_cast<unsigned>(in.size());
  if (a < m) {
    const unsigned bit = 1u << a;
    for (unsigned I = 0; I < size; ++I)
      if ((I & bit) && in(I) != cplx(0.0)) out(I ^ bit) += weight * parity_below(I, a) * in(I);
  } else {
    const int j = a - m;
    const unsigned bit = 1u << j;
    for (unsigned I = 0; I < size; ++I)
      if (!(I & bit) && in(I) != cplx(0.0)) out(I | bit) += weight * parity_below(I, j) * in(I);
  }
}

inline CVec clifford_apply(int m, const CVec& v, const CVec& phi) {
  CVec out = CVec::Zero(phi.size());
  for (int a = 0; a < 2 * m; ++a) accumulate_generator(m, a, v(a), phi, out);
  return out;
}

}  // namespace detail

/// (X + xi) . phi = i_X phi + xi ^ phi
inline Spinor clifford_act(const DoubleVector& v, const Spinor& phi) {
  require_dim(v.dim() == phi.dim(), "clifford_act: dimension mismatch");
  return {phi.dim(), detail::clifford_apply(v.dim(), v.coeffs(), phi.coeffs())};
}

/// Dense 2^m x 2^m matrix of the Clifford action of v.
inline CMat clifford_matrix(int m, const CVec& v) {
  require_dim(v.size() == 2 * m, "clifford_matrix: dimension mismatch");
  const int size = spinor_size(m);
  CMat out = CMat::Zero(size, size);
  for (int a = 0; a < 2 * m; ++a) {
    if (v(a) == cplx(0.0)) continue;
    if (a < m) {
      const unsigned bit = 1u << a;
      for (unsigned I = 0; I < static_cast<unsigned>(size); ++I)
        if (I & bit) out(I ^ bit, I) += v(a) * parity_below(I, a);
    } else {
      const int j = a - m;
      const unsigned bit = 1u << j;
      for (unsigned I = 0; I < static_cast<unsigned>(size); ++I)
        if (!(I & bit)) out(I | bit, I) += v(a) * parity_below(I, j);
    }
  }
  return out;
}

inline CMat clifford_matrix(const DoubleVector& v) { return clifford_matrix(v.dim(), v.coeffs()); }

/// Sign of dx_I ^ dx_J for disjoint I, J (0 if they overlap).
inline double wedge_sign(unsigned I, unsigned J) {
  if (I & J) return 0.0;
  int swaps = 0;
  for (unsigned j = J; j; j &= j - 1) {
    const int bit = std::countr_zero(j);
    swaps += popcount(I >> (bit + 1));
  }
  return (swaps & 1) ? -1.0 : 1.0;
}

inline double transpose_sign(int degree) { return ((degree * (degree - 1) / 2) & 1) ? -1.0 : 1.0; }

/// Reversal (theta_1 ^ ... ^ theta_k)^t = theta_k ^ ... ^ theta_1.
inline Spinor transpose(const Spinor& phi) {
  Spinor out = phi;
  for (unsigned I = 0; I < out.coeffs().size(); ++I) out.coeffs()(I) *= transpose_sign(popcount(I));
  return out;
}

/// Wedge product of two forms.
inline Spinor wedge(const Spinor& a, const Spinor& b) {
  require_dim(a.dim() == b.dim(), "wedge: dimension mismatch");
  Spinor out(a.dim());
  const unsigned size = static_cast<unsigned>(a.coeffs().size());
  for (unsigned I = 0; I < size; ++I) {
    if (a[I] == cplx(0.0)) continue;
    for (unsigned J = 0; J < size; ++J) {
      if ((I & J) || b[J] == cplx(0.0)) continue;
      out.coeffs()(I | J) += wedge_sign(I, J) * a[I] * b[J];
    }
  }
  return out;
}

/// Matrix C with (phi, psi)_Ch = phi^T C psi.
inline RMat chevalley_matrix(int m) {
  const int size = spinor_size(m);
  const unsigned top = static_cast<unsigned>(size - 1);
  RMat c = RMat::Zero(size, size);
  for (unsigned I = 0; I <= top; ++I) {
    const unsigned J = top ^ I;
    c(I, J) = -wedge_sign(I, J) * transpose_sign(popcount(J));
  }
  return c;
}

/// (phi, psi)_Ch = -(phi ^ psi^t)_top
inline cplx chevalley_pairing(const Spinor& phi, const Spinor& psi) {
  require_dim(phi.dim() == psi.dim(), "chevalley_pairing: dimension mismatch");
  const unsigned top = static_cast<unsigned>(phi.coeffs().size() - 1);
  cplx sum = 0.0;
  for (unsigned I = 0; I <= top; ++I) {
    const unsigned J = top ^ I;
    sum -= wedge_sign(I, J) * transpose_sign(popcount(J)) * phi[I] * psi[J];
  }
  return sum;
}

/// Block view of an element of so(V + V*).
struct SoBlocks {
  CMat endomorphism;  // A : V -> V (upper left)
  CMat two_form;      // B : V -> V* (lower left), B_ij = B(d_i, d_j)
  CMat bivector;      // beta : V* -> V (upper right)
};

/// Endomorphism of the double space, skew for the natural pairing.
class SoDouble {
 public:
  SoDouble() = default;
  explicit SoDouble(int m) : m_(m), mat_(CMat::Zero(2 * m, 2 * m)) {}
  SoDouble(int m, CMat mat) : m_(m), mat_(std::move(mat)) {
    require_dim(mat_.rows() == 2 * m && mat_.cols() == 2 * m, "SoDouble: matrix must be 2m x 2m");
  }

  /// Reassemble from blocks; the lower right block is -A^T.
  static SoDouble from_blocks(const CMat& a, const CMat& b, const CMat& beta) {
    const auto m = a.rows();
    CMat mat(2 * m, 2 * m);
    mat << a, beta, b, -a.transpose();
    return {static_cast<int>(m), mat};
  }
  /// B-field action X + xi -> -i_X B (its spin action is B ^ .)
  static SoDouble b_field(const CMat& two_form) {
    const auto m = two_form.rows();
    return from_blocks(CMat::Zero(m, m), two_form, CMat::Zero(m, m));
  }
  static SoDouble bivector(const CMat& beta) {
    const auto m = beta.rows();
    return from_blocks(CMat::Zero(m, m), CMat::Zero(m, m), beta);
  }
  /// u ^ w acting as v -> 2(<w, v> u - <u, v> w); its spin action is u.w. when <u,w> = 0.
  static SoDouble wedge(const DoubleVector& u, const DoubleVector& w) {
    require_dim(u.dim() == w.dim(), "SoDouble::wedge: dimension mismatch");
    const int m = u.dim();
    const CMat p = pairing_matrix(m).cast<cplx>();
    const CVec& uc = u.coeffs();
    const CVec& wc = w.coeffs();
    return {m, 2.0 * (uc * (wc.transpose() * p) - wc * (uc.transpose() * p))};
  }

  int dim() const { return m_; }
  const CMat& matrix() const { return mat_; }

  /// max |<a v, w> + <v, a w>| over basis pairs.
  double antisymmetry_residual() const {
    const CMat p = pairing_matrix(m_).cast<cplx>();
    return max_abs(CMat(mat_.transpose() * p + p * mat_));
  }
  bool is_antisymmetric(double tol = 1e-9) const {
    return antisymmetry_residual() <= tol * std::max(1.0, max_abs(mat_));
  }
  bool is_real(double tol = 0.0) const { return max_abs(mat_.imag()) <= tol; }

  DoubleVector apply(const DoubleVector& v) const { return {m_, mat_ * v.coeffs()}; }

  SoDouble operator+(const SoDouble& o) const { return {m_, mat_ + o.mat_}; }
  SoDouble operator-(const SoDouble& o) const { return {m_, mat_ - o.mat_}; }
  SoDouble operator-() const { return {m_, -mat_}; }
  friend SoDouble operator*(cplx s, const SoDouble& a) { return {a.m_, s * a.mat_}; }
  SoDouble conjugate() const { return {m_, mat_.conjugate()}; }

  static SoDouble commutator(const SoDouble& x, const SoDouble& y) {
    return {x.m_, x.mat_ * y.mat_ - y.mat_ * x.mat_};
  }

 private:
  int m_ = 0;
  CMat mat_;
};

inline void check_antisymmetric(const SoDouble& alpha, double tol = 1e-9) {
  const double r = alpha.antisymmetry_residual();
  if (r > tol * std::max(1.0, max_abs(alpha.matrix())))
    throw AxiomViolation("endomorphism is not skew for the natural pairing", r);
}

inline SoBlocks so_decompose(const SoDouble& alpha, double tol = 1e-9) {
  check_antisymmetric(alpha, tol);
  const int m = alpha.dim();
  const CMat& x = alpha.matrix();
  return {x.topLeftCorner(m, m), x.bottomLeftCorner(m, m), x.topRightCorner(m, m)};
}

inline SoDouble reassemble(const SoBlocks& blocks) {
  return SoDouble::from_blocks(blocks.endomorphism, blocks.two_form, blocks.bivector);
}

/// Spin representation of so(V + V*) on forms:
///   d_rho(alpha) = 1/4 sum_a [ (alpha v_a). , (v^a). ]
/// with v^a the pairing-dual basis (2<v^a, v_b> = delta). For the standard
/// basis, the dual of d_j is dx_j and vice versa.
inline CMat spin_matrix(const SoDouble& alpha) {
  const int m = alpha.dim();
  const int size = spinor_size(m);
  CMat out = CMat::Zero(size, size);
  CMat image_ops;
  for (int a = 0; a < 2 * m; ++a) {
    const CVec image = alpha.matrix().col(a);
    if (image.cwiseAbs().maxCoeff() == 0.0) continue;
    const int dual = a < m ? a + m : a - m;
    CVec dual_vec = CVec::Zero(2 * m);
    dual_vec(dual) = 1.0;
    const CMat left = clifford_matrix(m, image);
    const CMat right = clifford_matrix(m, dual_vec);
    out += left * right - right * left;
  }
  return 0.25 * out;
}

inline Spinor spin_lie_action(const SoDouble& alpha, const Spinor& phi, double tol = 1e-9) {
  require_dim(alpha.dim() == phi.dim(), "spin_lie_action: dimension mismatch");
  check_antisymmetric(alpha, tol);
  return {phi.dim(), spin_matrix(alpha) * phi.coeffs()};
}

/// Whether alpha is nilpotent with pure B or pure beta blocks.
inline bool is_pure_b_or_beta(const SoDouble& alpha) {
  const int m = alpha.dim();
  const CMat& x = alpha.matrix();
  const bool no_a = x.topLeftCorner(m, m).cwiseAbs().maxCoeff() == 0.0 &&
                    x.bottomRightCorner(m, m).cwiseAbs().maxCoeff() == 0.0;
  const bool no_b = x.bottomLeftCorner(m, m).cwiseAbs().maxCoeff() == 0.0;
  const bool no_beta = x.topRightCorner(m, m).cwiseAbs().maxCoeff() == 0.0;
  return no_a && (no_b || no_beta);
}

/// e^{d_rho(alpha)} as a 2^m x 2^m matrix. Pure B / pure beta elements are
/// summed exactly; anything else goes through scaling and squaring.
inline CMat spin_group_matrix(const SoDouble& alpha, ExpOptions opts = {}) {
  const CMat gen = spin_matrix(alpha);
  if (is_pure_b_or_beta(alpha)) return expm_nilpotent(gen, alpha.dim() + 2);
  return expm(gen, opts);
}

inline Spinor spinor_exp(const SoDouble& alpha, const Spinor& phi, ExpOptions opts = {}) {
  require_dim(alpha.dim() == phi.dim(), "spinor_exp: dimension mismatch");
  check_antisymmetric(alpha);
  return {phi.dim(), spin_group_matrix(alpha, opts) * phi.coeffs()};
}

/// e^{alpha} acting on the double space.
inline CMat group_matrix(const SoDouble& alpha, ExpOptions opts = {}) {
  if (is_pure_b_or_beta(alpha)) return expm_nilpotent(alpha.matrix(), 4);
  return expm(alpha.matrix(), opts);
}

/// A 2-form as a Spinor (degree-2 part), B = sum_{i<j} B_ij dx_i ^ dx_j.
inline Spinor two_form_spinor(const CMat& b) {
  const int m = static_cast<int>(b.rows());
  Spinor s(m);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) s.coeffs()((1u << i) | (1u << j)) = b(i, j);
  return s;
}

}  // namespace gks
