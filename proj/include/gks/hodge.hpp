#pragma once

// L2 theory for d^H and its bigraded components over a constant Hermitian
// background on the torus. Every operator is block diagonal in frequency.

#include <optional>
#include <string>
#include <utility>

#include "gks/torus_fields.hpp"

namespace gks {

/// Per-frequency blocks of a frequency-diagonal operator on spinor fields.
class BlockOperator {
 public:
  BlockOperator() = default;
  BlockOperator(int m, std::string label) : m_(m), label_(std::move(label)) {}

  int dim() const { return m_; }
  const std::string& label() const { return label_; }
  void set_label(std::string l) { label_ = std::move(l); }
  const std::map<Freq, CMat>& blocks() const { return blocks_; }
  void set_block(const Freq& k, CMat block) { blocks_[k] = std::move(block); }
  const CMat& block(const Freq& k) const {
    auto it = blocks_.find(k);
    if (it == blocks_.end()) throw DimensionMismatch("BlockOperator: frequency outside declared support");
    return it->second;
  }

  FourierSpinorField apply(const FourierSpinorField& f) const {
    return f.map([&](const Freq& k, const CVec& c) -> CVec { return block(k) * c; });
  }

  /// Blockwise map over the support.
  template <class F>
  BlockOperator transform(std::string label, F&& f) const {
    BlockOperator out(m_, std::move(label));
    for (const auto& [k, b] : blocks_) out.blocks_.emplace(k, f(k, b));
    return out;
  }

  friend BlockOperator operator*(const BlockOperator& a, const BlockOperator& b) {
    return a.transform(a.label_ + "*" + b.label_, [&](const Freq& k, const CMat& x) -> CMat { return x * b.block(k); });
  }
  friend BlockOperator operator+(const BlockOperator& a, const BlockOperator& b) {
    return a.transform(a.label_ + "+" + b.label_, [&](const Freq& k, const CMat& x) -> CMat { return x + b.block(k); });
  }
  friend BlockOperator operator-(const BlockOperator& a, const BlockOperator& b) {
    return a.transform(a.label_ + "-" + b.label_, [&](const Freq& k, const CMat& x) -> CMat { return x - b.block(k); });
  }
  friend BlockOperator operator*(cplx s, const BlockOperator& a) {
    return a.transform(a.label_, [&](const Freq&, const CMat& x) -> CMat { return s * x; });
  }

  /// max over blocks of the max-abs entry.
  double max_abs_entry() const {
    double s = 0.0;
    for (const auto& [k, b] : blocks_) s = std::max(s, max_abs(b));
    return s;
  }

 private:
  int m_ = 0;
  std::string label_;
  std::map<Freq, CMat> blocks_;
};

/// All frequencies with sup-norm at most `radius`.
inline std::vector<Freq> frequency_box(int m, int radius) {
  std::vector<Freq> out;
  Freq k(static_cast<std::size_t>(m), -radius);
  while (true) {
    out.push_back(k);
    int i = m - 1;
    while (i >= 0 && k[static_cast<std::size_t>(i)] == radius) {
      k[static_cast<std::size_t>(i)] = -radius;
      --i;
    }
    if (i < 0) break;
    ++k[static_cast<std::size_t>(i)];
  }
  return out;
}

/// h(f, g) = sum_k (f_k, star conj(g_k))_Ch = sum_k g_k^H W f_k
inline cplx l2_inner(const FourierSpinorField& f, const FourierSpinorField& g, const HermitianPair& pair) {
  cplx sum = 0.0;
  for (const auto& [k, fk] : f.terms()) {
    const CVec* gk = g.find(k);
    if (!gk) continue;
    sum += (gk->adjoint() * pair.gram() * fk)(0, 0);
  }
  return sum;
}

/// Named components of d^H on a generalized Kaehler background.
namespace shifts {
inline constexpr Bidegree delta_plus{1, 1};
inline constexpr Bidegree delta_plus_bar{-1, -1};
inline constexpr Bidegree delta_minus{1, -1};
inline constexpr Bidegree delta_minus_bar{-1, 1};
}  // namespace shifts

inline BlockOperator build_dh_operator(const TorusGeometry& geom, const std::vector<Freq>& support) {
  BlockOperator out(geom.dim(), "dH");
  for (const auto& k : support) out.set_block(k, geom.dh_block(k));
  return out;
}

inline std::string shift_label(const Bidegree& s) {
  return "d(" + std::to_string(s.first) + "," + std::to_string(s.second) + ")";
}

/// The shift component of d^H on the given support; shifts outside
/// {+-1, +-3}^2 are rejected.
inline BlockOperator build_component_operator(const Bidegree& shift, const HermitianPair& pair, const TorusGeometry& geom,
                                              const std::vector<Freq>& support) {
  if (!is_listed_shift(shift)) throw Error("build_component_operator: unsupported shift " + shift_label(shift));
  const BigradedDh split(pair, geom);
  BlockOperator out(geom.dim(), shift_label(shift));
  for (const auto& k : support) out.set_block(k, split.block(shift, k));
  return out;
}

inline void check_gram(const HermitianPair& pair) {
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (pair.gram() + pair.gram().adjoint()));
  const double herm = max_abs(CMat(pair.gram() - pair.gram().adjoint()));
  if (herm > 1e-9 || es.eigenvalues().minCoeff() <= 0.0)
    throw AxiomViolation("Gram matrix of the L2 inner product is not Hermitian positive", es.eigenvalues().minCoeff());
}

/// Adjoint for the l2 inner product: W^{-1} A^H W blockwise.
inline BlockOperator adjoint(const BlockOperator& op, const HermitianPair& pair) {
  check_gram(pair);
  const CMat& w = pair.gram();
  const CMat winv = w.inverse();
  return op.transform(op.label() + "^*", [&](const Freq&, const CMat& a) -> CMat { return winv * a.adjoint() * w; });
}

inline BlockOperator laplacian(const BlockOperator& op, const HermitianPair& pair) {
  const BlockOperator star = adjoint(op, pair);
  BlockOperator out = op * star + star * op;
  out.set_label("Lap[" + op.label() + "]");
  return out;
}

namespace detail {

/// Pseudo-inverse of a W-self-adjoint block, computed in W-orthonormal
/// coordinates; singular values below cutoff * largest are treated as kernel.
inline CMat w_pseudo_inverse(const CMat& block, const CMat& w, double cutoff = 1e-10) {
  Eigen::LLT<CMat> llt(w);
  const CMat r = llt.matrixU();  // W = R^H R
  const CMat rinv = r.inverse();
  CMat h = r * block * rinv;
  h = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(h);
  const RVec& ev = es.eigenvalues();
  const double top = ev.cwiseAbs().maxCoeff();
  RVec inv = RVec::Zero(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (std::abs(ev(i)) > cutoff * top && top > 0.0) inv(i) = 1.0 / ev(i);
  const CMat& v = es.eigenvectors();
  return rinv * (v * inv.cast<cplx>().asDiagonal() * v.adjoint()) * r;
}

}  // namespace detail

/// Laplacian block of one component at frequency k.
inline CMat component_laplacian_block(const BigradedDh& split, const Bidegree& shift, const Freq& k, const HermitianPair& pair) {
  const CMat& w = pair.gram();
  const CMat a = split.block(shift, k);
  const CMat star = w.inverse() * a.adjoint() * w;
  return a * star + star * a;
}

/// Green operator of the Laplacian of the chosen component (default delta_+):
/// blockwise pseudo-inverse, zero on harmonic fields.
class GreenOperator {
 public:
  GreenOperator(const HermitianPair& pair, const TorusGeometry& geom, Bidegree shift = shifts::delta_plus)
      : pair_(&pair), split_(pair, geom), shift_(shift) {
    check_gram(pair);
  }

  CMat block(const Freq& k) const {
    return detail::w_pseudo_inverse(component_laplacian_block(split_, shift_, k, *pair_), pair_->gram());
  }
  CMat laplacian_block(const Freq& k) const { return component_laplacian_block(split_, shift_, k, *pair_); }

  FourierSpinorField apply(const FourierSpinorField& rho) const {
    return rho.map([&](const Freq& k, const CVec& c) -> CVec { return block(k) * c; });
  }
  FourierSpinorField apply_laplacian(const FourierSpinorField& f) const {
    return f.map([&](const Freq& k, const CVec& c) -> CVec { return laplacian_block(k) * c; });
  }
  /// rho - Lap G rho
  FourierSpinorField harmonic_part(const FourierSpinorField& rho) const {
    return rho.map([&](const Freq& k, const CVec& c) -> CVec { return c - laplacian_block(k) * (block(k) * c); });
  }
  const BigradedDh& split() const { return split_; }

 private:
  const HermitianPair* pair_;
  BigradedDh split_;
  Bidegree shift_;
};

inline FourierSpinorField green_apply(const FourierSpinorField& rho, const HermitianPair& pair, const TorusGeometry& geom,
                                      Bidegree shift = shifts::delta_plus) {
  return GreenOperator(pair, geom, shift).apply(rho);
}

}  // namespace gks
