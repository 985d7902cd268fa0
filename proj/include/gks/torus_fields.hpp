#pragma once

// Trigonometric-polynomial fields on the flat torus T^m = R^m / (2 pi Z)^m.
// A field is sum_k e^{i <k, x>} c_k over a finite, explicitly tracked support;
// every operation here is exact on that representation (derivatives multiply
// by i k, products convolve supports).

#include <array>
#include <functional>
#include <map>
#include <random>
#include <utility>
#include <vector>

#include "gks/structures.hpp"

namespace gks {

using Freq = std::vector<int>;

inline Freq zero_freq(int m) { return Freq(static_cast<std::size_t>(m), 0); }

inline Freq operator+(const Freq& a, const Freq& b) {
  Freq out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

inline Freq operator-(const Freq& a) {
  Freq out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = -a[i];
  return out;
}

inline int sup_norm(const Freq& k) {
  int s = 0;
  for (int v : k) s = std::max(s, std::abs(v));
  return s;
}

namespace detail {

inline double sq_norm(cplx c) { return std::norm(c); }
template <class Derived>
double sq_norm(const Eigen::MatrixBase<Derived>& c) {
  return c.squaredNorm();
}
inline cplx conj_coef(cplx c) { return std::conj(c); }
template <class Derived>
auto conj_coef(const Eigen::MatrixBase<Derived>& c) {
  return c.conjugate().eval();
}

}  // namespace detail

struct SpinorTag {};
struct SectionTag {};
struct SoTag {};
struct ScalarTag {};

/// Finitely supported Fourier series with coefficients of type Coef.
template <class Coef, class Tag>
class FourierField {
 public:
  using coef_type = Coef;
  using map_type = std::map<Freq, Coef>;

  FourierField() = default;
  explicit FourierField(int m) : m_(m) {}

  static FourierField constant(int m, Coef c) {
    FourierField f(m);
    f.add(zero_freq(m), std::move(c));
    return f;
  }
  static FourierField single(const Freq& k, Coef c) {
    FourierField f(static_cast<int>(k.size()));
    f.add(k, std::move(c));
    return f;
  }

  int dim() const { return m_; }
  const map_type& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t support_size() const { return terms_.size(); }
  std::vector<Freq> support() const {
    std::vector<Freq> out;
    out.reserve(terms_.size());
    for (const auto& [k, c] : terms_) out.push_back(k);
    return out;
  }

  /// Accumulate c at frequency k.
  void add(const Freq& k, const Coef& c) {
    require_dim(static_cast<int>(k.size()) == m_, "FourierField: frequency dimension mismatch");
    auto it = terms_.find(k);
    if (it == terms_.end())
      terms_.emplace(k, c);
    else
      it->second = it->second + c;
  }
  const Coef* find(const Freq& k) const {
    auto it = terms_.find(k);
    return it == terms_.end() ? nullptr : &it->second;
  }

  /// Apply a coefficientwise map, keeping the support.
  template <class OutTag = Tag, class F>
  auto map(F&& f) const {
    using Out = std::decay_t<decltype(f(std::declval<const Freq&>(), std::declval<const Coef&>()))>;
    FourierField<Out, OutTag> out(m_);
    for (const auto& [k, c] : terms_) out.add(k, f(k, c));
    return out;
  }

  /// Pointwise complex conjugate: coefficient at k becomes conj(c_{-k}).
  FourierField conjugate() const {
    FourierField out(m_);
    for (const auto& [k, c] : terms_) out.add(-k, detail::conj_coef(c));
    return out;
  }

  /// Parseval norm: sqrt(sum_k |c_k|^2).
  double norm() const {
    double s = 0.0;
    for (const auto& [k, c] : terms_) s += detail::sq_norm(c);
    return std::sqrt(s);
  }

  bool is_real(double tol = 1e-12) const {
    const FourierField diff = *this - conjugate();
    return diff.norm() <= tol * std::max(1.0, norm());
  }

  /// Drop coefficients whose norm is at most tol (tol = 0 drops exact zeros only).
  FourierField pruned(double tol = 0.0) const {
    FourierField out(m_);
    for (const auto& [k, c] : terms_)
      if (std::sqrt(detail::sq_norm(c)) > tol) out.terms_.emplace(k, c);
    return out;
  }

  FourierField operator+(const FourierField& o) const {
    FourierField out = *this;
    if (out.m_ == 0) out.m_ = o.m_;
    for (const auto& [k, c] : o.terms_) out.add(k, c);
    return out;
  }
  FourierField operator-(const FourierField& o) const { return *this + (cplx(-1.0) * o); }
  FourierField& operator+=(const FourierField& o) {
    if (m_ == 0) m_ = o.m_;
    for (const auto& [k, c] : o.terms_) add(k, c);
    return *this;
  }
  friend FourierField operator*(cplx s, const FourierField& f) {
    FourierField out(f.m_);
    for (const auto& [k, c] : f.terms_) out.terms_.emplace(k, s * c);
    return out;
  }

  /// Value at a point x.
  Coef evaluate(const std::vector<double>& x) const {
    require_dim(static_cast<int>(x.size()) == m_, "FourierField::evaluate: point dimension mismatch");
    Coef acc{};
    bool first = true;
    for (const auto& [k, c] : terms_) {
      double phase = 0.0;
      for (int i = 0; i < m_; ++i) phase += k[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
      const cplx w = std::polar(1.0, phase);
      if (first) {
        acc = w * c;
        first = false;
      } else {
        acc = acc + w * c;
      }
    }
    return acc;
  }

 private:
  int m_ = 0;
  map_type terms_;
};

using FourierSpinorField = FourierField<CVec, SpinorTag>;
using FourierSectionField = FourierField<CVec, SectionTag>;
using FourierSoField = FourierField<CMat, SoTag>;
using ScalarField = FourierField<cplx, ScalarTag>;

/// Convolution product with a bilinear coefficient rule: out_{p+q} += op(p, a_p, q, b_q).
template <class OutField, class FA, class FB, class Op>
OutField convolve(const FA& a, const FB& b, Op&& op) {
  OutField out(a.dim());
  for (const auto& [p, ca] : a.terms())
    for (const auto& [q, cb] : b.terms()) out.add(p + q, op(p, ca, q, cb));
  return out;
}

/// Constant totally antisymmetric 3-form H on T^m.
class TorusGeometry {
 public:
  struct Component {
    int i, j, k;
    double value;
  };

  explicit TorusGeometry(int m, const std::vector<Component>& h = {}) : m_(m), h_(static_cast<std::size_t>(m * m * m), 0.0) {
    require_dim(m > 0 && m <= kMaxDim, "TorusGeometry: dimension out of range");
    for (const auto& c : h) set(c.i, c.j, c.k, c.value);
    rebuild();
  }

  int dim() const { return m_; }
  double h(int i, int j, int k) const { return h_[index(i, j, k)]; }
  bool h_is_zero() const {
    for (double v : h_)
      if (v != 0.0) return false;
    return true;
  }
  /// H ^ . on forms.
  const CMat& h_wedge() const { return h_wedge_; }
  /// dx_{j+1} ^ . on forms.
  const CMat& wedge_dx(int j) const { return wedge_dx_[static_cast<std::size_t>(j)]; }
  /// H as a degree-3 form.
  Spinor h_form() const {
    Spinor s(m_);
    for (int i = 0; i < m_; ++i)
      for (int j = i + 1; j < m_; ++j)
        for (int k = j + 1; k < m_; ++k) s.coeffs()((1u << i) | (1u << j) | (1u << k)) = h(i, j, k);
    return s;
  }

  /// d^H block at frequency k: i sum_j k_j dx_j ^ + H ^.
  CMat dh_block(const Freq& k) const {
    CMat out = h_wedge_;
    for (int j = 0; j < m_; ++j)
      if (k[static_cast<std::size_t>(j)] != 0) out += cplx(0.0, k[static_cast<std::size_t>(j)]) * wedge_dx_[static_cast<std::size_t>(j)];
    return out;
  }

 private:
  std::size_t index(int i, int j, int k) const { return static_cast<std::size_t>((i * m_ + j) * m_ + k); }
  void set(int i, int j, int k, double v) {
    require_dim(i >= 0 && j >= 0 && k >= 0 && i < m_ && j < m_ && k < m_, "TorusGeometry: H index out of range");
    if (i == j || j == k || i == k) throw AxiomViolation("H component with repeated index", v);
    const int perm[6][3] = {{i, j, k}, {j, k, i}, {k, i, j}, {j, i, k}, {i, k, j}, {k, j, i}};
    for (int s = 0; s < 6; ++s) h_[index(perm[s][0], perm[s][1], perm[s][2])] = s < 3 ? v : -v;
  }
  void rebuild() {
    wedge_dx_.clear();
    for (int j = 0; j < m_; ++j) wedge_dx_.push_back(clifford_matrix(DoubleVector::basis_covector(m_, j)));
    h_wedge_ = build_h_wedge();
  }
  CMat build_h_wedge() const {
    const int size = spinor_size(m_);
    CMat out = CMat::Zero(size, size);
    for (int i = 0; i < m_; ++i)
      for (int j = i + 1; j < m_; ++j)
        for (int k = j + 1; k < m_; ++k)
          if (h(i, j, k) != 0.0) out += h(i, j, k) * (wedge_dx_[i] * wedge_dx_[j] * wedge_dx_[k]);
    return out;
  }

  int m_;
  std::vector<double> h_;
  std::vector<CMat> wedge_dx_;
  CMat h_wedge_;
};

inline FourierSpinorField dH_apply(const FourierSpinorField& f, const TorusGeometry& geom) {
  require_dim(f.dim() == geom.dim(), "dH_apply: dimension mismatch");
  return f.map([&](const Freq& k, const CVec& c) -> CVec { return geom.dh_block(k) * c; });
}

/// Apply a constant operator to every coefficient.
inline FourierSpinorField apply_constant(const CMat& op, const FourierSpinorField& f) {
  return f.map([&](const Freq&, const CVec& c) -> CVec { return op * c; });
}

/// Scalar function times a section (convolution).
inline FourierSectionField multiply(const ScalarField& f, const FourierSectionField& s) {
  return convolve<FourierSectionField>(f, s, [](const Freq&, cplx a, const Freq&, const CVec& c) -> CVec { return a * c; });
}

/// X(f) for the vector part X of a section.
inline ScalarField directional_derivative(const FourierSectionField& s, const ScalarField& f) {
  const int m = s.dim();
  return convolve<ScalarField>(s, f, [m](const Freq&, const CVec& c, const Freq& q, cplx a) -> cplx {
    cplx acc = 0.0;
    for (int j = 0; j < m; ++j) acc += c(j) * cplx(0.0, q[static_cast<std::size_t>(j)]);
    return acc * a;
  });
}

/// [[X + xi, Y + eta]] = [X, Y] + L_X eta - i_Y d xi - i_Y i_X H
inline FourierSectionField courant_bracket(const FourierSectionField& s1, const FourierSectionField& s2,
                                           const TorusGeometry& geom) {
  const int m = geom.dim();
  require_dim(s1.dim() == m && s2.dim() == m, "courant_bracket: dimension mismatch");
  return convolve<FourierSectionField>(s1, s2, [&](const Freq& p, const CVec& a, const Freq& q, const CVec& b) -> CVec {
    const auto x = a.head(m);
    const auto xi = a.tail(m);
    const auto y = b.head(m);
    const auto eta = b.tail(m);
    CVec out = CVec::Zero(2 * m);
    cplx x_dq = 0.0, y_dp = 0.0, x_eta = 0.0;
    for (int j = 0; j < m; ++j) {
      x_dq += x(j) * cplx(0.0, q[static_cast<std::size_t>(j)]);
      y_dp += y(j) * cplx(0.0, p[static_cast<std::size_t>(j)]);
      x_eta += x(j) * eta(j);
    }
    // [X, Y]^i = X(Y^i) - Y(X^i)
    out.head(m) = x_dq * y - y_dp * x;
    cplx y_xi = 0.0;
    for (int j = 0; j < m; ++j) y_xi += y(j) * xi(j);
    for (int l = 0; l < m; ++l) {
      const cplx ipl = cplx(0.0, p[static_cast<std::size_t>(l)]);
      // L_X eta = i_X d eta + d i_X eta
      cplx v = x_dq * eta(l) + ipl * x_eta;
      // - i_Y d xi
      v += -y_dp * xi(l) + ipl * y_xi;
      // - i_Y i_X H = -H(X, Y, .)
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) v -= x(i) * y(j) * geom.h(i, j, l);
      out(m + l) = v;
    }
    return out;
  });
}

/// N(a, b, c) = -2 < [[X_a, X_b]], X_c > on the conjugate frame X_a = conj(l_a) of Lbar.
class NijenhuisTensor {
 public:
  explicit NijenhuisTensor(int size) : size_(size), values_(static_cast<std::size_t>(size * size * size), 0.0) {}
  int size() const { return size_; }
  cplx operator()(int a, int b, int c) const { return values_[idx(a, b, c)]; }
  cplx& operator()(int a, int b, int c) { return values_[idx(a, b, c)]; }
  double max_abs() const {
    double s = 0.0;
    for (const auto& v : values_) s = std::max(s, std::abs(v));
    return s;
  }
  /// max over permutations of |N(sigma) - sign(sigma) N|
  double antisymmetry_residual() const {
    double worst = 0.0;
    for (int a = 0; a < size_; ++a)
      for (int b = 0; b < size_; ++b)
        for (int c = 0; c < size_; ++c) {
          const cplx v = (*this)(a, b, c);
          worst = std::max({worst, std::abs(v + (*this)(b, a, c)), std::abs(v + (*this)(a, c, b)), std::abs(v + (*this)(c, b, a))});
        }
    return worst;
  }

 private:
  std::size_t idx(int a, int b, int c) const { return static_cast<std::size_t>((a * size_ + b) * size_ + c); }
  int size_;
  std::vector<cplx> values_;
};

/// Nijenhuis tensor of a constant structure, through the Courant bracket of
/// constant sections.
inline NijenhuisTensor nijenhuis(const GeneralizedComplexStructure& j, const TorusGeometry& geom) {
  const int m = j.dim();
  require_dim(geom.dim() == m, "nijenhuis: dimension mismatch");
  const CMat lbar = j.l_frame().conjugate();
  const int r = static_cast<int>(lbar.cols());
  std::vector<FourierSectionField> sections;
  for (int a = 0; a < r; ++a) sections.push_back(FourierSectionField::constant(m, lbar.col(a)));
  NijenhuisTensor out(r);
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b) {
      const FourierSectionField br = courant_bracket(sections[a], sections[b], geom);
      const CVec* c0 = br.find(zero_freq(m));
      const CVec bracket = c0 ? *c0 : CVec::Zero(2 * m);
      for (int c = 0; c < r; ++c)
        out(a, b, c) = -2.0 * natural_pairing(DoubleVector(m, bracket), DoubleVector(m, CVec(lbar.col(c))));
    }
  return out;
}

/// Clifford action of N as an element of wedge^3 L:
///   (1/6) sum N(l'_a, l'_b, l'_c) l_a l_b l_c,
/// with l' the frame of Lbar dual to the L frame (2 <l_a, l'_b> = delta).
inline CMat nijenhuis_action(const GeneralizedComplexStructure& j, const NijenhuisTensor& n) {
  const int m = j.dim();
  const CMat& l = j.l_frame();
  const int r = static_cast<int>(l.cols());
  const CMat p = pairing_matrix(m).cast<cplx>();
  const CMat gram = 2.0 * l.transpose() * p * l.conjugate();  // M_ac = 2 <l_a, conj(l_c)>
  const CMat minv = gram.inverse();
  std::vector<CMat> act;
  for (int a = 0; a < r; ++a) act.push_back(clifford_matrix(m, l.col(a)));
  const int size = spinor_size(m);
  CMat out = CMat::Zero(size, size);
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b)
      for (int c = 0; c < r; ++c) {
        cplx coef = 0.0;
        for (int x = 0; x < r; ++x)
          for (int y = 0; y < r; ++y)
            for (int z = 0; z < r; ++z) coef += minv(x, a) * minv(y, b) * minv(z, c) * n(x, y, z);
        if (coef != cplx(0.0)) out += coef * act[a] * act[b] * act[c];
      }
  return out / 6.0;
}

/// Splitting of d^H by the grading of a single structure: for each shift s,
/// blocks i sum_j k_j W_j[s] + Hs[s] with W_j[s] = sum_k Pi^{k+s} dx_j Pi^k.
class GradedDh {
 public:
  GradedDh(const GeneralizedComplexStructure& j, const TorusGeometry& geom) : m_(j.dim()) {
    const int n = j.half_dim();
    for (int s = -2 * n; s <= 2 * n; ++s) {
      std::vector<CMat> w;
      CMat hs = CMat::Zero(spinor_size(m_), spinor_size(m_));
      for (int jj = 0; jj < m_; ++jj) w.push_back(hs);
      for (int k = -n; k <= n; ++k) {
        if (k + s < -n || k + s > n) continue;
        const CMat src = j.projector(k);
        const CMat dst = j.projector(k + s);
        for (int jj = 0; jj < m_; ++jj) w[jj] += dst * geom.wedge_dx(jj) * src;
        hs += dst * geom.h_wedge() * src;
      }
      shifts_.emplace(s, Blocks{std::move(w), std::move(hs)});
    }
  }
  CMat block(int shift, const Freq& k) const {
    auto it = shifts_.find(shift);
    if (it == shifts_.end()) return CMat::Zero(spinor_size(m_), spinor_size(m_));
    CMat out = it->second.h;
    for (int jj = 0; jj < m_; ++jj)
      if (k[jj] != 0) out += cplx(0.0, k[jj]) * it->second.w[jj];
    return out;
  }
  std::vector<int> shifts() const {
    std::vector<int> out;
    for (const auto& [s, b] : shifts_) out.push_back(s);
    return out;
  }

 private:
  struct Blocks {
    std::vector<CMat> w;
    CMat h;
  };
  int m_;
  std::map<int, Blocks> shifts_;
};

/// Same splitting relative to the bigrading of a Hermitian pair.
class BigradedDh {
 public:
  BigradedDh(const HermitianPair& pair, const TorusGeometry& geom) : m_(pair.dim()) {
    require_dim(pair.dim() == geom.dim(), "BigradedDh: dimension mismatch");
    const auto& grades = pair.bigraded();
    for (const auto& [src, psrc] : grades)
      for (const auto& [dst, pdst] : grades) {
        const Bidegree s{dst.first - src.first, dst.second - src.second};
        auto it = shifts_.find(s);
        if (it == shifts_.end()) {
          Blocks blank;
          blank.h = CMat::Zero(spinor_size(m_), spinor_size(m_));
          blank.w.assign(static_cast<std::size_t>(m_), blank.h);
          it = shifts_.emplace(s, std::move(blank)).first;
        }
        for (int jj = 0; jj < m_; ++jj) it->second.w[jj] += pdst * geom.wedge_dx(jj) * psrc;
        it->second.h += pdst * geom.h_wedge() * psrc;
      }
  }
  int dim() const { return m_; }
  CMat block(const Bidegree& shift, const Freq& k) const {
    auto it = shifts_.find(shift);
    if (it == shifts_.end()) return CMat::Zero(spinor_size(m_), spinor_size(m_));
    CMat out = it->second.h;
    for (int jj = 0; jj < m_; ++jj)
      if (k[jj] != 0) out += cplx(0.0, k[jj]) * it->second.w[jj];
    return out;
  }
  /// Shifts whose operator is not identically zero.
  std::vector<Bidegree> active_shifts(double tol = 1e-12) const {
    std::vector<Bidegree> out;
    for (const auto& [s, b] : shifts_) {
      double mx = max_abs(b.h);
      for (const auto& w : b.w) mx = std::max(mx, max_abs(w));
      if (mx > tol) out.push_back(s);
    }
    return out;
  }
  FourierSpinorField apply(const Bidegree& shift, const FourierSpinorField& f) const {
    return f.map([&](const Freq& k, const CVec& c) -> CVec { return block(shift, k) * c; });
  }

 private:
  struct Blocks {
    std::vector<CMat> w;
    CMat h;
  };
  int m_;
  std::map<Bidegree, Blocks> shifts_;
};

/// Shifts permitted by the bigraded decomposition of d^H.
inline bool is_listed_shift(const Bidegree& s) {
  const int a = std::abs(s.first), b = std::abs(s.second);
  return (a == 1 || a == 3) && (b == 1 || b == 3);
}

using ComponentMap = std::map<Bidegree, FourierSpinorField>;

/// Components of d^H f by bidegree shift; sums to dH_apply(f).
inline ComponentMap dH_components(const FourierSpinorField& f, const HermitianPair& pair, const TorusGeometry& geom) {
  const BigradedDh split(pair, geom);
  ComponentMap out;
  for (const auto& s : split.active_shifts()) {
    FourierSpinorField c = split.apply(s, f);
    if (c.norm() > 0.0) out.emplace(s, std::move(c));
  }
  return out;
}

struct IntegrabilityResult {
  bool integrable = false;
  double residual = 0.0;
};

/// d^H must map U^n to U^{n-1} and U^k into U^{k-1} + U^{k+1}; residual is the
/// relative norm of everything else, on the canonical generator and on
/// seeded random U^k fields.
inline IntegrabilityResult integrability_check(const GeneralizedComplexStructure& j, const TorusGeometry& geom,
                                               double tol = 1e-10, unsigned seed = 7, int samples = 4) {
  const int m = j.dim();
  const int n = j.half_dim();
  const GradedDh split(j, geom);
  double worst = 0.0;
  {
    const CVec& gen = j.canonical().coeffs();
    const CVec image = geom.h_wedge() * gen;
    const CVec bad = image - j.projector(n - 1) * image;
    worst = std::max(worst, bad.norm() / gen.norm());
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<int> freq(-2, 2);
  const int size = spinor_size(m);
  for (int s = 0; s < samples; ++s)
    for (int k = -n; k <= n; ++k) {
      Freq q(static_cast<std::size_t>(m));
      for (auto& v : q) v = freq(rng);
      CVec c(size);
      for (int i = 0; i < size; ++i) c(i) = cplx(normal(rng), normal(rng));
      c = j.projector(k) * c;
      if (c.norm() == 0.0) continue;
      CVec bad = CVec::Zero(size);
      for (int sh : split.shifts())
        if (std::abs(sh) != 1) bad += split.block(sh, q) * c;
      worst = std::max(worst, bad.norm() / c.norm());
    }
  return {worst < tol, worst};
}

/// Field of 2-forms d xi for a 1-form field xi (covector part of a section), as
/// B-field elements of so(V + V*).
inline FourierSoField exterior_derivative_b_field(const FourierSectionField& xi) {
  const int m = xi.dim();
  return xi.map<SoTag>([m](const Freq& k, const CVec& c) -> CMat {
    CMat b = CMat::Zero(m, m);
    for (int i = 0; i < m; ++i)
      for (int l = 0; l < m; ++l) b(i, l) = cplx(0.0, k[static_cast<std::size_t>(i)]) * c(m + l) - cplx(0.0, k[static_cast<std::size_t>(l)]) * c(m + i);
    return SoDouble::b_field(b).matrix();
  });
}

}  // namespace gks
