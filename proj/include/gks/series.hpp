#pragma once

// Truncated power series in t whose coefficients are torus fields, and the
// exponential actions e^{d_rho(a_t)} on spinor series. Every factor carries
// t-order >= 1, so truncation at order K is exact.

#include <vector>

#include "gks/torus_fields.hpp"

namespace gks {

struct SpinOpTag {};
/// Field of 2^m x 2^m operators (spin actions of so-valued fields).
using FourierSpinOpField = FourierField<CMat, SpinOpTag>;

/// so(V + V*)-valued series a_t = sum_j a_j t^j.
class SeriesSoField {
 public:
  SeriesSoField() = default;
  SeriesSoField(int m, int order) : m_(m), orders_(static_cast<std::size_t>(order + 1), FourierSoField(m)) {}

  int dim() const { return m_; }
  int order() const { return static_cast<int>(orders_.size()) - 1; }
  const FourierSoField& at(int j) const { return orders_.at(static_cast<std::size_t>(j)); }
  FourierSoField& at(int j) { return orders_.at(static_cast<std::size_t>(j)); }
  /// Coefficient at order j, empty when j exceeds the stored order.
  FourierSoField coefficient(int j) const { return j <= order() ? at(j) : FourierSoField(m_); }

  void resize(int order) { orders_.resize(static_cast<std::size_t>(order + 1), FourierSoField(m_)); }

  bool is_real(double tol = 1e-12) const {
    for (const auto& f : orders_)
      if (!f.is_real(tol)) return false;
    return true;
  }
  bool zero_constant_term() const { return orders_.empty() || orders_[0].norm() == 0.0; }

  /// Pointwise value sum_j t^j a_j(x) as a 2m x 2m matrix.
  CMat evaluate(double t, const std::vector<double>& x) const {
    CMat out = CMat::Zero(2 * m_, 2 * m_);
    double tp = 1.0;
    for (const auto& f : orders_) {
      if (!f.empty()) out += tp * f.evaluate(x);
      tp *= t;
    }
    return out;
  }

  SeriesSoField operator-() const {
    SeriesSoField out = *this;
    for (auto& f : out.orders_) f = cplx(-1.0) * f;
    return out;
  }

 private:
  int m_ = 0;
  std::vector<FourierSoField> orders_;
};

/// Spinor-field series psi_t = sum_j psi_j t^j.
class SeriesSpinorField {
 public:
  SeriesSpinorField() = default;
  SeriesSpinorField(int m, int order) : m_(m), orders_(static_cast<std::size_t>(order + 1), FourierSpinorField(m)) {}

  static SeriesSpinorField constant_term(const FourierSpinorField& f, int order) {
    SeriesSpinorField s(f.dim(), order);
    s.at(0) = f;
    return s;
  }

  int dim() const { return m_; }
  int order() const { return static_cast<int>(orders_.size()) - 1; }
  const FourierSpinorField& at(int j) const { return orders_.at(static_cast<std::size_t>(j)); }
  FourierSpinorField& at(int j) { return orders_.at(static_cast<std::size_t>(j)); }

  SeriesSpinorField& operator+=(const SeriesSpinorField& o) {
    for (int j = 0; j <= std::min(order(), o.order()); ++j) at(j) += o.at(j);
    return *this;
  }

 private:
  int m_ = 0;
  std::vector<FourierSpinorField> orders_;
};

inline FourierSpinOpField spin_field(const FourierSoField& a) {
  const int m = a.dim();
  FourierSpinOpField out(m);
  for (const auto& [k, c] : a.terms()) out.add(k, spin_matrix(SoDouble(m, c)));
  return out;
}

/// Pointwise product of an operator field with a spinor field.
inline FourierSpinorField act(const FourierSpinOpField& op, const FourierSpinorField& f) {
  return convolve<FourierSpinorField>(op, f, [](const Freq&, const CMat& a, const Freq&, const CVec& c) -> CVec { return a * c; });
}

/// Pointwise matrix product of two so-valued (2m x 2m) fields.
inline FourierSoField matrix_product(const FourierSoField& a, const FourierSoField& b) {
  return convolve<FourierSoField>(a, b, [](const Freq&, const CMat& x, const Freq&, const CMat& y) -> CMat { return x * y; });
}

namespace detail {

inline std::vector<FourierSpinOpField> spin_series(const SeriesSoField& a) {
  std::vector<FourierSpinOpField> out;
  for (int j = 0; j <= a.order(); ++j) out.push_back(spin_field(a.at(j)));
  return out;
}

/// (X_t psi_t) truncated at order K, X_t = sum_{j>=1} X_j t^j.
inline SeriesSpinorField multiply(const std::vector<FourierSpinOpField>& x, const SeriesSpinorField& psi, int order) {
  const int m = psi.dim();
  SeriesSpinorField out(m, order);
  for (int j = 1; j < static_cast<int>(x.size()); ++j) {
    if (x[static_cast<std::size_t>(j)].empty()) continue;
    for (int i = 0; i + j <= order && i <= psi.order(); ++i) {
      if (psi.at(i).empty()) continue;
      out.at(i + j) += act(x[static_cast<std::size_t>(j)], psi.at(i));
    }
  }
  for (int j = 0; j <= order; ++j) out.at(j) = out.at(j).pruned();
  return out;
}

}  // namespace detail

/// e^{d_rho(a_t)} psi_t truncated at `order`; a must have zero constant term.
inline SeriesSpinorField exp_action(const SeriesSoField& a, const SeriesSpinorField& psi, int order) {
  if (!a.zero_constant_term()) throw Error("exp_action: series must vanish at t = 0");
  const auto x = detail::spin_series(a);
  SeriesSpinorField result(psi.dim(), order);
  for (int j = 0; j <= std::min(order, psi.order()); ++j) result.at(j) = psi.at(j);
  SeriesSpinorField term = result;
  for (int s = 1; s <= order; ++s) {
    term = detail::multiply(x, term, order);
    for (int j = 0; j <= order; ++j) term.at(j) = cplx(1.0 / s) * term.at(j);
    result += term;
  }
  return result;
}

/// e^{f_1} ... e^{f_r} psi, rightmost factor applied first.
inline SeriesSpinorField exp_chain_action(const std::vector<SeriesSoField>& factors, const SeriesSpinorField& psi, int order) {
  SeriesSpinorField cur = psi;
  for (auto it = factors.rbegin(); it != factors.rend(); ++it) cur = exp_action(*it, cur, order);
  return cur;
}

/// e^{d_rho(a_t)} e^{d_rho(b_t)} psi
inline SeriesSpinorField series_exp_action(const SeriesSoField& a, const SeriesSoField& b, const FourierSpinorField& psi,
                                           int order) {
  return exp_chain_action({a, b}, SeriesSpinorField::constant_term(psi, order), order);
}

/// Apply d^H order by order.
inline SeriesSpinorField dH_series(const SeriesSpinorField& s, const TorusGeometry& geom) {
  SeriesSpinorField out(s.dim(), s.order());
  for (int j = 0; j <= s.order(); ++j) out.at(j) = dH_apply(s.at(j), geom);
  return out;
}

/// Conjugation e^{a_t} Y e^{-a_t} of a 2m x 2m matrix series, by
/// sum_n ad_{a}^n Y / n!, truncated at `order`.
inline SeriesSoField conjugate_series(const SeriesSoField& a, const SeriesSoField& y, int order) {
  const int m = y.dim();
  auto mult = [&](const SeriesSoField& l, const SeriesSoField& r) {
    SeriesSoField out(m, order);
    for (int i = 0; i <= std::min(order, l.order()); ++i)
      for (int j = 0; i + j <= order && j <= r.order(); ++j) {
        if (l.at(i).empty() || r.at(j).empty()) continue;
        out.at(i + j) += matrix_product(l.at(i), r.at(j));
      }
    return out;
  };
  SeriesSoField result(m, order);
  for (int j = 0; j <= std::min(order, y.order()); ++j) result.at(j) = y.at(j);
  SeriesSoField term = result;
  for (int s = 1; s <= order; ++s) {
    const SeriesSoField left = mult(a, term);
    const SeriesSoField right = mult(term, a);
    SeriesSoField next(m, order);
    for (int j = 0; j <= order; ++j) next.at(j) = (cplx(1.0 / s) * (left.at(j) - right.at(j))).pruned();
    term = next;
    for (int j = 0; j <= order; ++j) result.at(j) += term.at(j);
  }
  return result;
}

}  // namespace gks
