#pragma once

// Deformation families a_t of J1 on flat tori with a built-in existence oracle.

#include "gks/series.hpp"

namespace gks {

/// T^{1,0} part (v - i J v)/2 of a real vector.
inline CVec holomorphic_part(const RMat& jv, const RVec& v) {
  return 0.5 * (v.cast<cplx>() - kI * (jv * v).cast<cplx>());
}

/// The constant bivector u' ^ w' with u', w' the T^{1,0} parts of u, w;
/// beta_ij = u'_i w'_j - u'_j w'_i (a holomorphic Poisson bivector when constant).
inline CMat holomorphic_bivector(const RMat& jv, const RVec& u, const RVec& w, cplx scale = 1.0) {
  const CVec a = holomorphic_part(jv, u);
  const CVec b = holomorphic_part(jv, w);
  return scale * (a * b.transpose() - b * a.transpose());
}

/// a_t = t (beta + conj(beta)) for a constant complex bivector beta.
inline SeriesSoField constant_bivector_family(const CMat& beta) {
  const int m = static_cast<int>(beta.rows());
  SeriesSoField a(m, 1);
  const CMat real = beta + beta.conjugate();
  a.at(1) = FourierSoField::constant(m, SoDouble::bivector(real).matrix());
  return a;
}

/// a_t = t (f beta + conj(f beta)) for a scalar field f (integrable only when
/// f beta is holomorphic).
inline SeriesSoField modulated_bivector_family(const CMat& beta, const ScalarField& f) {
  const int m = static_cast<int>(beta.rows());
  const CMat bso = SoDouble::bivector(beta).matrix();
  FourierSoField field(m);
  for (const auto& [k, c] : f.terms()) field.add(k, c * bso);
  SeriesSoField a(m, 1);
  a.at(1) = field + field.conjugate();
  return a;
}

/// Real 1-form field xi = sum A cos(<k,x> + phase) dx_j, stored as sections.
struct CosineTerm {
  Freq freq;
  int component;
  double amplitude;
  double phase = 0.0;
};

inline FourierSectionField cosine_one_form(int m, const std::vector<CosineTerm>& terms) {
  FourierSectionField xi(m);
  for (const auto& t : terms) {
    require_dim(static_cast<int>(t.freq.size()) == m && t.component >= 0 && t.component < m, "cosine_one_form: bad term");
    CVec c = CVec::Zero(2 * m);
    c(m + t.component) = 0.5 * t.amplitude * std::polar(1.0, t.phase);
    xi.add(t.freq, c);
    xi.add(-t.freq, c.conjugate());
  }
  return xi.pruned();
}

/// Split of the B-field d xi relative to J1.
struct ExactBFieldFamily {
  SeriesSoField transverse;  // a_t = t (d xi)^{(2,0)+(0,2)}
  SeriesSoField stabilizer;  // t (d xi)^{(1,1)}, a gauge of J1
};

/// e^{t d xi} = e^{a_t} e^{c_t} with a_t transverse and c_t in the stabilizer
/// of J1 (all B-fields commute); e^{t d xi} psi is closed for closed psi.
inline ExactBFieldFamily exact_b_field_family(const FourierSectionField& xi, const GeneralizedComplexStructure& j1) {
  const int m = xi.dim();
  const FourierSoField b = exterior_derivative_b_field(xi);
  FourierSoField trans(m), stab(m);
  for (const auto& [k, c] : b.terms()) {
    const auto parts = split_transverse(SoDouble(m, c), j1);
    trans.add(k, parts.transverse.matrix());
    stab.add(k, parts.stabilizer.matrix());
  }
  ExactBFieldFamily out{SeriesSoField(m, 1), SeriesSoField(m, 1)};
  out.transverse.at(1) = trans.pruned(1e-15);
  out.stabilizer.at(1) = stab.pruned(1e-15);
  return out;
}

/// Full B-field series t d xi.
inline SeriesSoField b_field_series(const FourierSectionField& xi) {
  SeriesSoField s(xi.dim(), 1);
  s.at(1) = exterior_derivative_b_field(xi);
  return s;
}

/// c_t = t f(x) J1: a stabilizer gauge built from a real scalar field f.
inline SeriesSoField structure_rotation_gauge(const GeneralizedComplexStructure& j1, const ScalarField& f) {
  const int m = j1.dim();
  const CMat jc = j1.matrix().cast<cplx>();
  FourierSoField field(m);
  for (const auto& [k, c] : f.terms()) field.add(k, c * jc);
  SeriesSoField out(m, 1);
  out.at(1) = field;
  return out;
}

/// Real scalar field A cos(<k, x>).
inline ScalarField cosine_scalar(const Freq& k, double amplitude) {
  ScalarField f(static_cast<int>(k.size()));
  f.add(k, 0.5 * amplitude);
  f.add(-k, 0.5 * amplitude);
  return f;
}

}  // namespace gks
