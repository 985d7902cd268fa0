#pragma once

// Order-by-order construction of b_t = sum (beta_j + conj beta_j) t^j with
// d^H (e^{a_t} e^{b_t} psi) = 0 up to a prescribed order, over a constant
// generalized Kaehler background on the flat torus.

#include <chrono>
#include <cstdio>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "gks/deformations.hpp"
#include "gks/hodge.hpp"

namespace gks {

namespace detail {

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

}  // namespace detail

enum class InductionFailure {
  prior_residual,
  leakage,
  closedness,       // delta_+ rho^{1,n-1} = ... = 0
  sum_identity,     // the four-term sum vanishes
  phi_mismatch,     // the two expressions for phi disagree
  dphi_mismatch,    // d^H phi != rho
  singular_system,  // beta psi = phi not solvable
  reconstruction,
};

inline const char* to_string(InductionFailure f) {
  switch (f) {
    case InductionFailure::prior_residual: return "prior_residual";
    case InductionFailure::leakage: return "leakage";
    case InductionFailure::closedness: return "closedness";
    case InductionFailure::sum_identity: return "sum_identity";
    case InductionFailure::phi_mismatch: return "phi_mismatch";
    case InductionFailure::dphi_mismatch: return "dphi_mismatch";
    case InductionFailure::singular_system: return "singular_system";
    case InductionFailure::reconstruction: return "reconstruction";
  }
  return "unknown";
}

class InductionError : public Error {
 public:
  InductionError(InductionFailure kind, int order, double residual)
      : Error(std::string("induction step ") + std::to_string(order) + ": " + to_string(kind) + " (residual " +
              detail::sci(residual) + ")"),
        kind_(kind),
        order_(order),
        residual_(residual) {}
  InductionFailure kind() const noexcept { return kind_; }
  int order() const noexcept { return order_; }
  double residual() const noexcept { return residual_; }

 private:
  InductionFailure kind_;
  int order_;
  double residual_;
};

/// The deformation a_t is not integrable (or psi is not admissible).
class PreconditionError : public Error {
 public:
  PreconditionError(const std::string& what, int order, double residual)
      : Error(what + " at order " + std::to_string(order) + " (residual " + detail::sci(residual) + ")"),
        order_(order),
        residual_(residual) {}
  int order() const noexcept { return order_; }
  double residual() const noexcept { return residual_; }

 private:
  int order_;
  double residual_;
};

struct SolverTolerances {
  double residual = 1e-9;   // per-order ||(d^H psi_t)_j|| relative to ||psi||
  double identity = 1e-10;  // leakage, closedness, sum and phi identities (relative to max(1, ||rho||))
  double dphi = 1e-9;
  double precondition = 1e-9;
  double green_cutoff = 1e-10;
};

struct SolverOptions {
  int order = 4;
  SolverTolerances tol;
  std::vector<SeriesSoField> gauges;  // stabilizer factors applied after e^{a_t}
  bool cross_check = false;           // conjugated form of rho
  bool check_precondition = true;
};

inline constexpr int kMaxOrder = 8;

/// rho and its four admissible components at one order.
struct OrderResidual {
  int order = 0;
  FourierSpinorField rho;
  FourierSpinorField rho_p1_top;  // rho^{1, n-1}
  FourierSpinorField rho_m1_top;  // rho^{-1, n-1}
  FourierSpinorField rho_p1_low;  // rho^{1, n-3}
  FourierSpinorField rho_m1_low;  // rho^{-1, n-3}
  double leakage = 0.0;
  double closedness = 0.0;
  double sum_identity = 0.0;
  double scale = 1.0;
};

struct OrderRecord {
  int order = 0;
  FourierSoField beta;
  double beta_norm = 0.0;
  double rho_norm = 0.0;
  double residual_norm = 0.0;  // after b_k is set
  double leakage = 0.0;
  double closedness = 0.0;
  double sum_identity = 0.0;
  double phi_mismatch = 0.0;
  double dphi_residual = 0.0;
  double reconstruction = 0.0;
  double grading = 0.0;  // beta psi outside U^{0,n-2}
  double cross_check = -1.0;
  double precondition = 0.0;
  double wall_ms = 0.0;
};

struct SolutionReport {
  int order = 0;
  int dim = 0;
  SolverTolerances tol;
  double psi_norm = 0.0;
  std::vector<OrderRecord> orders;
  SeriesSoField a;
  std::vector<SeriesSoField> gauges;
  SeriesSoField b;
  SeriesSpinorField psi;
  SeriesSoField j1t;
  SeriesSoField j2t;
  bool passed = false;

  double max_residual() const {
    double r = 0.0;
    for (const auto& o : orders) r = std::max(r, o.residual_norm);
    return r;
  }
  /// e^{a} e^{gauges...} as a chain of factors.
  std::vector<SeriesSoField> deformation_factors() const {
    std::vector<SeriesSoField> out{a};
    out.insert(out.end(), gauges.begin(), gauges.end());
    return out;
  }
};

inline FourierSpinorField project(const CMat& pr, const FourierSpinorField& f) {
  return f.map([&](const Freq&, const CVec& c) -> CVec { return pr * c; }).pruned();
}

namespace detail {

inline double scaled(double r, double s) { return r / std::max(1.0, s); }

inline std::vector<SeriesSoField> negated_reverse(const std::vector<SeriesSoField>& factors) {
  std::vector<SeriesSoField> out;
  for (auto it = factors.rbegin(); it != factors.rend(); ++it) out.push_back(-*it);
  return out;
}

inline void require_series(const SeriesSoField& s, int m, const char* what) {
  require_dim(s.dim() == m, what);
  if (!s.zero_constant_term()) throw Error(std::string(what) + ": order-0 term must vanish");
}

}  // namespace detail

/// rho = order-k coefficient of d^H(e^{factors} e^{b_{<k}} psi), with the
/// four-space decomposition and the closedness identities. Throws
/// InductionError on the first violated structural property when validate.
inline OrderResidual order_residual(int k, const std::vector<SeriesSoField>& factors, const SeriesSoField& b_lower,
                                    const FourierSpinorField& psi, const HermitianPair& pair, const TorusGeometry& geom,
                                    const SolverTolerances& tol = {}, bool validate = true) {
  const int n = pair.half_dim();
  std::vector<SeriesSoField> chain = factors;
  chain.push_back(b_lower);
  const SeriesSpinorField series = exp_chain_action(chain, SeriesSpinorField::constant_term(psi, k), k);
  const double psi_scale = std::max(1.0, psi.norm());
  if (validate)
    for (int j = 0; j < k; ++j) {
      const double r = dH_apply(series.at(j), geom).norm() / psi_scale;
      if (r > tol.residual) throw InductionError(InductionFailure::prior_residual, k, r);
    }

  OrderResidual out;
  out.order = k;
  out.rho = dH_apply(series.at(k), geom).pruned();
  out.scale = out.rho.norm();
  out.rho_p1_top = project(pair.projector(1, n - 1), out.rho);
  out.rho_m1_top = project(pair.projector(-1, n - 1), out.rho);
  out.rho_p1_low = project(pair.projector(1, n - 3), out.rho);
  out.rho_m1_low = project(pair.projector(-1, n - 3), out.rho);
  out.leakage = detail::scaled((out.rho - out.rho_p1_top - out.rho_m1_top - out.rho_p1_low - out.rho_m1_low).norm(), out.scale);

  const BigradedDh split(pair, geom);
  using namespace shifts;
  const double c1 = split.apply(delta_plus, out.rho_p1_top).norm();
  const double c2 = split.apply(delta_plus_bar, out.rho_m1_low).norm();
  const double c3 = split.apply(delta_minus, out.rho_p1_low).norm();
  const double c4 = split.apply(delta_minus_bar, out.rho_m1_top).norm();
  out.closedness = detail::scaled(std::max({c1, c2, c3, c4}), out.scale);
  const FourierSpinorField sum = split.apply(delta_minus, out.rho_m1_top) + split.apply(delta_minus_bar, out.rho_p1_low) +
                                 split.apply(delta_plus, out.rho_m1_low) + split.apply(delta_plus_bar, out.rho_p1_top);
  out.sum_identity = detail::scaled(sum.norm(), out.scale);

  if (validate) {
    if (out.leakage > tol.identity) throw InductionError(InductionFailure::leakage, k, out.leakage);
    if (out.closedness > tol.identity) throw InductionError(InductionFailure::closedness, k, out.closedness);
    if (out.sum_identity > tol.identity) throw InductionError(InductionFailure::sum_identity, k, out.sum_identity);
  }
  return out;
}

/// Order-k term of e^{-b} e^{-F} d^H e^{F} e^{b} psi.
inline FourierSpinorField conjugated_residual(int k, const std::vector<SeriesSoField>& factors, const SeriesSoField& b,
                                              const FourierSpinorField& psi, const TorusGeometry& geom) {
  std::vector<SeriesSoField> chain = factors;
  chain.push_back(b);
  const SeriesSpinorField up = exp_chain_action(chain, SeriesSpinorField::constant_term(psi, k), k);
  const SeriesSpinorField d = dH_series(up, geom);
  return exp_chain_action(detail::negated_reverse(chain), d, k).at(k).pruned();
}

struct PhiResult {
  FourierSpinorField phi;
  FourierSpinorField alternative;
  double mismatch = 0.0;
  double dphi_residual = 0.0;
};

/// phi = G(delta_- rho^{-1,n-1} + deltabar_- rho^{1,n-3}); also evaluates
/// -G(delta_+ rho^{-1,n-3} + deltabar_+ rho^{1,n-1}) and d^H phi - rho.
inline PhiResult solve_phi(const OrderResidual& r, const HermitianPair& pair, const TorusGeometry& geom,
                           const SolverTolerances& tol = {}, bool validate = true) {
  using namespace shifts;
  const GreenOperator green(pair, geom, delta_plus);
  const BigradedDh& split = green.split();
  PhiResult out;
  const FourierSpinorField src = split.apply(delta_minus, r.rho_m1_top) + split.apply(delta_minus_bar, r.rho_p1_low);
  const FourierSpinorField alt = split.apply(delta_plus, r.rho_m1_low) + split.apply(delta_plus_bar, r.rho_p1_top);
  out.phi = green.apply(src).pruned();
  out.alternative = (cplx(-1.0) * green.apply(alt)).pruned();
  out.mismatch = detail::scaled((out.phi - out.alternative).norm(), r.scale);
  out.dphi_residual = detail::scaled((dH_apply(out.phi, geom) - r.rho).norm(), r.scale);
  if (validate) {
    if (out.mismatch > tol.identity) throw InductionError(InductionFailure::phi_mismatch, r.order, out.mismatch);
    if (out.dphi_residual > tol.dphi) throw InductionError(InductionFailure::dphi_mismatch, r.order, out.dphi_residual);
  }
  return out;
}

/// Basis l^-_i . l^+_j . psi of U^{0,n-2} with l^- in V_-^{1,0}, l^+ in V_+^{0,1}.
struct BetaBasis {
  std::vector<SoDouble> elements;  // so elements with d_rho = l^-_i l^+_j
  CMat images;                     // columns d_rho(element) psi
};

inline BetaBasis beta_basis(const CVec& psi, const HermitianPair& pair) {
  const int m = pair.dim();
  const int n = pair.half_dim();
  const CMat lm = pair.vminus10();
  const CMat lp = pair.vplus01();
  BetaBasis out;
  out.images = CMat::Zero(psi.size(), n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const CVec u = lm.col(i);
      const CVec w = lp.col(j);
      out.elements.push_back(SoDouble::wedge(DoubleVector(m, u), DoubleVector(m, w)));
      out.images.col(i * n + j) = detail::clifford_apply(m, u, detail::clifford_apply(m, w, psi));
    }
  return out;
}

struct BetaResult {
  FourierSoField beta;
  double reconstruction = 0.0;
  double grading = 0.0;
};

/// Solve beta . psi = phi per frequency over the beta basis.
inline BetaResult beta_from_phi(const FourierSpinorField& phi, const CVec& psi, const HermitianPair& pair,
                                double tol = 1e-10, int order = 0, bool validate = true) {
  const int m = pair.dim();
  const int n = pair.half_dim();
  const BetaBasis basis = beta_basis(psi, pair);
  Eigen::JacobiSVD<CMat> svd(basis.images, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVec& sv = svd.singularValues();
  const double cond = sv(sv.size() - 1) / std::max(sv(0), 1e-300);
  if (cond < 1e-10) throw InductionError(InductionFailure::singular_system, order, cond);

  BetaResult out{FourierSoField(m), 0.0, 0.0};
  FourierSpinorField recon(m);
  const CMat pr = pair.projector(0, n - 2);
  for (const auto& [k, c] : phi.terms()) {
    const CVec coef = svd.solve(c);
    CMat beta = CMat::Zero(2 * m, 2 * m);
    for (Eigen::Index i = 0; i < coef.size(); ++i) beta += coef(i) * basis.elements[static_cast<std::size_t>(i)].matrix();
    out.beta.add(k, beta);
    const CVec image = basis.images * coef;
    recon.add(k, image);
    out.grading = std::max(out.grading, (image - pr * image).norm() / std::max(1.0, image.norm()));
  }
  out.reconstruction = detail::scaled((recon - phi).norm(), phi.norm());
  out.beta = out.beta.pruned();
  if (validate && out.reconstruction > tol) throw InductionError(InductionFailure::reconstruction, order, out.reconstruction);
  return out;
}

/// Per-order norm of (1 - Pi^{n-1}_{J1}) e^{-F} d^H e^{F} phi_1 for the
/// canonical generator phi_1 of J1; vanishes iff e^F J1 e^{-F} is integrable
/// to that order.
inline std::vector<double> precondition_residuals(const std::vector<SeriesSoField>& factors, const HermitianPair& pair,
                                                  const TorusGeometry& geom, int order) {
  const int m = pair.dim();
  const int n = pair.half_dim();
  const FourierSpinorField gen = FourierSpinorField::constant(m, pair.j1().canonical().coeffs());
  const SeriesSpinorField up = exp_chain_action(factors, SeriesSpinorField::constant_term(gen, order), order);
  const SeriesSpinorField back = exp_chain_action(detail::negated_reverse(factors), dH_series(up, geom), order);
  const CMat rest = CMat::Identity(spinor_size(m), spinor_size(m)) - pair.j1().projector(n - 1);
  std::vector<double> out;
  for (int j = 0; j <= order; ++j) out.push_back(project(rest, back.at(j)).norm() / gen.norm());
  return out;
}

inline SeriesSoField constant_series(const CMat& x, int order) {
  const int m = static_cast<int>(x.rows()) / 2;
  SeriesSoField s(m, order);
  s.at(0) = FourierSoField::constant(m, x);
  return s;
}

inline SeriesSoField conjugate_chain(const std::vector<SeriesSoField>& factors, const SeriesSoField& y, int order) {
  SeriesSoField cur = y;
  for (auto it = factors.rbegin(); it != factors.rend(); ++it) cur = conjugate_series(*it, cur, order);
  return cur;
}

inline SolutionReport run_goto(const SeriesSoField& a, const HermitianPair& pair, const CVec& psi, const TorusGeometry& geom,
                               const SolverOptions& opts = {}) {
  const int m = pair.dim();
  const int n = pair.half_dim();
  const int order = opts.order;
  if (order < 0 || order > kMaxOrder) throw Error("run_goto: order must lie in [0, 8]");
  require_dim(geom.dim() == m && psi.size() == spinor_size(m), "run_goto: dimension mismatch");
  detail::require_series(a, m, "run_goto: a");
  if (!a.is_real()) throw Error("run_goto: a must be real");
  for (const auto& g : opts.gauges) {
    detail::require_series(g, m, "run_goto: gauge");
    if (!g.is_real()) throw Error("run_goto: gauge must be real");
  }

  const double psi_norm = psi.norm();
  if (psi_norm == 0.0) throw PreconditionError("psi vanishes", 0, 0.0);
  const double off_line = (psi - pair.j2().projector(n) * psi).norm() / psi_norm;
  if (off_line > opts.tol.precondition) throw PreconditionError("psi is not in the canonical line of J2", 0, off_line);
  const double dpsi = (geom.h_wedge() * psi).norm() / psi_norm;
  if (dpsi > opts.tol.precondition) throw PreconditionError("psi is not closed", 0, dpsi);

  SolutionReport report;
  report.order = order;
  report.dim = m;
  report.tol = opts.tol;
  report.psi_norm = psi_norm;
  report.a = a;
  report.a.resize(std::max(order, 1));
  report.gauges = opts.gauges;
  report.b = SeriesSoField(m, std::max(order, 1));
  const auto factors = report.deformation_factors();

  std::vector<double> pre(static_cast<std::size_t>(order + 1), 0.0);
  if (opts.check_precondition) {
    pre = precondition_residuals(factors, pair, geom, order);
    for (int j = 0; j <= order; ++j)
      if (pre[static_cast<std::size_t>(j)] > opts.tol.precondition)
        throw PreconditionError("deformed J1 is not integrable", j, pre[static_cast<std::size_t>(j)]);
  }

  const FourierSpinorField psi0 = FourierSpinorField::constant(m, psi);
  for (int k = 1; k <= order; ++k) {
    const auto start = std::chrono::steady_clock::now();
    OrderRecord rec;
    rec.order = k;
    rec.precondition = pre[static_cast<std::size_t>(k)];
    const OrderResidual r = order_residual(k, factors, report.b, psi0, pair, geom, opts.tol);
    rec.rho_norm = r.rho.norm();
    rec.leakage = r.leakage;
    rec.closedness = r.closedness;
    rec.sum_identity = r.sum_identity;
    if (opts.cross_check) rec.cross_check = detail::scaled((conjugated_residual(k, factors, report.b, psi0, geom) - r.rho).norm(), r.scale);

    const PhiResult ph = solve_phi(r, pair, geom, opts.tol);
    rec.phi_mismatch = ph.mismatch;
    rec.dphi_residual = ph.dphi_residual;

    const BetaResult br = beta_from_phi(cplx(-1.0) * ph.phi, psi, pair, opts.tol.identity, k);
    rec.beta = br.beta;
    rec.beta_norm = br.beta.norm();
    rec.reconstruction = br.reconstruction;
    rec.grading = br.grading;
    report.b.at(k) = (br.beta + br.beta.conjugate()).pruned();
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    report.orders.push_back(std::move(rec));
  }

  std::vector<SeriesSoField> chain = factors;
  chain.push_back(report.b);
  report.psi = exp_chain_action(chain, SeriesSpinorField::constant_term(psi0, order), order);
  const SeriesSpinorField d = dH_series(report.psi, geom);
  for (auto& rec : report.orders) rec.residual_norm = d.at(rec.order).norm() / std::max(1.0, psi_norm);
  report.j1t = conjugate_chain(factors, constant_series(pair.j1().matrix().cast<cplx>(), order), order);
  report.j2t = conjugate_chain(chain, constant_series(pair.j2().matrix().cast<cplx>(), order), order);
  report.passed = report.max_residual() <= opts.tol.residual;
  return report;
}

struct GkVerification {
  double t = 0.0;
  int samples = 0;
  double j1_axioms = 0.0;
  double j2_axioms = 0.0;
  double commutation = 0.0;
  double metric_axioms = 0.0;
  double min_positivity = 0.0;
  double dh_norm = 0.0;
  bool positive = false;
  bool axioms_ok = false;
};

namespace detail {

inline double gcs_axioms(const RMat& j, const RMat& p) {
  const RMat id = RMat::Identity(j.rows(), j.cols());
  return std::max(max_abs(RMat(j * j + id)), max_abs(RMat(j.transpose() * p * j - p)));
}

inline std::vector<std::vector<double>> sample_points(int m, int count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
  std::vector<std::vector<double>> pts(static_cast<std::size_t>(count), std::vector<double>(static_cast<std::size_t>(m)));
  for (auto& p : pts)
    for (auto& v : p) v = u(rng);
  return pts;
}

}  // namespace detail

/// Pointwise GK checks of (J1t, J2t) at parameter t and the size of d^H psi(t)
/// with psi(t) expanded to order K + extra_orders and b truncated at K.
inline GkVerification verify_gk_at_t(const SolutionReport& report, double t, const HermitianPair& pair, const TorusGeometry& geom,
                                     int samples = 16, unsigned seed = 11, int extra_orders = 2) {
  const int m = pair.dim();
  const RMat p = pairing_matrix(m);
  const auto factors = report.deformation_factors();
  GkVerification out;
  out.t = t;
  out.samples = samples;
  out.min_positivity = std::numeric_limits<double>::infinity();
  for (const auto& x : detail::sample_points(m, samples, seed)) {
    RMat e = RMat::Identity(2 * m, 2 * m);
    for (const auto& f : factors) e = e * expm(RMat(f.evaluate(t, x).real()));
    const RMat einv = e.inverse();
    const RMat bt = report.b.evaluate(t, x).real();
    const RMat j1t = e * pair.j1().matrix() * einv;
    const RMat j2t = e * expm(bt) * pair.j2().matrix() * expm(RMat(-bt)) * einv;
    const RMat gt = -j1t * j2t;
    out.j1_axioms = std::max(out.j1_axioms, detail::gcs_axioms(j1t, p));
    out.j2_axioms = std::max(out.j2_axioms, detail::gcs_axioms(j2t, p));
    out.commutation = std::max(out.commutation, max_abs(RMat(j1t * j2t - j2t * j1t)));
    const RMat id = RMat::Identity(2 * m, 2 * m);
    out.metric_axioms = std::max({out.metric_axioms, max_abs(RMat(gt * gt - id)), max_abs(RMat(gt.transpose() * p * gt - p))});
    const RMat form = p * gt;
    Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (form + form.transpose()));
    out.min_positivity = std::min(out.min_positivity, es.eigenvalues().minCoeff());
  }
  if (samples == 0) out.min_positivity = 0.0;
  out.positive = samples == 0 || out.min_positivity > 0.0;
  out.axioms_ok = std::max({out.j1_axioms, out.j2_axioms, out.commutation, out.metric_axioms}) < kAxiomTol;

  const int top = report.order + extra_orders;
  std::vector<SeriesSoField> chain = factors;
  chain.push_back(report.b);
  const FourierSpinorField psi0 = FourierSpinorField::constant(m, report.psi.at(0).find(zero_freq(m)) ? *report.psi.at(0).find(zero_freq(m))
                                                                                                        : CVec::Zero(spinor_size(m)));
  const SeriesSpinorField d = dH_series(exp_chain_action(chain, SeriesSpinorField::constant_term(psi0, top), top), geom);
  FourierSpinorField total(m);
  double tp = 1.0;
  for (int j = 0; j <= top; ++j) {
    total += cplx(tp) * d.at(j);
    tp *= t;
  }
  out.dh_norm = total.norm();
  return out;
}

}  // namespace gks
