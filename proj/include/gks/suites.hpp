#pragma once

// Batch check suites behind the command line driver.

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gks/goto_solver.hpp"
#include "gks/hodge.hpp"
#include "gks/random.hpp"

namespace gks {

enum class CheckStatus { pass, fail, info, skipped };

inline const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::info: return "info";
    case CheckStatus::skipped: return "skipped";
  }
  return "?";
}

struct Check {
  std::string name;
  CheckStatus status = CheckStatus::info;
  double value = 0.0;
  double bound = 0.0;
  std::string relation;  // "<" or ">" for pass/fail checks
};

inline Check below(std::string name, double value, double tol) {
  return {std::move(name), value < tol ? CheckStatus::pass : CheckStatus::fail, value, tol, "<"};
}
inline Check above(std::string name, double value, double bound) {
  return {std::move(name), value > bound ? CheckStatus::pass : CheckStatus::fail, value, bound, ">"};
}
inline Check info(std::string name, double value) { return {std::move(name), CheckStatus::info, value, 0.0, ""}; }
inline Check skipped(std::string name) { return {std::move(name), CheckStatus::skipped, 0.0, 0.0, ""}; }

struct SuiteResult {
  std::string suite;
  std::vector<Check> checks;

  bool passed() const { return !first_failure(); }
  std::optional<std::string> first_failure() const {
    for (const auto& c : checks)
      if (c.status == CheckStatus::fail) return c.name;
    return std::nullopt;
  }
};

// ---------------------------------------------------------------- algebra

struct AlgebraOptions {
  unsigned long long seed = 1;
  int n_max = 3;
  int trials = 200;
  bool corrupt_star = false;  // negative control for the star identity check
};

namespace detail {

inline double star_identity(const HermitianPair& pair, bool corrupt) {
  const CMat jj = HermitianPair::quarter_turn(pair.j1()) * HermitianPair::quarter_turn(pair.j2());
  const CMat star = corrupt ? CMat(-pair.star()) : pair.star();
  return max_abs(CMat(star + jj));
}

}  // namespace detail

/// Property suite for the spinor algebra and the star operator on seeded inputs.
inline SuiteResult verify_algebra(const AlgebraOptions& opts) {
  SuiteResult out{"verify-algebra", {}};
  if (opts.trials <= 0) return out;
  RandomSource rs(opts.seed);
  for (int m = 1; m <= 2 * opts.n_max; ++m) {
    const std::string tag = "_m" + std::to_string(m);
    double clifford = 0.0, equiv = 0.0, invariance = 0.0;
    for (int t = 0; t < opts.trials; ++t) {
      const SoDouble x = rs.so(m, 0.5);
      const auto v = rs.double_vector(m);
      const auto phi = rs.spinor(m);
      const auto psi = rs.spinor(m);
      const Spinor vv = clifford_act(v, clifford_act(v, phi));
      clifford = std::max(clifford, (vv - natural_pairing(v, v) * phi).norm() / phi.norm());
      const Spinor lhs = spinor_exp(x, clifford_act(v, phi));
      const Spinor rhs = clifford_act(DoubleVector(m, group_matrix(x) * v.coeffs()), spinor_exp(x, phi));
      equiv = std::max(equiv, (lhs - rhs).norm() / phi.norm());
      const cplx before = chevalley_pairing(phi, psi);
      const cplx after = chevalley_pairing(spinor_exp(x, phi), spinor_exp(x, psi));
      invariance = std::max(invariance, std::abs(after - before) / std::max(1.0, std::abs(before)));
    }
    out.checks.push_back(below("clifford_relation" + tag, clifford, 1e-12));
    out.checks.push_back(below("spin_equivariance" + tag, equiv, 1e-9));
    out.checks.push_back(below("chevalley_invariance" + tag, invariance, 1e-9));

    const auto g = rs.metric(m);
    const CMat star = star_matrix(g);
    double worst = std::numeric_limits<double>::infinity();
    double imag = 0.0;
    for (int t = 0; t < opts.trials; ++t) {
      const Spinor phi = rs.spinor(m, true);
      const cplx val = chevalley_pairing(phi, Spinor(m, star * phi.coeffs()));
      worst = std::min(worst, val.real() / phi.norm() / phi.norm());
      imag = std::max(imag, std::abs(val.imag()) / std::abs(val));
    }
    out.checks.push_back(above("star_positivity" + tag, worst, 0.0));
    out.checks.push_back(below("star_pairing_real" + tag, imag, 1e-9));

    if (m % 2 == 0) {
      double star_res = 0.0;
      for (int t = 0; t < opts.trials; ++t) star_res = std::max(star_res, detail::star_identity(rs.hermitian_pair(m), opts.corrupt_star));
      if (m <= 4) star_res = std::max(star_res, detail::star_identity(kaehler_pair(RMat::Identity(m, m), standard_complex_structure(m)), opts.corrupt_star));
      out.checks.push_back(below("star_from_pair" + tag, star_res, 1e-9));
    }
  }
  return out;
}

// ---------------------------------------------------------------- hodge

struct HodgeOptions {
  int radius = 1;
  double identity_tol = 1e-10;
  double hodge_tol = 1e-9;
  unsigned long long seed = 1;
  int green_samples = 3;
};

namespace detail {

inline std::string bidegree_label(const Bidegree& s) {
  return "(" + std::to_string(s.first) + "," + std::to_string(s.second) + ")";
}

inline BlockOperator anticommutator(const BlockOperator& a, const BlockOperator& b) { return a * b + b * a; }

}  // namespace detail

/// d^H decomposition, first-order identities, adjoints, Laplacians and Green
/// operator on a constant background. Identities that need a generalized
/// Kaehler pair are skipped (and listed) when a structure is not integrable.
inline SuiteResult verify_hodge(const HermitianPair& pair, const TorusGeometry& geom, const HodgeOptions& opts) {
  using namespace shifts;
  SuiteResult out{"verify-hodge", {}};
  const int m = pair.dim();
  const auto support = frequency_box(m, opts.radius);

  const auto i1 = integrability_check(pair.j1(), geom);
  const auto i2 = integrability_check(pair.j2(), geom);
  out.checks.push_back(info("j1_integrability_residual", i1.residual));
  out.checks.push_back(info("j2_integrability_residual", i2.residual));
  out.checks.push_back(info("j1_nijenhuis_max", nijenhuis(pair.j1(), geom).max_abs()));
  out.checks.push_back(info("j2_nijenhuis_max", nijenhuis(pair.j2(), geom).max_abs()));
  const bool gk = i1.integrable && i2.integrable;

  // size of every component of d^H over the support
  const BigradedDh split(pair, geom);
  double outside = 0.0;
  for (const auto& s : split.active_shifts()) {
    double size = 0.0;
    for (const auto& k : support) size = std::max(size, max_abs(split.block(s, k)));
    const bool listed = std::abs(s.first) == 1 && std::abs(s.second) == 1;
    if (!listed) outside = std::max(outside, size);
    out.checks.push_back(info((listed ? "component" : "torsion") + detail::bidegree_label(s), size));
  }
  if (!gk) {
    for (const char* name : {"decomposition_pattern", "delta_squares", "anticommutators", "adjoint_signs", "laplacian_ratio",
                             "laplacian_components", "green_identities"})
      out.checks.push_back(skipped(name));
    return out;
  }
  out.checks.push_back(below("decomposition_pattern", outside, opts.identity_tol));

  const auto dp = build_component_operator(delta_plus, pair, geom, support);
  const auto dpb = build_component_operator(delta_plus_bar, pair, geom, support);
  const auto dm = build_component_operator(delta_minus, pair, geom, support);
  const auto dmb = build_component_operator(delta_minus_bar, pair, geom, support);

  double squares = 0.0;
  for (const auto* d : {&dp, &dpb, &dm, &dmb}) squares = std::max(squares, ((*d) * (*d)).max_abs_entry());
  out.checks.push_back(below("delta_squares", squares, opts.identity_tol));
  out.checks.push_back(below("anticommutator_dp_dm", detail::anticommutator(dp, dm).max_abs_entry(), opts.identity_tol));
  out.checks.push_back(below("anticommutator_dp_dmbar", detail::anticommutator(dp, dmb).max_abs_entry(), opts.identity_tol));
  out.checks.push_back(
      below("anticommutator_sum", (detail::anticommutator(dp, dpb) + detail::anticommutator(dm, dmb)).max_abs_entry(), opts.identity_tol));

  out.checks.push_back(below("adjoint_delta_plus", (adjoint(dp, pair) + dpb).max_abs_entry(), opts.hodge_tol));
  out.checks.push_back(below("adjoint_delta_minus", (adjoint(dm, pair) - dmb).max_abs_entry(), opts.hodge_tol));

  const auto full = laplacian(build_dh_operator(geom, support), pair);
  const auto lp = laplacian(dp, pair);
  out.checks.push_back(below("laplacian_ratio", std::abs(full.max_abs_entry() / lp.max_abs_entry() - 4.0), opts.hodge_tol));
  double lap = 0.0;
  for (const auto* d : {&dp, &dpb, &dm, &dmb}) lap = std::max(lap, (full - cplx(4.0) * laplacian(*d, pair)).max_abs_entry());
  out.checks.push_back(below("laplacian_components", lap, opts.hodge_tol));
  double preserve = 0.0;
  for (const auto& [k, b] : full.blocks())
    for (const auto& [pq, pr] : pair.bigraded()) preserve = std::max(preserve, max_abs(CMat(b * pr - pr * b)));
  out.checks.push_back(below("laplacian_preserves_bigrading", preserve, opts.hodge_tol));

  // Green operators on exact fields
  RandomSource rs(opts.seed);
  const GreenOperator gp(pair, geom, delta_plus);
  const GreenOperator gm(pair, geom, delta_minus);
  double inverse = 0.0, choice = 0.0, harmonic = 0.0;
  for (int s = 0; s < opts.green_samples; ++s) {
    FourierSpinorField f(m);
    for (int t = 0; t < 4; ++t) f.add(support[static_cast<std::size_t>(rs.integer(0, static_cast<int>(support.size()) - 1))], rs.complex_vector(spinor_size(m)));
    const auto rho = dH_apply(f, geom);
    if (rho.norm() == 0.0) continue;
    const auto grho = gp.apply(rho);
    inverse = std::max(inverse, (gp.apply_laplacian(grho) - rho).norm() / rho.norm());
    choice = std::max(choice, (gm.apply(rho) - grho).norm() / std::max(1.0, grho.norm()));
    harmonic = std::max(harmonic, gp.harmonic_part(rho).norm() / rho.norm());
  }
  out.checks.push_back(below("green_inverse_on_exact", inverse, opts.hodge_tol));
  out.checks.push_back(below("green_choice_independence", choice, opts.hodge_tol));
  out.checks.push_back(below("green_exact_not_harmonic", harmonic, opts.hodge_tol));
  return out;
}

// ---------------------------------------------------------------- deform

struct DeformOptions {
  SolverOptions solver_opts;
  std::vector<double> t_values{1e-2, 5e-3};
  int samples = 16;
  unsigned seed = 11;
};

struct DeformResult {
  SuiteResult suite;
  SolutionReport report;
  std::vector<GkVerification> verifications;
};

/// Order-by-order induction followed by pointwise verification at the requested t.
/// Solver errors propagate (InductionError, PreconditionError).
inline DeformResult run_deform(const SeriesSoField& a, const HermitianPair& pair, const CVec& psi, const TorusGeometry& geom,
                               const DeformOptions& opts) {
  DeformResult out;
  out.suite.suite = "deform";
  out.report = run_goto(a, pair, psi, geom, opts.solver_opts);
  const auto& tol = opts.solver_opts.tol;
  auto& checks = out.suite.checks;
  for (const auto& o : out.report.orders) {
    const std::string tag = "_k" + std::to_string(o.order);
    checks.push_back(below("residual" + tag, o.residual_norm, tol.residual));
    checks.push_back(below("leakage" + tag, o.leakage, tol.identity));
    checks.push_back(below("sum_identity" + tag, std::max(o.closedness, o.sum_identity), tol.identity));
    checks.push_back(below("phi_expressions" + tag, o.phi_mismatch, tol.identity));
    checks.push_back(below("dphi" + tag, o.dphi_residual, tol.dphi));
    checks.push_back(below("beta_reconstruction" + tag, o.reconstruction, tol.identity));
    checks.push_back(below("beta_grading" + tag, o.grading, tol.identity));
    if (o.cross_check >= 0.0) checks.push_back(below("conjugated_rho" + tag, o.cross_check, tol.identity));
  }
  for (double t : opts.t_values) {
    out.verifications.push_back(verify_gk_at_t(out.report, t, pair, geom, opts.samples, opts.seed));
    const auto& v = out.verifications.back();
    char tag[32];
    std::snprintf(tag, sizeof tag, "_t%.3g", t);
    checks.push_back(above(std::string("metric_positivity") + tag, v.min_positivity, 0.0));
    checks.push_back(below(std::string("gk_axioms") + tag,
                           std::max({v.j1_axioms, v.j2_axioms, v.commutation, v.metric_axioms}), kAxiomTol));
    checks.push_back(info(std::string("dh_psi_norm") + tag, v.dh_norm));
  }
  if (out.verifications.size() >= 2 && out.verifications[1].dh_norm > 0.0)
    checks.push_back(info("truncation_ratio", out.verifications[0].dh_norm / out.verifications[1].dh_norm));
  return out;
}

}  // namespace gks
