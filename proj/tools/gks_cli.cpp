// gks: verification suites and deformation runs on flat tori.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "config.hpp"
#include "report_io.hpp"

using namespace gks;
using namespace gks::cli;

namespace {

enum Exit : int { kPass = 0, kFail = 1, kPrecondition = 2, kUsage = 64 };

struct Common {
  std::string config;
  unsigned long long seed = 1;
  int order = 0;
  double tol = 0.0;
  std::string out;
  bool json_out = false;
};

bool given(const CLI::App& sub, const std::string& name) {
  const CLI::Option* o = sub.get_option_no_throw(name);
  return o && o->count() > 0;
}

ExperimentConfig load_config(const Common& c, const CLI::App& sub) {
  if (c.config.empty()) throw ConfigError("--config is required");
  std::ifstream f(c.config);
  if (!f) throw ConfigError("cannot read " + c.config);
  json j;
  try {
    j = json::parse(f);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig cfg = parse_config(j);
  if (given(sub, "--seed")) cfg.seed = static_cast<unsigned>(c.seed);
  if (given(sub, "--order")) {
    if (c.order < 1 || c.order > kMaxOrder) throw ConfigError("--order must lie in [1, 8]");
    cfg.order = c.order;
  }
  if (given(sub, "--out")) cfg.out_dir = c.out;
  return cfg;
}

void emit(const json& report, const std::string& text, const std::string& out_dir, bool json_out) {
  const std::string body = dump_json(report);
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    write_file(out_dir + "/report.json", body);
  }
  std::cout << (json_out ? body : text);
}

int cmd_verify_algebra(const Common& c, const AlgebraOptions& opts) {
  const SuiteResult s = verify_algebra(opts);
  const int code = s.passed() ? kPass : kFail;
  json r = base_report(s, code);
  r["options"] = {{"seed", opts.seed}, {"n_max", opts.n_max}, {"trials", opts.trials}, {"corrupt_star", opts.corrupt_star}};
  r["checks"] = checks_json(s);
  if (!s.passed()) std::cerr << "failed identity: " << *s.first_failure() << "\n";
  emit(r, text_report(s, code), c.out, c.json_out);
  return code;
}

int cmd_verify_hodge(const ExperimentConfig& cfg, const Common& c) {
  const HermitianPair pair = build_pair(cfg);
  const TorusGeometry geom = build_geometry(cfg);
  HodgeOptions opts;
  opts.radius = cfg.hodge_radius;
  opts.identity_tol = cfg.hodge_identity_tol;
  opts.hodge_tol = c.tol > 0.0 ? c.tol : cfg.hodge_tol;
  opts.seed = cfg.seed;
  const SuiteResult s = verify_hodge(pair, geom, opts);
  const int code = s.passed() ? kPass : kFail;
  json r = base_report(s, code);
  json echo = echo_config(cfg);
  echo["tolerances"]["hodge"] = opts.hodge_tol;
  r["config"] = echo;
  r["checks"] = checks_json(s);
  if (!s.passed()) std::cerr << "failed identity: " << *s.first_failure() << "\n";
  emit(r, text_report(s, code), cfg.out_dir, c.json_out);
  return code;
}

int cmd_deform(const ExperimentConfig& cfg, const Common& c) {
  const HermitianPair pair = build_pair(cfg);
  const TorusGeometry geom = build_geometry(cfg);
  const CVec psi = build_psi(cfg, pair);
  const SeriesSoField a = build_deformation(cfg, pair);
  DeformOptions opts;
  opts.solver_opts.order = cfg.order;
  opts.solver_opts.tol = cfg.tol;
  if (c.tol > 0.0) opts.solver_opts.tol.residual = c.tol;
  opts.solver_opts.gauges = build_gauges(cfg, pair);
  opts.solver_opts.cross_check = cfg.cross_check;
  opts.t_values = cfg.t_values;
  opts.samples = cfg.samples;
  opts.seed = cfg.seed;

  json echo = echo_config(cfg);
  echo["tolerances"]["residual"] = opts.solver_opts.tol.residual;
  SuiteResult s{"deform", {}};
  const auto failed = [&](int code, const std::string& what, const json& detail) {
    json r = base_report(s, code);
    r["config"] = echo;
    r["error"] = detail;
    std::cerr << what << "\n";
    emit(r, text_report(s, code, what), cfg.out_dir, c.json_out);
    return code;
  };
  DeformResult res;
  try {
    res = run_deform(a, pair, psi, geom, opts);
  } catch (const PreconditionError& e) {
    return failed(kPrecondition, std::string("precondition failure: ") + e.what(),
                  {{"kind", "precondition"}, {"message", e.what()}, {"order", e.order()}, {"residual", e.residual()}});
  } catch (const InductionError& e) {
    return failed(kFail, std::string("induction failure: ") + e.what(),
                  {{"kind", to_string(e.kind())}, {"message", e.what()}, {"order", e.order()}, {"residual", e.residual()}});
  }
  s = res.suite;
  const int code = s.passed() ? kPass : kFail;
  json r = base_report(s, code);
  r["config"] = echo;
  r["checks"] = checks_json(s);
  r["orders"] = orders_json(res.report);
  r["verification"] = verification_json(res.verifications);
  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    write_file(cfg.out_dir + "/series.json", dump_json(series_json(res.report)));
    write_file(cfg.out_dir + "/residuals.csv", residuals_csv(res.report));
  }
  if (!s.passed()) std::cerr << "failed check: " << *s.first_failure() << "\n";
  emit(r, text_report(s, code), cfg.out_dir, c.json_out);
  return code;
}

void add_output_flags(CLI::App* sub, Common& c) {
  sub->add_option("--out", c.out, "directory for report.json (and deform artifacts)");
  sub->add_flag("--json", c.json_out, "print the JSON report instead of the text report");
}

void add_config_flags(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "experiment config (JSON)")->required();
  sub->add_option("--seed", c.seed, "sampling seed (overrides verify.seed)");
  add_output_flags(sub, c);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized Kaehler structures on flat tori: identity checks and deformation series"};
  app.require_subcommand(1);
  Common common;
  AlgebraOptions alg;

  auto* algebra = app.add_subcommand("verify-algebra", "spinor algebra and star operator property suite");
  algebra->add_option("--seed", alg.seed, "random seed");
  algebra->add_option("--n-max", alg.n_max, "largest half dimension")->check(CLI::Range(1, 3));
  algebra->add_option("--trials", alg.trials, "random inputs per check")->check(CLI::NonNegativeNumber);
  algebra->add_flag("--corrupt-star", alg.corrupt_star, "debug: flip the sign of the star operator");
  add_output_flags(algebra, common);

  auto* hodge = app.add_subcommand("verify-hodge", "d^H decomposition, adjoints, Laplacians and Green operator");
  add_config_flags(hodge, common);
  hodge->add_option("--tol", common.tol, "tolerance for adjoint, Laplacian and Green checks")->check(CLI::PositiveNumber);

  auto* deform = app.add_subcommand("deform", "series induction and generalized Kaehler verification");
  add_config_flags(deform, common);
  deform->add_option("--order", common.order, "series order K");
  deform->add_option("--tol", common.tol, "per-order residual tolerance")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (algebra->parsed()) return cmd_verify_algebra(common, alg);
    if (hodge->parsed()) return cmd_verify_hodge(load_config(common, *hodge), common);
    return cmd_deform(load_config(common, *deform), common);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  }
}
