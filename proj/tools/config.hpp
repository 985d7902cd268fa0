#pragma once

// Experiment config: a strict JSON document. Unknown keys are rejected at
// every level; every effective value is echoed back into reports.

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gks/deformations.hpp"
#include "gks/goto_solver.hpp"
#include "json.hpp"

namespace gks::cli {

using json = nlohmann::ordered_json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kConfigSchema = "gks-config/1";

struct DeformationSpec {
  std::string kind = "none";  // none | constant_bivector | exact_b_field | explicit_series
  // constant_bivector: beta = scale u' ^ w', optionally times A cos(<k, x>)
  RVec u, w;
  cplx scale = 1.0;
  std::optional<std::pair<Freq, double>> modulation;
  // exact_b_field
  std::vector<CosineTerm> xi;
  // explicit_series: real so(V + V*) coefficients
  struct Term {
    int order;
    Freq freq;
    CMat matrix;
  };
  std::vector<Term> terms;
};

struct GaugeSpec {
  std::string kind;  // stabilizer | rotation
  double scale = 1.0;
  Freq freq;
  double amplitude = 0.0;
};

struct ExperimentConfig {
  int dimension = 0;
  std::vector<TorusGeometry::Component> h;
  std::string background = "kaehler";  // kaehler | explicit
  RMat g, b;
  std::optional<RMat> complex_structure, symplectic;
  cplx psi_scale = 1.0;
  DeformationSpec deformation;
  std::vector<GaugeSpec> gauges;
  int order = 4;
  SolverTolerances tol;
  double hodge_identity_tol = 1e-10;
  double hodge_tol = 1e-9;
  int hodge_radius = 1;
  std::vector<double> t_values{1e-2, 5e-3};
  int samples = 16;
  unsigned seed = 11;
  bool cross_check = true;
  std::string out_dir;
};

namespace detail {

inline void allow_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

template <class T>
T get(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

template <class T>
T get_or(const json& j, const char* key, const std::string& where, T fallback) {
  return j.contains(key) ? get<T>(j, key, where) : fallback;
}

inline RMat matrix(const json& j, const std::string& where, int rows, int cols) {
  std::vector<std::vector<double>> rowsv;
  try {
    rowsv = j.get<std::vector<std::vector<double>>>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(where + ": expected a matrix of numbers");
  }
  if (static_cast<int>(rowsv.size()) != rows) throw ConfigError(where + ": wrong number of rows");
  RMat out(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(rowsv[static_cast<std::size_t>(i)].size()) != cols) throw ConfigError(where + ": wrong number of columns");
    for (int k = 0; k < cols; ++k) out(i, k) = rowsv[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
  }
  return out;
}

inline RVec vector(const json& j, const std::string& where, int size) { return matrix(json::array({j}), where, 1, size).row(0).transpose(); }

inline Freq freq(const json& j, const std::string& where, int m) {
  Freq k;
  try {
    k = j.get<Freq>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(where + ": expected an integer vector");
  }
  if (static_cast<int>(k.size()) != m) throw ConfigError(where + ": frequency has wrong length");
  return k;
}

inline cplx complex(const json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  const RVec v = vector(j, where, 2);
  return {v(0), v(1)};
}

inline json to_json(const RMat& x) {
  json out = json::array();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < x.cols(); ++k) row.push_back(x(i, k));
    out.push_back(row);
  }
  return out;
}
inline json to_json(cplx c) { return json::array({c.real(), c.imag()}); }

}  // namespace detail

inline ExperimentConfig parse_config(const json& j) {
  using namespace detail;
  allow_keys(j, "config", {"schema", "dimension", "h", "background", "psi", "deformation", "gauges", "order", "tolerances", "hodge",
                           "verify", "output"});
  ExperimentConfig c;
  if (get<std::string>(j, "schema", "config") != kConfigSchema) throw ConfigError(std::string("config: schema must be ") + kConfigSchema);
  c.dimension = get<int>(j, "dimension", "config");
  const int m = c.dimension;
  if (m < 2 || m > 6 || m % 2) throw ConfigError("config.dimension: must be 2, 4 or 6");

  if (j.contains("h")) {
    if (!j.at("h").is_array()) throw ConfigError("config.h: expected a list");
    for (const auto& e : j.at("h")) {
      allow_keys(e, "config.h[]", {"indices", "value"});
      const auto idx = get<std::vector<int>>(e, "indices", "config.h[]");
      if (idx.size() != 3) throw ConfigError("config.h[].indices: need three indices");
      for (int i : idx)
        if (i < 0 || i >= m) throw ConfigError("config.h[].indices: index out of range");
      if (idx[0] == idx[1] || idx[1] == idx[2] || idx[0] == idx[2]) throw ConfigError("config.h[].indices: repeated index");
      c.h.push_back({idx[0], idx[1], idx[2], get<double>(e, "value", "config.h[]")});
    }
  }

  const json& bg = j.contains("background") ? j.at("background") : throw ConfigError("config: missing key 'background'");
  allow_keys(bg, "config.background", {"kind", "g", "b", "complex_structure", "symplectic"});
  c.background = get<std::string>(bg, "kind", "config.background");
  c.g = bg.contains("g") ? matrix(bg.at("g"), "config.background.g", m, m) : RMat::Identity(m, m);
  c.b = bg.contains("b") ? matrix(bg.at("b"), "config.background.b", m, m) : RMat::Zero(m, m);
  if (bg.contains("complex_structure")) c.complex_structure = matrix(bg.at("complex_structure"), "config.background.complex_structure", m, m);
  if (bg.contains("symplectic")) c.symplectic = matrix(bg.at("symplectic"), "config.background.symplectic", m, m);
  if (c.background == "kaehler") {
    if (c.symplectic || bg.contains("b")) throw ConfigError("config.background: kaehler takes only g and complex_structure");
    if (!c.complex_structure) c.complex_structure = standard_complex_structure(m);
  } else if (c.background == "explicit") {
    if (c.complex_structure.has_value() == c.symplectic.has_value())
      throw ConfigError("config.background: explicit needs exactly one of complex_structure, symplectic");
  } else {
    throw ConfigError("config.background.kind: must be kaehler or explicit");
  }

  if (j.contains("psi")) {
    allow_keys(j.at("psi"), "config.psi", {"scale"});
    if (j.at("psi").contains("scale")) c.psi_scale = complex(j.at("psi").at("scale"), "config.psi.scale");
    if (c.psi_scale == cplx(0.0)) throw ConfigError("config.psi.scale: must be nonzero");
  }

  if (j.contains("deformation")) {
    const json& d = j.at("deformation");
    auto& s = c.deformation;
    if (!d.is_object()) throw ConfigError("config.deformation: expected an object");
    s.kind = get<std::string>(d, "kind", "config.deformation");
    if (s.kind == "none") {
      allow_keys(d, "config.deformation", {"kind"});
    } else if (s.kind == "constant_bivector") {
      allow_keys(d, "config.deformation", {"kind", "u", "w", "scale", "modulation"});
      if (!c.complex_structure || c.background != "kaehler") throw ConfigError("config.deformation: constant_bivector needs a kaehler background");
      s.u = vector(get<json>(d, "u", "config.deformation"), "config.deformation.u", m);
      s.w = vector(get<json>(d, "w", "config.deformation"), "config.deformation.w", m);
      if (d.contains("scale")) s.scale = complex(d.at("scale"), "config.deformation.scale");
      if (d.contains("modulation")) {
        const json& mo = d.at("modulation");
        allow_keys(mo, "config.deformation.modulation", {"freq", "amplitude"});
        s.modulation = std::make_pair(freq(get<json>(mo, "freq", "config.deformation.modulation"), "config.deformation.modulation.freq", m),
                                      get<double>(mo, "amplitude", "config.deformation.modulation"));
      }
    } else if (s.kind == "exact_b_field") {
      allow_keys(d, "config.deformation", {"kind", "xi"});
      const json xi = get<json>(d, "xi", "config.deformation");
      if (!xi.is_array() || xi.empty()) throw ConfigError("config.deformation.xi: expected a nonempty list");
      for (const auto& t : xi) {
        allow_keys(t, "config.deformation.xi[]", {"freq", "component", "amplitude", "phase"});
        CosineTerm term{freq(get<json>(t, "freq", "config.deformation.xi[]"), "config.deformation.xi[].freq", m),
                        get<int>(t, "component", "config.deformation.xi[]"), get<double>(t, "amplitude", "config.deformation.xi[]"),
                        get_or<double>(t, "phase", "config.deformation.xi[]", 0.0)};
        if (term.component < 0 || term.component >= m) throw ConfigError("config.deformation.xi[].component: out of range");
        s.xi.push_back(term);
      }
    } else if (s.kind == "explicit_series") {
      allow_keys(d, "config.deformation", {"kind", "terms"});
      const json terms = get<json>(d, "terms", "config.deformation");
      if (!terms.is_array()) throw ConfigError("config.deformation.terms: expected a list");
      for (const auto& t : terms) {
        const std::string w = "config.deformation.terms[]";
        allow_keys(t, w, {"order", "freq", "real", "imag"});
        DeformationSpec::Term term{get<int>(t, "order", w), freq(get<json>(t, "freq", w), w + ".freq", m),
                                   matrix(get<json>(t, "real", w), w + ".real", 2 * m, 2 * m).cast<cplx>()};
        if (t.contains("imag")) term.matrix += kI * matrix(t.at("imag"), w + ".imag", 2 * m, 2 * m).cast<cplx>();
        if (term.order < 1 || term.order > kMaxOrder) throw ConfigError(w + ".order: must lie in [1, 8]");
        const double anti = SoDouble(m, term.matrix).antisymmetry_residual();
        if (anti > 1e-12) throw ConfigError(w + ": coefficient is not in so(V + V*)");
        s.terms.push_back(std::move(term));
      }
    } else {
      throw ConfigError("config.deformation.kind: must be none, constant_bivector, exact_b_field or explicit_series");
    }
  }

  if (j.contains("gauges")) {
    if (!j.at("gauges").is_array()) throw ConfigError("config.gauges: expected a list");
    for (const auto& gj : j.at("gauges")) {
      GaugeSpec g;
      g.kind = get<std::string>(gj, "kind", "config.gauges[]");
      if (g.kind == "stabilizer") {
        allow_keys(gj, "config.gauges[]", {"kind", "scale"});
        if (c.deformation.kind != "exact_b_field") throw ConfigError("config.gauges[]: stabilizer gauge needs an exact_b_field deformation");
        g.scale = get_or<double>(gj, "scale", "config.gauges[]", 1.0);
      } else if (g.kind == "rotation") {
        allow_keys(gj, "config.gauges[]", {"kind", "freq", "amplitude"});
        g.freq = freq(get<json>(gj, "freq", "config.gauges[]"), "config.gauges[].freq", m);
        g.amplitude = get<double>(gj, "amplitude", "config.gauges[]");
      } else {
        throw ConfigError("config.gauges[].kind: must be stabilizer or rotation");
      }
      c.gauges.push_back(g);
    }
  }

  c.order = get_or<int>(j, "order", "config", 4);
  if (c.order < 1 || c.order > kMaxOrder) throw ConfigError("config.order: must lie in [1, 8]");

  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    const std::string w = "config.tolerances";
    allow_keys(t, w, {"residual", "identity", "dphi", "precondition", "green_cutoff", "hodge_identity", "hodge"});
    c.tol.residual = get_or<double>(t, "residual", w, c.tol.residual);
    c.tol.identity = get_or<double>(t, "identity", w, c.tol.identity);
    c.tol.dphi = get_or<double>(t, "dphi", w, c.tol.dphi);
    c.tol.precondition = get_or<double>(t, "precondition", w, c.tol.precondition);
    c.tol.green_cutoff = get_or<double>(t, "green_cutoff", w, c.tol.green_cutoff);
    c.hodge_identity_tol = get_or<double>(t, "hodge_identity", w, c.hodge_identity_tol);
    c.hodge_tol = get_or<double>(t, "hodge", w, c.hodge_tol);
    for (double v : {c.tol.residual, c.tol.identity, c.tol.dphi, c.tol.precondition, c.tol.green_cutoff, c.hodge_identity_tol, c.hodge_tol})
      if (!(v > 0.0)) throw ConfigError(w + ": tolerances must be positive");
  }
  if (j.contains("hodge")) {
    allow_keys(j.at("hodge"), "config.hodge", {"radius"});
    c.hodge_radius = get_or<int>(j.at("hodge"), "radius", "config.hodge", 1);
    if (c.hodge_radius < 0 || c.hodge_radius > 4) throw ConfigError("config.hodge.radius: must lie in [0, 4]");
  }
  if (j.contains("verify")) {
    const json& v = j.at("verify");
    allow_keys(v, "config.verify", {"t", "samples", "seed", "cross_check"});
    c.t_values = get_or<std::vector<double>>(v, "t", "config.verify", c.t_values);
    c.samples = get_or<int>(v, "samples", "config.verify", c.samples);
    c.seed = get_or<unsigned>(v, "seed", "config.verify", c.seed);
    c.cross_check = get_or<bool>(v, "cross_check", "config.verify", c.cross_check);
    if (c.samples < 0) throw ConfigError("config.verify.samples: must be nonnegative");
  }
  if (j.contains("output")) {
    allow_keys(j.at("output"), "config.output", {"dir"});
    c.out_dir = get_or<std::string>(j.at("output"), "dir", "config.output", "");
  }
  return c;
}

/// Effective configuration, with all defaults filled in.
inline json echo_config(const ExperimentConfig& c) {
  using detail::to_json;
  json j;
  j["schema"] = kConfigSchema;
  j["dimension"] = c.dimension;
  json h = json::array();
  for (const auto& e : c.h) h.push_back({{"indices", {e.i, e.j, e.k}}, {"value", e.value}});
  j["h"] = h;
  json bg;
  bg["kind"] = c.background;
  bg["g"] = to_json(c.g);
  if (c.background == "explicit") bg["b"] = to_json(c.b);
  if (c.complex_structure) bg["complex_structure"] = to_json(*c.complex_structure);
  if (c.symplectic) bg["symplectic"] = to_json(*c.symplectic);
  j["background"] = bg;
  j["psi"] = {{"scale", to_json(c.psi_scale)}};
  json d;
  const auto& s = c.deformation;
  d["kind"] = s.kind;
  if (s.kind == "constant_bivector") {
    d["u"] = to_json(RMat(s.u.transpose()))[0];
    d["w"] = to_json(RMat(s.w.transpose()))[0];
    d["scale"] = to_json(s.scale);
    if (s.modulation) d["modulation"] = {{"freq", s.modulation->first}, {"amplitude", s.modulation->second}};
  } else if (s.kind == "exact_b_field") {
    json xi = json::array();
    for (const auto& t : s.xi) xi.push_back({{"freq", t.freq}, {"component", t.component}, {"amplitude", t.amplitude}, {"phase", t.phase}});
    d["xi"] = xi;
  } else if (s.kind == "explicit_series") {
    json terms = json::array();
    for (const auto& t : s.terms)
      terms.push_back({{"order", t.order}, {"freq", t.freq}, {"real", to_json(RMat(t.matrix.real()))}, {"imag", to_json(RMat(t.matrix.imag()))}});
    d["terms"] = terms;
  }
  j["deformation"] = d;
  json gauges = json::array();
  for (const auto& g : c.gauges) {
    if (g.kind == "stabilizer")
      gauges.push_back({{"kind", g.kind}, {"scale", g.scale}});
    else
      gauges.push_back({{"kind", g.kind}, {"freq", g.freq}, {"amplitude", g.amplitude}});
  }
  j["gauges"] = gauges;
  j["order"] = c.order;
  j["tolerances"] = {{"residual", c.tol.residual},   {"identity", c.tol.identity},           {"dphi", c.tol.dphi},
                     {"precondition", c.tol.precondition}, {"green_cutoff", c.tol.green_cutoff}, {"hodge_identity", c.hodge_identity_tol},
                     {"hodge", c.hodge_tol}};
  j["hodge"] = {{"radius", c.hodge_radius}};
  j["verify"] = {{"t", c.t_values}, {"samples", c.samples}, {"seed", c.seed}, {"cross_check", c.cross_check}};
  j["output"] = {{"dir", c.out_dir}};
  return j;
}

// ---------------------------------------------------------------- builders

inline HermitianPair build_pair(const ExperimentConfig& c) {
  try {
    const auto metric = GeneralizedMetric::from_g_b(c.g, c.b);
    const auto j1 = c.complex_structure ? GeneralizedComplexStructure::from_complex_structure(*c.complex_structure)
                                        : GeneralizedComplexStructure::from_symplectic(*c.symplectic);
    return {metric, j1};
  } catch (const Error& e) {
    throw ConfigError(std::string("config.background: ") + e.what());
  }
}

inline TorusGeometry build_geometry(const ExperimentConfig& c) { return TorusGeometry(c.dimension, c.h); }

inline CVec build_psi(const ExperimentConfig& c, const HermitianPair& pair) { return c.psi_scale * pair.j2().canonical().coeffs(); }

inline SeriesSoField build_deformation(const ExperimentConfig& c, const HermitianPair& pair) {
  const int m = c.dimension;
  const auto& s = c.deformation;
  if (s.kind == "constant_bivector") {
    const CMat beta = holomorphic_bivector(*c.complex_structure, s.u, s.w, s.scale);
    if (s.modulation) return modulated_bivector_family(beta, cosine_scalar(s.modulation->first, s.modulation->second));
    return constant_bivector_family(beta);
  }
  if (s.kind == "exact_b_field") return exact_b_field_family(cosine_one_form(m, s.xi), pair.j1()).transverse;
  if (s.kind == "explicit_series") {
    int top = 1;
    for (const auto& t : s.terms) top = std::max(top, t.order);
    SeriesSoField a(m, top);
    for (const auto& t : s.terms) a.at(t.order).add(t.freq, t.matrix);
    for (int k = 1; k <= top; ++k) a.at(k) = a.at(k).pruned();
    if (!a.is_real()) throw ConfigError("config.deformation.terms: series is not real (needs c(-k) = conj c(k))");
    return a;
  }
  return SeriesSoField(m, 1);
}

inline std::vector<SeriesSoField> build_gauges(const ExperimentConfig& c, const HermitianPair& pair) {
  std::vector<SeriesSoField> out;
  for (const auto& g : c.gauges) {
    if (g.kind == "stabilizer") {
      SeriesSoField s = exact_b_field_family(cosine_one_form(c.dimension, c.deformation.xi), pair.j1()).stabilizer;
      s.at(1) = cplx(g.scale) * s.at(1);
      out.push_back(s);
    } else {
      out.push_back(structure_rotation_gauge(pair.j1(), cosine_scalar(g.freq, g.amplitude)));
    }
  }
  return out;
}

}  // namespace gks::cli
