#pragma once

// Report, series and CSV writers. Floating point values are printed with 17
// significant digits; reports carry no timings so they are reproducible
// byte for byte.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "config.hpp"
#include "gks/suites.hpp"

namespace gks::cli {

inline constexpr const char* kReportSchema = "gks-report/1";
inline constexpr const char* kSeriesSchema = "gks-series/1";

inline std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline void dump(const json& j, std::ostringstream& os, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) os << ",\n";
        first = false;
        os << pad << json(k).dump() << ": ";
        dump(v, os, indent, depth + 1);
      }
      os << "\n" << close << "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      // vectors of numbers and of [re, im] pairs stay on one line
      const auto leaf = [](const json& x) {
        return x.is_primitive() || (x.is_array() && std::all_of(x.begin(), x.end(), [](const json& y) { return y.is_primitive(); }));
      };
      if (std::all_of(j.begin(), j.end(), leaf)) {
        os << "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) os << ", ";
          dump(j[i], os, indent, depth + 1);
        }
        os << "]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << pad;
        dump(j[i], os, indent, depth + 1);
      }
      os << "\n" << close << "]";
      return;
    }
    case json::value_t::number_float: os << format_double(j.get<double>()); return;
    default: os << j.dump(); return;
  }
}

}  // namespace detail

inline std::string dump_json(const json& j) {
  std::ostringstream os;
  detail::dump(j, os, 2, 0);
  os << "\n";
  return os.str();
}

inline json complex_json(cplx c) { return json::array({c.real(), c.imag()}); }

inline json vector_json(const CVec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_json(v(i)));
  return out;
}

inline json matrix_json(const CMat& x) {
  json out = json::array();
  for (Eigen::Index i = 0; i < x.rows(); ++i) out.push_back(vector_json(x.row(i).transpose()));
  return out;
}

template <class Field, class F>
json field_json(const Field& f, F&& coef) {
  json out = json::array();
  for (const auto& [k, c] : f.terms()) out.push_back({{"freq", k}, {"coefficient", coef(c)}});
  return out;
}

inline json checks_json(const SuiteResult& s) {
  json out = json::array();
  for (const auto& c : s.checks) {
    json e{{"name", c.name}, {"status", to_string(c.status)}, {"value", c.value}};
    if (!c.relation.empty()) {
      e["relation"] = c.relation;
      e["bound"] = c.bound;
    }
    out.push_back(e);
  }
  return out;
}

inline json base_report(const SuiteResult& s, int exit_code) {
  json j;
  j["schema"] = kReportSchema;
  j["suite"] = s.suite;
  j["passed"] = exit_code == 0;
  j["exit_code"] = exit_code;
  const auto failure = s.first_failure();
  j["failure"] = failure ? json(*failure) : json(nullptr);
  return j;
}

inline json orders_json(const SolutionReport& r) {
  json out = json::array();
  for (const auto& o : r.orders) {
    json support = json::array();
    for (const auto& [k, c] : o.beta.terms()) support.push_back(k);
    out.push_back({{"order", o.order},
                   {"beta_norm", o.beta_norm},
                   {"beta_support", support},
                   {"rho_norm", o.rho_norm},
                   {"residual_norm", o.residual_norm},
                   {"leakage", o.leakage},
                   {"closedness", o.closedness},
                   {"sum_identity", o.sum_identity},
                   {"phi_mismatch", o.phi_mismatch},
                   {"dphi_residual", o.dphi_residual},
                   {"reconstruction", o.reconstruction},
                   {"grading", o.grading},
                   {"cross_check", o.cross_check >= 0.0 ? json(o.cross_check) : json(nullptr)},
                   {"precondition", o.precondition}});
  }
  return out;
}

inline json verification_json(const std::vector<GkVerification>& vs) {
  json out = json::array();
  for (const auto& v : vs)
    out.push_back({{"t", v.t},
                   {"samples", v.samples},
                   {"j1_axioms", v.j1_axioms},
                   {"j2_axioms", v.j2_axioms},
                   {"commutation", v.commutation},
                   {"metric_axioms", v.metric_axioms},
                   {"min_positivity", v.min_positivity},
                   {"dh_norm", v.dh_norm},
                   {"positive", v.positive},
                   {"axioms_ok", v.axioms_ok}});
  return out;
}

/// Per-order a_k, beta_k and psi_k as frequency -> coefficient records.
inline json series_json(const SolutionReport& r) {
  json j;
  j["schema"] = kSeriesSchema;
  j["dimension"] = r.dim;
  j["order"] = r.order;
  json orders = json::array();
  for (int k = 0; k <= r.order; ++k) {
    json e;
    e["order"] = k;
    e["a"] = k <= r.a.order() ? field_json(r.a.at(k), matrix_json) : json::array();
    e["beta"] = k >= 1 ? field_json(r.orders[static_cast<std::size_t>(k - 1)].beta, matrix_json) : json::array();
    e["psi"] = field_json(r.psi.at(k), vector_json);
    orders.push_back(e);
  }
  j["orders"] = orders;
  return j;
}

inline std::string residuals_csv(const SolutionReport& r) {
  std::string out = "order,residual_norm,beta_norm,wall_ms\n";
  for (const auto& o : r.orders)
    out += std::to_string(o.order) + "," + format_double(o.residual_norm) + "," + format_double(o.beta_norm) + "," + format_double(o.wall_ms) + "\n";
  return out;
}

inline std::string text_report(const SuiteResult& s, int exit_code, const std::string& note = "") {
  std::string out = "suite " + s.suite + "\n";
  for (const auto& c : s.checks) {
    char line[256];
    if (c.relation.empty())
      std::snprintf(line, sizeof line, "  %-7s %-34s %.6e\n", to_string(c.status), c.name.c_str(), c.value);
    else
      std::snprintf(line, sizeof line, "  %-7s %-34s %.6e %s %.1e\n", to_string(c.status), c.name.c_str(), c.value, c.relation.c_str(), c.bound);
    out += line;
  }
  if (!note.empty()) out += "  " + note + "\n";
  out += exit_code == 0 ? "result PASS\n" : "result FAIL (exit " + std::to_string(exit_code) + ")\n";
  return out;
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

}  // namespace gks::cli
