// Deterministic serialization: JSON with explicit significant-digit
// formatting (so golden files and repeated runs are byte-identical), CSV
// with fixed column order, and key=value text.
#pragma once

#include <json.hpp>

#include <cstdio>
#include <optional>
#include <string>

#include "liouville/radial.hpp"
#include "liouville/rayleigh.hpp"
#include "liouville/thresholds.hpp"
#include "liouville/verifier.hpp"

namespace liouville {

using Json = nlohmann::ordered_json;

inline constexpr int kDefaultSigDigits = 12;

// %.{sig}g formatting; the 12-digit default round-trips exactly through
// double (parse of the printed decimal re-prints identically).
inline std::string format_number(double v, int sig = kDefaultSigDigits) {
  if (!std::isfinite(v)) return v > 0 ? "1e999" : (v < 0 ? "-1e999" : "null");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", sig, v);
  return buf;
}

namespace detail {

inline void dump_json_rec(const Json& j, int sig, int depth, std::string& out) {
  const std::string pad(static_cast<std::size_t>(2 * depth), ' ');
  const std::string pad1(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad1 + Json(it.key()).dump() + ": ";
        dump_json_rec(it.value(), sig, depth + 1, out);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& el : j) {
        if (!first) out += ",\n";
        first = false;
        out += pad1;
        dump_json_rec(el, sig, depth + 1, out);
      }
      out += "\n" + pad + "]";
      return;
    }
    case Json::value_t::number_float:
      out += format_number(j.get<double>(), sig);
      return;
    default:
      out += j.dump();
      return;
  }
}

inline void dump_text_rec(const Json& j, const std::string& prefix, int sig,
                          std::string& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      dump_text_rec(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), sig,
                    out);
  } else if (j.is_array()) {
    int i = 0;
    for (const auto& el : j) dump_text_rec(el, prefix + "[" + std::to_string(i++) + "]", sig, out);
  } else if (j.is_number_float()) {
    out += prefix + "=" + format_number(j.get<double>(), sig) + "\n";
  } else {
    out += prefix + "=" + j.dump() + "\n";
  }
}

}  // namespace detail

inline std::string dump_json(const Json& j, int sig = kDefaultSigDigits) {
  std::string out;
  detail::dump_json_rec(j, sig, 0, out);
  out += "\n";
  return out;
}

inline std::string dump_text(const Json& j, int sig = kDefaultSigDigits) {
  std::string out;
  detail::dump_text_rec(j, "", sig, out);
  return out;
}

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::yes: return "true";
    case Verdict::no: return "false";
    case Verdict::borderline: return "borderline";
  }
  return "?";
}

inline const char* to_string(SingularClass c) {
  switch (c) {
    case SingularClass::stable: return "stable";
    case SingularClass::unstable: return "unstable";
    case SingularClass::not_in_h2loc: return "not_in_H2loc";
  }
  return "?";
}

inline const char* to_string(RegularityVerdict v) {
  switch (v) {
    case RegularityVerdict::smooth: return "smooth";
    case RegularityVerdict::unknown: return "unknown";
    case RegularityVerdict::borderline: return "borderline";
  }
  return "?";
}

template <typename Scalar>
Json to_json(const ThresholdReport<Scalar>& r) {
  Json j;
  j["p"] = static_cast<double>(r.p);
  j["s0"] = static_cast<double>(r.s0);
  j["x0"] = static_cast<double>(r.x0);
  j["dim_threshold"] = static_cast<double>(r.dim_threshold);
  j["cowan_threshold"] = static_cast<double>(r.cowan_threshold);
  j["x1"] = static_cast<double>(r.x1);
  j["jl4_threshold"] = static_cast<double>(r.jl4_threshold);
  if (r.N) {
    j["N"] = *r.N;
    Json v;
    if (r.thm11_nonexistence) v["thm11_nonexistence"] = to_string(*r.thm11_nonexistence);
    if (r.thm13_halfspace_nonexistence)
      v["thm13_halfspace_nonexistence"] = to_string(*r.thm13_halfspace_nonexistence);
    if (r.thm14_extremal_smooth)
      v["thm14_extremal_smooth"] = to_string(*r.thm14_extremal_smooth);
    if (r.singular_solution) v["singular_solution"] = to_string(*r.singular_solution);
    j["verdicts"] = std::move(v);
  }
  return j;
}

// Fixed CSV column order for threshold/sweep rows.
inline const char* threshold_csv_header() {
  return "p,s0,x0,dim_threshold,cowan_threshold,x1,jl4_threshold";
}

template <typename Scalar>
std::string threshold_csv_row(const ThresholdReport<Scalar>& r,
                              int sig = kDefaultSigDigits) {
  std::string out = format_number(static_cast<double>(r.p), sig);
  for (double v : {static_cast<double>(r.s0), static_cast<double>(r.x0),
                   static_cast<double>(r.dim_threshold),
                   static_cast<double>(r.cowan_threshold), static_cast<double>(r.x1),
                   static_cast<double>(r.jl4_threshold)})
    out += "," + format_number(v, sig);
  return out;
}

inline Json to_json(const VerificationReport& r) {
  Json j;
  j["grid"] = Json{{"p_min", r.grid.p_min}, {"p_max", r.grid.p_max}, {"count", r.grid.count}};
  j["seed"] = r.seed;
  j["samples_per_point"] = r.samples_per_point;
  j["tol"] = r.tol;
  j["mode"] = r.mode;
  j["all_pass"] = r.all_pass();
  Json checks;
  for (const auto& c : r.checks) {
    Json e;
    e["pass"] = c.pass;
    e["worst_abs"] = c.worst_abs;
    e["worst_rel"] = c.worst_rel;
    if (c.failing_p)
      e["failing_p"] = *c.failing_p;
    else
      e["failing_p"] = nullptr;
    e["samples"] = c.samples;
    checks[c.name] = std::move(e);
  }
  j["checks"] = std::move(checks);
  return j;
}

template <typename Scalar>
Json to_json(const RegularityReport<Scalar>& r) {
  Json j;
  j["verdict"] = to_string(r.verdict);
  j["integrability_sup"] = static_cast<double>(r.integrability_sup);
  j["smoothness_lhs"] = static_cast<double>(r.smoothness_lhs);
  j["smoothness_rhs"] = static_cast<double>(r.smoothness_rhs);
  j["consistent"] = r.consistent;
  return j;
}

// Profile summary only; the full profile goes to CSV.
template <typename Scalar>
Json to_json(const RadialSolution<Scalar>& s) {
  Json j;
  j["p"] = static_cast<double>(s.p);
  j["N"] = s.N;
  j["a"] = static_cast<double>(s.a);
  j["event"] = to_string(s.event);
  j["event_radius"] = static_cast<double>(s.event_radius);
  j["steps"] = static_cast<long>(s.size());
  if (s.size() > 0) {
    j["u_last"] = static_cast<double>(s.u.back());
    j["v_last"] = static_cast<double>(s.v.back());
  }
  return j;
}

template <typename Scalar>
std::string profile_csv(const RadialSolution<Scalar>& s, int sig = kDefaultSigDigits) {
  std::string out = "r,u,du,v,dv\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    out += format_number(static_cast<double>(s.r[i]), sig);
    for (double v : {static_cast<double>(s.u[i]), static_cast<double>(s.du[i]),
                     static_cast<double>(s.v[i]), static_cast<double>(s.dv[i])})
      out += "," + format_number(v, sig);
    out += "\n";
  }
  return out;
}

template <typename Scalar>
Json to_json(const RayleighResult<Scalar>& r, bool include_coefficients = true) {
  Json j;
  j["min_quotient"] = static_cast<double>(r.min_quotient);
  j["r_lo"] = static_cast<double>(r.r_lo);
  j["r_hi"] = static_cast<double>(r.r_hi);
  j["basis_size"] = r.basis_size;
  j["elements"] = r.elements;
  j["eig_residual"] = static_cast<double>(r.eig_residual);
  if (include_coefficients) {
    Json arr = Json::array();
    for (Eigen::Index i = 0; i < r.coefficients.size(); ++i)
      arr.push_back(static_cast<double>(r.coefficients[i]));
    j["coefficients"] = std::move(arr);
  }
  return j;
}

template <typename Scalar>
Json to_json(const StabilityConsistency<Scalar>& r) {
  Json j;
  j["p"] = static_cast<double>(r.p);
  j["N"] = r.N;
  j["algebraic_ratio"] = static_cast<double>(r.algebraic_ratio);
  Json arr = Json::array();
  for (const auto& q : r.trajectory)
    arr.push_back(Json{{"decades", static_cast<double>(q.decades)},
                       {"min_quotient", static_cast<double>(q.min_quotient)}});
  j["trajectory"] = std::move(arr);
  j["rayleigh_verdict"] = r.rayleigh_unstable
                              ? "unstable (certified by a finite-domain test function)"
                              : "stable (asymptotic evidence only)";
  j["classification"] = to_string(r.classification);
  j["agree"] = r.agree;
  return j;
}

template <typename Scalar>
Json to_json(const ShootResult<Scalar>& s) {
  Json j;
  j["a_star"] = static_cast<double>(s.a_star);
  j["bracket_lo"] = static_cast<double>(s.bracket_lo);
  j["bracket_hi"] = static_cast<double>(s.bracket_hi);
  j["class_low"] = to_string(s.class_low);
  j["class_high"] = to_string(s.class_high);
  j["integrations"] = s.integrations;
  j["deepest"] = to_json(s.deepest);
  return j;
}

// Envelope for every CLI payload.
inline Json make_record(const std::string& command, Json args, Json result) {
  Json j;
  j["schema_version"] = 1;
  j["command"] = command;
  j["args"] = std::move(args);
  j["result"] = std::move(result);
  return j;
}

}  // namespace liouville
