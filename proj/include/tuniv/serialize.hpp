#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "tuniv/builder.hpp"
#include "tuniv/curves.hpp"
#include "tuniv/series.hpp"
#include "tuniv/verify.hpp"

namespace tuniv {

using json = nlohmann::json;  // object keys are kept sorted

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kFormatVersion = 1;

// ---------------------------------------------------------------------------
// Canonical serialization: sorted keys, compact separators, doubles as
// decimal numbers with 17 significant digits. Canonical output is what gets
// hashed and what the determinism contract is stated against.
// ---------------------------------------------------------------------------

namespace detail {

inline void canonical_number(std::string& out, double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("canonical_dump: non-finite number");
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  out.append(buf, res.ptr);
}

inline void canonical_write(std::string& out, const json& j) {
  switch (j.type()) {
    case json::value_t::null:
      out += "null";
      break;
    case json::value_t::boolean:
      out += j.get<bool>() ? "true" : "false";
      break;
    case json::value_t::number_integer:
      out += std::to_string(j.get<std::int64_t>());
      break;
    case json::value_t::number_unsigned:
      out += std::to_string(j.get<std::uint64_t>());
      break;
    case json::value_t::number_float:
      canonical_number(out, j.get<double>());
      break;
    case json::value_t::string:
      out += json(j.get<std::string>()).dump();  // reuse the escaping rules
      break;
    case json::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& el : j) {
        if (!first) out += ',';
        first = false;
        canonical_write(out, el);
      }
      out += ']';
      break;
    }
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += json(it.key()).dump();
        out += ':';
        canonical_write(out, it.value());
      }
      out += '}';
      break;
    }
    default:
      throw std::invalid_argument("canonical_dump: unsupported json type");
  }
}

}  // namespace detail

inline std::string canonical_dump(const json& j) {
  std::string out;
  detail::canonical_write(out, j);
  out += '\n';
  return out;
}

inline std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf, 16);
}

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::invalid_argument("cannot open for writing: " + path);
  os << bytes;
}

inline std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::invalid_argument("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Field codecs
// ---------------------------------------------------------------------------

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx cplx_from_json(const json& j) {
  return cplx(j.at(0).get<double>(), j.at(1).get<double>());
}

inline json to_json(const Interval& iv) {
  auto bound = [](double v) -> json {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
  };
  return json{{"lo", bound(iv.lo)},
              {"hi", bound(iv.hi)},
              {"lo_closed", iv.lo_closed},
              {"hi_closed", iv.hi_closed}};
}

inline json family_to_json(const CurveFamily& f) {
  const char* cov = f.coverage == Coverage::Full      ? "full"
                    : f.coverage == Coverage::Partial ? "partial"
                                                      : "accumulating";
  return json{{"kind", f.name},
              {"coverage", cov},
              {"params", json::object()},
              {"domain", to_json(f.curve_interval)},
              {"param_interval", to_json(f.param_interval)}};
}

inline CurveFamily family_from_json(const json& j) {
  if (j.is_string()) return family_by_name(j.get<std::string>());
  return family_by_name(j.at("kind").get<std::string>());
}

inline json task_to_json(const Task& t) {
  json target;
  if (t.target_index) {
    target["poly_index"] = t.target_index->str();
  } else {
    json coeffs = json::array();
    for (const cplx& c : *t.target_coeffs) coeffs.push_back(to_json(c));
    target["coeffs"] = coeffs;
  }
  json zeta;
  if (t.zeta_index)
    zeta["index"] = *t.zeta_index;
  else
    zeta["point"] = to_json(*t.zeta_point);
  json curve;
  if (t.curve_l)
    curve["l"] = *t.curve_l;
  else if (t.curve_alpha)
    curve["alpha"] = *t.curve_alpha;
  else
    curve["auto"] = true;
  return json{{"m", t.m},     {"s", t.s},       {"t", t.t},
              {"target", target}, {"zeta", zeta}, {"curve", curve}};
}

inline Task task_from_json(const json& j) {
  Task t;
  t.m = j.at("m").get<std::uint64_t>();
  t.s = j.at("s").get<std::uint64_t>();
  t.t = j.at("t").get<std::uint64_t>();
  const json& target = j.at("target");
  if (target.contains("poly_index")) {
    t.target_index = bigint(target.at("poly_index").get<std::string>());
  } else {
    std::vector<cplx> coeffs;
    for (const auto& c : target.at("coeffs")) coeffs.push_back(cplx_from_json(c));
    t.target_coeffs = coeffs;
  }
  const json& zeta = j.at("zeta");
  if (zeta.contains("index"))
    t.zeta_index = zeta.at("index").get<std::uint64_t>();
  else
    t.zeta_point = cplx_from_json(zeta.at("point"));
  const json& curve = j.at("curve");
  if (curve.contains("l"))
    t.curve_l = curve.at("l").get<std::uint64_t>();
  else if (curve.contains("alpha"))
    t.curve_alpha = curve.at("alpha").get<double>();
  return t;
}

inline json poly_to_json(const Polynomial& p) {
  json j;
  j["authority"] = p.authority() == PolyAuthority::Monomial ? "monomial" : "recurrence";
  json mono = json::array();
  for (const cplx& c : p.monomial_coeffs()) mono.push_back(to_json(c));
  j["monomial"] = mono;
  j["monomial_reliable"] = p.monomial_reliable();
  if (p.authority() == PolyAuthority::Recurrence) {
    json cols = json::array();
    for (const auto& col : p.recurrence()) {
      json c = json::array();
      for (const cplx& h : col) c.push_back(to_json(h));
      cols.push_back(c);
    }
    json coefs = json::array();
    for (const cplx& c : p.recurrence_coeffs()) coefs.push_back(to_json(c));
    j["recurrence"] = json{{"norm0", p.recurrence_norm0()},
                           {"columns", cols},
                           {"coeffs", coefs}};
  }
  return j;
}

inline Polynomial poly_from_json(const json& j) {
  std::vector<cplx> mono;
  for (const auto& c : j.at("monomial")) mono.push_back(cplx_from_json(c));
  if (j.at("authority").get<std::string>() == "monomial")
    return Polynomial::from_coeffs(std::move(mono));
  const json& rec = j.at("recurrence");
  std::vector<std::vector<cplx>> cols;
  for (const auto& colj : rec.at("columns")) {
    std::vector<cplx> col;
    for (const auto& h : colj) col.push_back(cplx_from_json(h));
    cols.push_back(std::move(col));
  }
  std::vector<cplx> coefs;
  for (const auto& c : rec.at("coeffs")) coefs.push_back(cplx_from_json(c));
  return Polynomial::from_recurrence(rec.at("norm0").get<double>(), std::move(cols),
                                     std::move(coefs), std::move(mono),
                                     j.at("monomial_reliable").get<bool>());
}

inline json witness_to_json(const Witness& w) {
  json j{{"task_index", w.task_index},
         {"m", w.m},
         {"j", w.target_index.str()},
         {"p", w.p},
         {"s", w.s},
         {"t", w.t},
         {"l", w.l},
         {"k", w.k},
         {"n", w.n},
         {"a", w.a},
         {"b", to_json(w.b)},
         {"zeta", to_json(w.zeta)},
         {"window", json{{"center", to_json(w.window.center)}, {"radius", w.window.radius}}},
         {"delta", w.delta},
         {"achieved_error", w.achieved_error},
         {"b_dist", w.b_dist},
         {"fit_degree", w.fit_degree},
         {"control_n", w.control_n},
         {"control_phase", w.control_phase}};
  if (w.curve_alpha) j["curve_alpha"] = *w.curve_alpha;
  if (w.target_coeffs) {
    json coeffs = json::array();
    for (const cplx& c : *w.target_coeffs) coeffs.push_back(to_json(c));
    j["target_coeffs"] = coeffs;
  }
  return j;
}

inline Witness witness_from_json(const json& j) {
  Witness w;
  w.task_index = j.at("task_index").get<std::size_t>();
  w.m = j.at("m").get<std::uint64_t>();
  w.target_index = bigint(j.at("j").get<std::string>());
  w.p = j.at("p").get<std::uint64_t>();
  w.s = j.at("s").get<std::uint64_t>();
  w.t = j.at("t").get<std::uint64_t>();
  w.l = j.at("l").get<std::uint64_t>();
  w.k = j.at("k").get<std::uint64_t>();
  w.n = j.at("n").get<std::uint64_t>();
  w.a = j.at("a").get<double>();
  w.b = cplx_from_json(j.at("b"));
  w.zeta = cplx_from_json(j.at("zeta"));
  w.window = Disk{cplx_from_json(j.at("window").at("center")),
                  j.at("window").at("radius").get<double>()};
  w.delta = j.at("delta").get<double>();
  w.achieved_error = j.at("achieved_error").get<double>();
  w.b_dist = j.at("b_dist").get<double>();
  w.fit_degree = j.at("fit_degree").get<int>();
  w.control_n = j.at("control_n").get<int>();
  w.control_phase = j.at("control_phase").get<double>();
  if (j.contains("curve_alpha")) w.curve_alpha = j.at("curve_alpha").get<double>();
  if (j.contains("target_coeffs")) {
    std::vector<cplx> coeffs;
    for (const auto& c : j.at("target_coeffs")) coeffs.push_back(cplx_from_json(c));
    w.target_coeffs = coeffs;
  }
  return w;
}

inline json budgets_to_json(const BudgetLedger& b) {
  return json{{"tail_budget", b.tail_budget},
              {"step_tau", b.step_tau},
              {"slack_budget", b.slack_budget},
              {"slack_consumed", b.slack_consumed}};
}

inline BudgetLedger budgets_from_json(const json& j) {
  BudgetLedger b;
  b.tail_budget = j.at("tail_budget").get<double>();
  b.step_tau = j.at("step_tau").get<std::vector<double>>();
  b.slack_budget = j.at("slack_budget").get<std::vector<double>>();
  b.slack_consumed = j.at("slack_consumed").get<std::vector<double>>();
  return b;
}

// ---------------------------------------------------------------------------
// Versioned documents
// ---------------------------------------------------------------------------

inline json series_to_json(const UniversalSeries& s, const std::string& config_hash) {
  json corrections = json::array();
  for (const auto& q : s.corrections) corrections.push_back(poly_to_json(q));
  json witnesses = json::array();
  for (const auto& w : s.witnesses) witnesses.push_back(witness_to_json(w));
  return json{{"format_version", kFormatVersion},
              {"tool_version", kToolVersion},
              {"config_hash", config_hash},
              {"family", s.family_name},
              {"corrections", corrections},
              {"witnesses", witnesses},
              {"budgets", budgets_to_json(s.budgets)}};
}

inline UniversalSeries series_from_json(const json& j, bool allow_version_mismatch = false) {
  if (j.at("format_version").get<int>() != kFormatVersion)
    throw std::invalid_argument("series file: unsupported format version");
  if (!allow_version_mismatch && j.at("tool_version").get<std::string>() != kToolVersion)
    throw std::invalid_argument(
        "series file written by tool version " + j.at("tool_version").get<std::string>() +
        ", current is " + kToolVersion + " (pass --allow-version-mismatch to proceed)");
  UniversalSeries s;
  s.family_name = j.at("family").get<std::string>();
  for (const auto& q : j.at("corrections")) s.corrections.push_back(poly_from_json(q));
  for (const auto& w : j.at("witnesses")) s.witnesses.push_back(witness_from_json(w));
  s.budgets = budgets_from_json(j.at("budgets"));
  return s;
}

inline json certificate_to_json(const Certificate& c, const std::string& config_hash) {
  return json{{"format_version", kFormatVersion},
              {"tool_version", kToolVersion},
              {"config_hash", config_hash},
              {"witness", witness_to_json(c.witness)},
              {"pass", c.pass},
              {"margin", c.margin},
              {"n_control", c.n_control},
              {"phase", c.phase},
              {"reason", c.reason}};
}

inline Certificate certificate_from_json(const json& j) {
  Certificate c;
  c.witness = witness_from_json(j.at("witness"));
  c.pass = j.at("pass").get<bool>();
  c.margin = j.at("margin").get<double>();
  c.n_control = j.at("n_control").get<int>();
  c.phase = j.at("phase").get<double>();
  c.reason = j.at("reason").get<std::string>();
  return c;
}

inline json continuity_report_to_json(const ContinuityReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries) {
    json w{{"value", e.witness.value}, {"is_endpoint", e.witness.is_endpoint}};
    if (!e.witness.is_endpoint) {
      w["num"] = e.witness.num;
      w["den"] = e.witness.den;
    }
    entries.push_back(json{{"alpha", e.alpha}, {"ok", e.ok}, {"witness", w}});
  }
  return json{{"format_version", kFormatVersion},
              {"tool_version", kToolVersion},
              {"delta", r.delta},
              {"j", r.j},
              {"pass", r.pass},
              {"entries", entries}};
}

}  // namespace tuniv
