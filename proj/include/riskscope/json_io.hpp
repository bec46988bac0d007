#pragma once

// JSON documents for distributions, reports, constraints, families and axiom
// checks. Floats are written with 17 significant digits ("%#.17g") so every
// double survives a write/read cycle bit for bit.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "riskscope/ambiguity.hpp"
#include "riskscope/coherence.hpp"
#include "riskscope/dist_core.hpp"
#include "riskscope/measures.hpp"

namespace riskscope::json_io {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Writer
// ---------------------------------------------------------------------------

inline void append_number(std::string& out, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%#.17g", v);
  out += buf;
}

namespace detail {

inline void newline(std::string& out, int indent, int depth) {
  if (indent < 0) return;
  out += '\n';
  out.append(static_cast<std::size_t>(indent * depth), ' ');
}

inline void dump_into(std::string& out, const json& j, int indent, int depth) {
  switch (j.type()) {
    case json::value_t::number_float:
      append_number(out, j.get<double>());
      return;
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ',';
        first = false;
        newline(out, indent, depth + 1);
        dump_into(out, v, indent, depth + 1);
      }
      newline(out, indent, depth);
      out += ']';
      return;
    }
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(out, indent, depth + 1);
        out += json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        dump_into(out, it.value(), indent, depth + 1);
      }
      newline(out, indent, depth);
      out += '}';
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace detail

/// indent < 0: single line.
inline std::string dump(const json& j, int indent = -1) {
  std::string out;
  detail::dump_into(out, j, indent, 0);
  return out;
}

inline json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed JSON: ") + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write " + path);
  out << text;
  if (!out) throw ArgumentError("write failed for " + path);
}

// ---------------------------------------------------------------------------
// Field access helpers
// ---------------------------------------------------------------------------

namespace detail {

inline const json& field(const json& j, const char* key) {
  if (!j.is_object()) throw FormatError("expected a JSON object");
  auto it = j.find(key);
  if (it == j.end()) throw FormatError(std::string("missing field '") + key + "'");
  return *it;
}

inline double number(const json& j, const char* what) {
  if (!j.is_number()) throw FormatError(std::string("expected a number for ") + what);
  return j.get<double>();
}

inline std::string string(const json& j, const char* what) {
  if (!j.is_string()) throw FormatError(std::string("expected a string for ") + what);
  return j.get<std::string>();
}

inline void only_keys(const json& j, std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw FormatError("unexpected field '" + it.key() + "'");
  }
}

template <std::size_t N>
std::array<double, N> tuple(const json& j, const char* what) {
  if (!j.is_array() || j.size() != N)
    throw FormatError(std::string("expected an array of ") + std::to_string(N) + " numbers for " + what);
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = number(j[i], what);
  return out;
}

inline const json& array(const json& j, const char* what) {
  if (!j.is_array()) throw FormatError(std::string("expected an array for ") + what);
  return j;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Distributions
// ---------------------------------------------------------------------------

inline Orientation parse_orientation(const std::string& s) {
  if (s == "loss") return Orientation::loss;
  if (s == "return") return Orientation::returns;
  throw FormatError("orientation must be 'loss' or 'return'");
}

inline json knots_json(const std::vector<Knot>& knots) {
  json a = json::array();
  for (const Knot& k : knots) a.push_back(json::array({k.x, k.f}));
  return a;
}

inline std::vector<Knot> knots_from(const json& j) {
  std::vector<Knot> out;
  for (const auto& item : detail::array(j, "knots")) {
    auto [x, f] = detail::tuple<2>(item, "knot");
    out.push_back({x, f});
  }
  return out;
}

inline json to_json(const Distribution& d) {
  json j;
  j["kind"] = kind_name(d);
  j["orientation"] = to_string(orientation_of(d));
  std::visit(overloaded{
                 [&](const PiecewiseLinearDensity& p) { j["knots"] = knots_json(p.knots); },
                 [&](const TailSpec& t) {
                   j["alpha"] = t.alpha;
                   j["knots"] = knots_json(t.knots);
                 },
                 [&](const DiscreteDistribution& dd) {
                   json a = json::array();
                   for (const Atom& at : dd.atoms) a.push_back(json::array({at.x, at.p}));
                   j["atoms"] = a;
                 },
                 [&](const EmpiricalSample& s) {
                   json a = json::array();
                   for (double v : s.losses) a.push_back(v);
                   j["losses"] = a;
                 },
             },
             d);
  return j;
}

inline Distribution distribution_from_json(const json& j) {
  const std::string kind = detail::string(detail::field(j, "kind"), "kind");
  Orientation o = Orientation::loss;
  if (j.contains("orientation")) o = parse_orientation(detail::string(j["orientation"], "orientation"));
  if (kind == "piecewise_linear") {
    detail::only_keys(j, {"kind", "orientation", "knots"});
    return PiecewiseLinearDensity{knots_from(detail::field(j, "knots")), o};
  }
  if (kind == "tail") {
    detail::only_keys(j, {"kind", "orientation", "alpha", "knots"});
    return TailSpec{detail::number(detail::field(j, "alpha"), "alpha"),
                    knots_from(detail::field(j, "knots")), o};
  }
  if (kind == "discrete") {
    detail::only_keys(j, {"kind", "orientation", "atoms"});
    DiscreteDistribution d{{}, o};
    for (const auto& item : detail::array(detail::field(j, "atoms"), "atoms")) {
      auto [x, p] = detail::tuple<2>(item, "atom");
      d.atoms.push_back({x, p});
    }
    return d;
  }
  if (kind == "empirical") {
    detail::only_keys(j, {"kind", "orientation", "losses"});
    EmpiricalSample s{{}, o};
    for (const auto& v : detail::array(detail::field(j, "losses"), "losses"))
      s.losses.push_back(detail::number(v, "loss"));
    return s;
  }
  throw FormatError("unknown distribution kind '" + kind + "'");
}

inline std::string write_distribution(const Distribution& d) { return dump(to_json(d)); }

inline Distribution read_distribution(const std::string& text) {
  return distribution_from_json(parse(text));
}

inline Distribution load_distribution(const std::string& path) {
  return read_distribution(read_file(path));
}

// ---------------------------------------------------------------------------
// Measures and reports
// ---------------------------------------------------------------------------

inline const char* kind_tag(MeasureKind k) {
  switch (k) {
    case MeasureKind::var:
      return "var";
    case MeasureKind::es:
      return "es";
    case MeasureKind::ml:
      break;
  }
  return "ml";
}

inline void put_spec(json& j, const MeasureSpec& s) {
  j["kind"] = kind_tag(s.kind);
  if (s.kind != MeasureKind::ml) j["level"] = s.level;
  if (s.kind == MeasureKind::es && s.es_mode == EsMode::strict_conditional)
    j["mode"] = "strict_conditional";
}

inline MeasureSpec spec_from_json(const json& j) {
  const std::string kind = detail::string(detail::field(j, "kind"), "kind");
  if (kind == "ml") return MeasureSpec::ml();
  const double level = detail::number(detail::field(j, "level"), "level");
  MeasureSpec s;
  if (kind == "var") {
    s = MeasureSpec::var(level);
  } else if (kind == "es") {
    EsMode mode = EsMode::atom_splitting;
    if (j.contains("mode")) {
      const std::string m = detail::string(j["mode"], "mode");
      if (m == "strict_conditional")
        mode = EsMode::strict_conditional;
      else if (m != "atom_splitting")
        throw FormatError("unknown ES mode '" + m + "'");
    }
    s = MeasureSpec::es(level, mode);
  } else {
    throw FormatError("unknown measure kind '" + kind + "'");
  }
  try {
    validate_spec(s);
  } catch (const ArgumentError& e) {
    throw FormatError(e.what());
  }
  return s;
}

inline json to_json(const MeasureVector& v) {
  json a = json::array();
  for (const auto& e : v.entries) {
    json item;
    put_spec(item, e.spec);
    item["value"] = e.value;
    a.push_back(item);
  }
  return a;
}

inline MeasureVector measure_vector_from_json(const json& j) {
  MeasureVector v;
  for (const auto& item : detail::array(j, "measure vector"))
    v.entries.push_back({spec_from_json(item), detail::number(detail::field(item, "value"), "value")});
  return v;
}

inline json to_json(const RiskReport& r) {
  json j;
  j["dist_id"] = r.dist_id;
  json entries = json::array();
  for (const auto& e : r.entries) {
    json item;
    put_spec(item, e.spec);
    item["value"] = e.value;
    item["method"] = e.method == EvaluationMethod::closed_form ? "closed_form" : "monte_carlo";
    if (e.standard_error) item["se"] = *e.standard_error;
    entries.push_back(item);
  }
  j["entries"] = entries;
  return j;
}

inline RiskReport report_from_json(const json& j) {
  RiskReport r{detail::string(detail::field(j, "dist_id"), "dist_id"), {}};
  for (const auto& item : detail::array(detail::field(j, "entries"), "entries")) {
    ReportEntry e{spec_from_json(item), detail::number(detail::field(item, "value"), "value"),
                  EvaluationMethod::closed_form, std::nullopt};
    const std::string method = detail::string(detail::field(item, "method"), "method");
    if (method == "monte_carlo")
      e.method = EvaluationMethod::monte_carlo;
    else if (method != "closed_form")
      throw FormatError("unknown method '" + method + "'");
    if (item.contains("se")) e.standard_error = detail::number(item["se"], "se");
    if ((e.method == EvaluationMethod::monte_carlo) != e.standard_error.has_value())
      throw FormatError("se must be present exactly for monte_carlo entries");
    r.entries.push_back(e);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Constraints and families
// ---------------------------------------------------------------------------

inline json to_json(const ConstraintSet& cs) {
  json j;
  j["alpha"] = cs.alpha;
  json targets = json::array();
  for (const auto& t : cs.targets) {
    json item;
    put_spec(item, t.spec);
    item["value"] = t.value;
    targets.push_back(item);
  }
  j["targets"] = targets;
  json nested = json::array();
  for (double l : cs.nested_levels) nested.push_back(l);
  j["nested_levels"] = nested;
  return j;
}

inline ConstraintSet constraints_from_json(const json& j) {
  detail::only_keys(j, {"alpha", "targets", "nested_levels"});
  ConstraintSet cs;
  cs.alpha = detail::number(detail::field(j, "alpha"), "alpha");
  for (const auto& item : detail::array(detail::field(j, "targets"), "targets"))
    cs.targets.push_back({spec_from_json(item), detail::number(detail::field(item, "value"), "value")});
  if (j.contains("nested_levels"))
    for (const auto& l : detail::array(j["nested_levels"], "nested_levels"))
      cs.nested_levels.push_back(detail::number(l, "nested level"));
  return cs;
}

inline json to_json(const FamilyVerification& v) {
  json j;
  j["passes"] = v.passes;
  j["worst_deviation"] = v.worst_deviation;
  j["worst_member"] = v.worst_member ? json(*v.worst_member) : json(nullptr);
  j["worst_spec"] = v.worst_spec ? json(to_string(*v.worst_spec)) : json(nullptr);
  j["min_l1"] = std::isfinite(v.min_l1) ? json(v.min_l1) : json(nullptr);
  j["min_pair"] = v.min_pair ? json::array({v.min_pair->first, v.min_pair->second}) : json(nullptr);
  j["failures"] = v.failures;
  return j;
}

inline json to_json(const AmbiguityFamily& f) {
  json j;
  json members = json::array();
  for (const auto& m : f.members) members.push_back(to_json(Distribution{m}));
  j["members"] = members;
  j["labels"] = f.labels;
  j["shared"] = to_json(f.shared);
  json l1 = json::array();
  for (const auto& row : f.l1) {
    json r = json::array();
    for (double d : row) r.push_back(d);
    l1.push_back(r);
  }
  j["l1"] = l1;
  j["min_separation"] = f.min_separation;
  return j;
}

inline AmbiguityFamily family_from_json(const json& j) {
  AmbiguityFamily f;
  for (const auto& m : detail::array(detail::field(j, "members"), "members")) {
    auto d = distribution_from_json(m);
    if (!std::holds_alternative<TailSpec>(d)) throw FormatError("family members must be tails");
    f.members.push_back(std::get<TailSpec>(d));
  }
  if (j.contains("labels"))
    for (const auto& l : j["labels"]) f.labels.push_back(detail::string(l, "label"));
  f.shared = measure_vector_from_json(detail::field(j, "shared"));
  f.min_separation = detail::number(detail::field(j, "min_separation"), "min_separation");
  f.l1 = pairwise_l1(f.members);
  return f;
}

inline json to_json(const DistinguishResult& r) {
  json j;
  j["separable"] = r.separable;
  json subset = json::array();
  for (const auto& s : r.subset) subset.push_back(to_string(s));
  j["subset"] = subset;
  json vectors = json::array();
  for (const auto& v : r.vectors) vectors.push_back(to_json(v));
  j["vectors"] = vectors;
  json pairs = json::array();
  for (const auto& [a, b] : r.unseparated) pairs.push_back(json::array({a, b}));
  j["unseparated_pairs"] = pairs;
  return j;
}

// ---------------------------------------------------------------------------
// Coherence
// ---------------------------------------------------------------------------

inline json to_json(const JointDiscrete& jd) {
  json a = json::array();
  for (const auto& o : jd.outcomes) a.push_back(json::array({o.loss1, o.loss2, o.p}));
  json j;
  j["outcomes"] = a;
  return j;
}

inline JointDiscrete joint_from_json(const json& j) {
  JointDiscrete jd;
  for (const auto& item : detail::array(detail::field(j, "outcomes"), "outcomes")) {
    auto [l1, l2, p] = detail::tuple<3>(item, "joint outcome");
    jd.outcomes.push_back({l1, l2, p});
  }
  return jd;
}

inline json to_json(const AxiomParams& p) {
  json j;
  std::visit(overloaded{
                 [&](const Translation& t) { j["translation"] = t.a; },
                 [&](const Homogeneity& h) { j["homogeneity"] = h.k; },
                 [&](const Monotonicity&) { j["monotonicity"] = nullptr; },
             },
             p);
  return j;
}

inline json to_json(const AxiomCheckResult& r) {
  json j;
  j["axiom"] = to_string(r.axiom);
  json m;
  put_spec(m, r.measure);
  j["measure"] = m;
  j["verdict"] = to_string(r.verdict);
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  if (r.witness) {
    json w;
    if (r.witness->distribution) w["distribution"] = to_json(*r.witness->distribution);
    if (r.witness->params) w["params"] = to_json(*r.witness->params);
    if (r.witness->joint) {
      w["joint"] = to_json(*r.witness->joint);
      w["rho_sum"] = r.witness->rho_sum;
      w["rho_first"] = r.witness->rho_first;
      w["rho_second"] = r.witness->rho_second;
    }
    j["witness"] = w;
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

}  // namespace riskscope::json_io
