#pragma once

// Registry of the worked example families: tails rebuilt from their quoted
// (VaR, ES, ML) values, the two synthesized families and the loan portfolio.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "riskscope/ambiguity.hpp"
#include "riskscope/coherence.hpp"
#include "riskscope/dist_core.hpp"
#include "riskscope/json_io.hpp"
#include "riskscope/measures.hpp"

namespace riskscope::scenarios {

enum class Provenance { quoted, derived };

inline const char* to_string(Provenance p) { return p == Provenance::quoted ? "quoted" : "derived"; }

struct ExpectedValue {
  MeasureSpec spec;
  double value;
  Provenance provenance;
  std::string note;
  double tolerance = 1e-12;
};

struct ExpectedAtom {
  Atom atom;
  Provenance provenance;
  std::string note;
};

struct Member {
  std::string label;
  Distribution dist;
  std::vector<ExpectedValue> expected;
  std::vector<ExpectedAtom> expected_atoms;  // exact probabilities, discrete members only
};

struct DistinguishClaim {
  std::vector<MeasureSpec> menu;
  bool separable;
  std::vector<MeasureSpec> subset;                               // when separable
  std::vector<std::pair<std::size_t, std::size_t>> unseparated;  // when not; empty means unchecked
  std::string note;
};

struct SubadditivityClaim {
  MeasureSpec spec;
  Verdict verdict;
  std::string note;
};

struct ScenarioFixture {
  std::string id;
  std::string narrative;
  std::vector<Member> members;
  std::vector<DistinguishClaim> claims;
  std::optional<JointDiscrete> joint;  // for subadditivity claims
  std::vector<SubadditivityClaim> subadditivity;
};

namespace detail {

inline constexpr double kAlpha = 0.95;

enum class Shape { uniform, rising, falling };

inline TailSpec tail(Shape s, double c, double d) {
  const double mass = 1.0 - kAlpha;
  switch (s) {
    case Shape::uniform:
      return {kAlpha, shapes::uniform(c, d, mass), Orientation::loss};
    case Shape::rising:
      return {kAlpha, shapes::rising(c, d, mass), Orientation::loss};
    case Shape::falling:
      break;
  }
  return {kAlpha, shapes::falling(c, d, mass), Orientation::loss};
}

inline ExpectedValue q(MeasureSpec s, double v, std::string note) {
  return {s, v, Provenance::quoted, std::move(note)};
}
inline ExpectedValue dv(MeasureSpec s, double v, std::string note) {
  return {s, v, Provenance::derived, std::move(note)};
}

inline const MeasureSpec kVar = MeasureSpec::var(0.95);
inline const MeasureSpec kEs = MeasureSpec::es(0.95);
inline const MeasureSpec kMl = MeasureSpec::ml();

inline std::vector<MeasureSpec> menu(std::initializer_list<MeasureSpec> specs) { return specs; }

inline DistinguishClaim separates(std::vector<MeasureSpec> m, std::vector<MeasureSpec> subset,
                                  std::string note) {
  return {std::move(m), true, std::move(subset), {}, std::move(note)};
}

inline DistinguishClaim blind(std::vector<MeasureSpec> m,
                              std::vector<std::pair<std::size_t, std::size_t>> pairs, std::string note) {
  return {std::move(m), false, {}, std::move(pairs), std::move(note)};
}

inline ScenarioFixture fig2() {
  ScenarioFixture f{"fig2", "Tails with VaR95 = 0: ES confuses X2 and X3, ML separates all three", {}, {}, {}, {}};
  f.members = {
      {"X1 uniform [0,5]", tail(Shape::uniform, 0, 5),
       {q(kVar, 0, "VaR95 is 0 in each case"), q(kEs, 2.5, "ES95(X1) = 5/2"), q(kMl, 5, "ML(X1) = 5")}, {}},
      {"X2 falling [0,20]", tail(Shape::falling, 0, 20),
       {q(kVar, 0, "VaR95 is 0 in each case"), q(kEs, 20.0 / 3, "ES95(X2) = 20/3"), q(kMl, 20, "ML(X2) = 20")},
       {}},
      {"X3 rising [0,10]", tail(Shape::rising, 0, 10),
       {q(kVar, 0, "VaR95 is 0 in each case"), q(kEs, 20.0 / 3, "ES95(X3) = 20/3"), q(kMl, 10, "ML(X3) = 10")},
       {}},
  };
  f.claims = {blind(menu({kEs}), {{1, 2}}, "ES95(X2) = 20/3 = ES95(X3)"),
              separates(menu({kMl}), {kMl}, "ML distinguishes each of the three"),
              separates(menu({kVar, kEs, kMl}), {kMl}, "ML distinguishes each of the three")};
  return f;
}

inline ScenarioFixture fig3() {
  ScenarioFixture f{"fig3", "Tails with ES95 = 10: ML identifies the three situations", {}, {}, {}, {}};
  f.members = {
      {"X1 uniform [4,16]", tail(Shape::uniform, 4, 16),
       {q(kVar, 4, "VaR(X1) = 4"), q(kEs, 10, "same ES95 of 10"), q(kMl, 16, "ML(X1) = 16")}, {}},
      {"X2 rising [0,15]", tail(Shape::rising, 0, 15),
       {q(kVar, 0, "VaR(X2) = 0"), q(kEs, 10, "same ES95 of 10"), q(kMl, 15, "ML(X2) = 15")}, {}},
      {"X3 falling [0,30]", tail(Shape::falling, 0, 30),
       {q(kVar, 0, "VaR(X3) = 0"), q(kEs, 10, "same ES95 of 10"), q(kMl, 30, "ML(X3) = 30")}, {}},
  };
  f.claims = {blind(menu({kEs}), {{0, 1}, {0, 2}, {1, 2}}, "same ES95 of 10"),
              separates(menu({kVar, kEs, kMl}), {kMl}, "ML once again identifies the three")};
  return f;
}

inline ScenarioFixture fig4() {
  ScenarioFixture f{"fig4", "Tails with ML = 5: ES sorts out the three", {}, {}, {}, {}};
  f.members = {
      {"X1 falling [-5,5]", tail(Shape::falling, -5, 5),
       {q(kVar, -5, "VaR(X1) = -5"), q(kEs, -5.0 / 3, "ES(X1) = -5/3"), q(kMl, 5, "no probability after 5")}, {}},
      {"X2 rising [0,5]", tail(Shape::rising, 0, 5),
       {q(kVar, 0, "VaR(X2) = 0"), q(kEs, 10.0 / 3, "ES(X2) = 10/3"), q(kMl, 5, "no probability after 5")}, {}},
      {"X3 uniform [0,5]", tail(Shape::uniform, 0, 5),
       {q(kVar, 0, "VaR(X3) = 0"), q(kEs, 2.5, "ES(X3) = 5/2"), q(kMl, 5, "no probability after 5")}, {}},
  };
  f.claims = {blind(menu({kMl}), {{0, 1}, {0, 2}, {1, 2}}, "same ML of 5"),
              separates(menu({kEs}), {kEs}, "ES sorts out the different distributions")};
  return f;
}

inline ScenarioFixture fig5() {
  ScenarioFixture f{"fig5", "VaR95 and ES95 together do not distinguish; ML does", {}, {}, {}, {}};
  f.members = {
      {"X1 uniform [0,20]", tail(Shape::uniform, 0, 20),
       {q(kVar, 0, "VaR95 of 0"), q(kEs, 10, "ES95 of 10"), q(kMl, 20, "ML(X1) = 20")}, {}},
      {"X2 rising [0,15]", tail(Shape::rising, 0, 15),
       {q(kVar, 0, "VaR95 of 0"), q(kEs, 10, "ES95 of 10"), q(kMl, 15, "ML(X2) = 15")}, {}},
      {"X3 falling [0,30]", tail(Shape::falling, 0, 30),
       {q(kVar, 0, "VaR95 of 0"), q(kEs, 10, "ES95 of 10"), q(kMl, 30, "ML(X3) = 30")}, {}},
  };
  f.claims = {blind(menu({kVar, kEs}), {{0, 1}, {0, 2}, {1, 2}}, "VaR and ES do not distinguish"),
              separates(menu({kVar, kEs, kMl}), {kMl}, "ML will distinguish")};
  return f;
}

inline ScenarioFixture fig6() {
  ScenarioFixture f{"fig6", "VaR95 and ML together do not distinguish; ES does", {}, {}, {}, {}};
  f.members = {
      {"X1 falling [0,5]", tail(Shape::falling, 0, 5),
       {q(kVar, 0, "VaR95s of 0"), q(kEs, 5.0 / 3, "ES(X1) = 5/3"), q(kMl, 5, "MLs of 5")}, {}},
      {"X2 uniform [0,5]", tail(Shape::uniform, 0, 5),
       {q(kVar, 0, "VaR95s of 0"), q(kEs, 2.5, "ES(X2) = 5/2"), q(kMl, 5, "MLs of 5")}, {}},
      {"X3 rising [0,5]", tail(Shape::rising, 0, 5),
       {q(kVar, 0, "VaR95s of 0"), q(kEs, 10.0 / 3, "ES(X3) = 10/3"), q(kMl, 5, "MLs of 5")}, {}},
  };
  f.claims = {blind(menu({kVar, kMl}), {{0, 1}, {0, 2}, {1, 2}}, "VaR and ML leave ambiguity"),
              separates(menu({kEs}), {kEs}, "ES will distinguish")};
  return f;
}

inline ScenarioFixture fig7() {
  ScenarioFixture f{"fig7", "ES95 and ML together do not distinguish; VaR does", {}, {}, {}, {}};
  f.members = {
      {"X1 uniform [-5,15]", tail(Shape::uniform, -5, 15),
       {q(kVar, -5, "VaR(X1) = -5"), q(kEs, 5, "ES95s of 5"), q(kMl, 15, "MLs of 15")}, {}},
      {"X2 rising [-15,15]", tail(Shape::rising, -15, 15),
       {q(kVar, -15, "VaR(X2) = -15"), q(kEs, 5, "ES95s of 5"), q(kMl, 15, "MLs of 15")}, {}},
      {"X3 falling [0,15]", tail(Shape::falling, 0, 15),
       {q(kVar, 0, "VaR(X3) = 0"), q(kEs, 5, "ES95s of 5"), q(kMl, 15, "MLs of 15")}, {}},
  };
  f.claims = {blind(menu({kEs, kMl}), {{0, 1}, {0, 2}, {1, 2}}, "ES and ML leave ambiguity"),
              separates(menu({kVar}), {kVar}, "VaR does differentiate")};
  return f;
}

inline ConstraintSet three_measure_constraints() {
  return {kAlpha, {{kVar, 0.0}, {kEs, 5.0}, {kMl, 10.0}}, {}};
}

// Uniform [0,10]: the 1% sub-tail is [8,10], so VaR99 = 8 and ES99 = 9.
inline ConstraintSet five_measure_constraints() {
  return {kAlpha,
          {{kVar, 0.0}, {MeasureSpec::var(0.99), 8.0}, {kEs, 5.0}, {MeasureSpec::es(0.99), 9.0}, {kMl, 10.0}},
          {}};
}

inline ScenarioFixture synthesized(std::string id, std::string narrative, const ConstraintSet& cs,
                                   std::size_t k, Provenance prov, const std::string& note) {
  const AmbiguityFamily fam = synthesize_family(cs, k);
  ScenarioFixture f{std::move(id), std::move(narrative), {}, {}, {}, {}};
  for (std::size_t i = 0; i < fam.members.size(); ++i) {
    Member m{"X" + std::to_string(i + 1) + " " + fam.labels[i], fam.members[i], {}, {}};
    for (const auto& t : cs.targets) m.expected.push_back({t.spec, t.value, prov, note});
    f.members.push_back(std::move(m));
  }
  std::vector<std::pair<std::size_t, std::size_t>> all;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) all.push_back({i, j});
  f.claims = {blind(cs.specs(), all, "members share every reported measure")};
  return f;
}

inline ScenarioFixture fig8() {
  return synthesized("fig8", "Four tails with VaR95 = 0, ES95 = 5 and ML = 10", three_measure_constraints(), 4,
                     Provenance::quoted, "VaR95 of 0, ES95 of 5 and ML of 10");
}

inline ScenarioFixture fig9() {
  return synthesized("fig9", "Three tails sharing all five measures of the uniform [0,10] tail",
                     five_measure_constraints(), 3, Provenance::derived,
                     "uniform [0,10] geometry: sub-tail [8,10] at 99%");
}

inline ScenarioFixture loans() {
  const auto ex = loan_counterexample();
  const DiscreteDistribution small = marginal1(ex.pair);
  const DiscreteDistribution pair = sum_distribution(ex.pair);
  ScenarioFixture f{"loans", "VaR95 penalizes diversifying into two independent $1M loans", {}, {}, {}, {}};
  // ES values: a single loan puts 0.04 of the 0.05 tail at its principal.
  ExpectedValue es_small = dv(kEs, 800000.0, "0.04 * 1e6 / 0.05");
  ExpectedValue es_big = dv(kEs, 1600000.0, "0.04 * 2e6 / 0.05");
  ExpectedValue es_pair = dv(kEs, 1032000.0, "(0.0016 * 2e6 + 0.0484 * 1e6) / 0.05");
  for (ExpectedValue* e : {&es_small, &es_big, &es_pair}) e->tolerance = 1e-6;
  f.members = {
      {"$1M loan", small, {q(kVar, 0, "VaR95 for each loan is 0"), es_small, dv(kMl, 1e6, "principal")}, {}},
      {"$2M loan", ex.big_loan,
       {q(kVar, 0, "the $2M loan has a VaR95 of 0"), es_big, dv(kMl, 2e6, "principal")},
       {}},
      {"two $1M loans", pair,
       {q(kVar, 1e6, "VaR95 of the diversified portfolio is $1 million"), es_pair, dv(kMl, 2e6, "both default")},
       {{{0.0, 0.9216}, Provenance::derived, "0.96^2"},
        {{1e6, 0.0768}, Provenance::quoted, "exactly one default: 0.0768"},
        {{2e6, 0.0016}, Provenance::quoted, "both default: 0.0016"}}},
  };
  f.joint = ex.pair;
  f.subadditivity = {{kVar, Verdict::violated, "VaR does not favor diversification"},
                     {kEs, Verdict::holds_on_cases, "ES is subadditive"}};
  return f;
}

using Factory = ScenarioFixture (*)();

inline const std::vector<std::pair<std::string, Factory>>& registry() {
  static const std::vector<std::pair<std::string, Factory>> r = {
      {"fig2", fig2}, {"fig3", fig3}, {"fig4", fig4}, {"fig5", fig5}, {"fig6", fig6},
      {"fig7", fig7}, {"fig8", fig8}, {"fig9", fig9}, {"loans", loans}};
  return r;
}

}  // namespace detail

inline std::vector<std::string> registered_ids() {
  std::vector<std::string> out;
  for (const auto& [id, _] : detail::registry()) out.push_back(id);
  return out;
}

inline ScenarioFixture load(const std::string& id) {
  for (const auto& [name, make] : detail::registry())
    if (name == id) return make();
  throw ArgumentError("unknown scenario '" + id + "'");
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

struct ValueCheck {
  std::size_t member;
  std::string what;  // measure spec or "P(x)"
  double expected;
  double actual;
  double tolerance;
  Provenance provenance;
  std::string note;
  bool pass;
};

struct ClaimCheck {
  DistinguishClaim claim;
  DistinguishResult result;
  bool pass;
};

struct AxiomCheck {
  SubadditivityClaim claim;
  AxiomCheckResult result;
  bool pass;
};

struct FixtureReport {
  std::string id;
  std::string narrative;
  std::vector<std::string> labels;
  std::vector<MeasureVector> vectors;  // five-measure vector per member
  std::vector<ValueCheck> values;
  std::vector<ClaimCheck> claims;
  std::vector<AxiomCheck> axioms;
  DistinguishResult five_measure;
  bool passes = true;
};

struct ScenarioReport {
  std::vector<FixtureReport> fixtures;
  bool passes = true;
  std::size_t failures = 0;
};

namespace detail {

inline bool same_pairs(std::vector<std::pair<std::size_t, std::size_t>> a,
                       std::vector<std::pair<std::size_t, std::size_t>> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

}  // namespace detail

inline FixtureReport run_fixture(const ScenarioFixture& f) {
  FixtureReport r;
  r.id = f.id;
  r.narrative = f.narrative;
  std::vector<Distribution> dists;
  for (std::size_t i = 0; i < f.members.size(); ++i) {
    const Member& m = f.members[i];
    r.labels.push_back(m.label);
    dists.push_back(m.dist);
    r.vectors.push_back(evaluate_vector(m.dist, five_measure_menu()));
    for (const auto& e : m.expected) {
      const double got = evaluate(m.dist, e.spec);
      const bool ok = std::abs(got - e.value) <= e.tolerance;
      r.values.push_back({i, to_string(e.spec), e.value, got, e.tolerance, e.provenance, e.note, ok});
    }
    for (const auto& a : m.expected_atoms) {
      const auto* dd = std::get_if<DiscreteDistribution>(&m.dist);
      double got = 0.0;
      if (dd)
        for (const Atom& at : dd->atoms)
          if (at.x == a.atom.x) got += at.p;
      r.values.push_back({i, "P(" + format_number(a.atom.x) + ")", a.atom.p, got, 0.0, a.provenance, a.note,
                          got == a.atom.p});
    }
  }
  for (const auto& c : f.claims) {
    DistinguishResult d = distinguish(dists, c.menu);
    bool ok = d.separable == c.separable;
    if (ok && c.separable) ok = d.subset == canonical_specs(c.subset);
    if (ok && !c.separable && !c.unseparated.empty()) ok = detail::same_pairs(d.unseparated, c.unseparated);
    r.claims.push_back({c, std::move(d), ok});
  }
  if (f.joint)
    for (const auto& c : f.subadditivity) {
      AxiomCheckResult a = check_subadditivity(c.spec, *f.joint);
      const bool ok = a.verdict == c.verdict;
      r.axioms.push_back({c, std::move(a), ok});
    }
  r.five_measure = distinguish(dists, five_measure_menu());
  for (const auto& v : r.values) r.passes = r.passes && v.pass;
  for (const auto& c : r.claims) r.passes = r.passes && c.pass;
  for (const auto& a : r.axioms) r.passes = r.passes && a.pass;
  return r;
}

inline ScenarioReport run_all() {
  ScenarioReport rep;
  for (const auto& id : registered_ids()) {
    FixtureReport fr = run_fixture(load(id));
    if (!fr.passes) {
      rep.passes = false;
      ++rep.failures;
    }
    rep.fixtures.push_back(std::move(fr));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

inline json_io::json to_json(const ScenarioFixture& f) {
  json_io::json j;
  j["id"] = f.id;
  j["narrative"] = f.narrative;
  json_io::json members = json_io::json::array();
  for (const auto& m : f.members) {
    json_io::json mj;
    mj["label"] = m.label;
    mj["distribution"] = json_io::to_json(m.dist);
    json_io::json ex = json_io::json::array();
    for (const auto& e : m.expected) {
      json_io::json item;
      json_io::put_spec(item, e.spec);
      item["value"] = e.value;
      item["provenance"] = to_string(e.provenance);
      item["note"] = e.note;
      ex.push_back(item);
    }
    mj["expected"] = ex;
    members.push_back(mj);
  }
  j["members"] = members;
  return j;
}

inline json_io::json to_json(const FixtureReport& r) {
  json_io::json j;
  j["id"] = r.id;
  j["narrative"] = r.narrative;
  j["passes"] = r.passes;
  j["labels"] = r.labels;
  json_io::json vectors = json_io::json::array();
  for (const auto& v : r.vectors) vectors.push_back(json_io::to_json(v));
  j["vectors"] = vectors;
  json_io::json values = json_io::json::array();
  for (const auto& v : r.values) {
    json_io::json item;
    item["member"] = v.member;
    item["measure"] = v.what;
    item["expected"] = v.expected;
    item["actual"] = v.actual;
    item["provenance"] = to_string(v.provenance);
    item["note"] = v.note;
    item["pass"] = v.pass;
    values.push_back(item);
  }
  j["values"] = values;
  json_io::json claims = json_io::json::array();
  for (const auto& c : r.claims) {
    json_io::json item;
    json_io::json menu = json_io::json::array();
    for (const auto& s : c.claim.menu) menu.push_back(to_string(s));
    item["menu"] = menu;
    item["claim_separable"] = c.claim.separable;
    item["result"] = json_io::to_json(c.result);
    item["pass"] = c.pass;
    claims.push_back(item);
  }
  j["claims"] = claims;
  if (!r.axioms.empty()) {
    json_io::json axioms = json_io::json::array();
    for (const auto& a : r.axioms) {
      json_io::json item = json_io::to_json(a.result);
      item["expected_verdict"] = to_string(a.claim.verdict);
      item["pass"] = a.pass;
      axioms.push_back(item);
    }
    j["axioms"] = axioms;
  }
  j["five_measure"] = json_io::to_json(r.five_measure);
  return j;
}

inline json_io::json to_json(const ScenarioReport& r) {
  json_io::json j;
  j["passes"] = r.passes;
  j["failures"] = r.failures;
  json_io::json fixtures = json_io::json::array();
  for (const auto& f : r.fixtures) fixtures.push_back(to_json(f));
  j["fixtures"] = fixtures;
  return j;
}

}  // namespace riskscope::scenarios
