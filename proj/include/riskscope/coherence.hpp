#pragma once

// Case-based checks of the risk-measure axioms, stated in loss space:
//   translation   rho(L + a) = rho(L) + a
//   homogeneity   rho(k L)   = k rho(L),  k >= 0
//   monotonicity  L <= 0 a.s.  =>  rho(L) <= 0
//   subadditivity rho(L1 + L2) <= rho(L1) + rho(L2)

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "riskscope/dist_core.hpp"
#include "riskscope/measures.hpp"

namespace riskscope {

enum class Axiom { monotonicity, positive_homogeneity, translation_invariance, subadditivity };
enum class Verdict { holds_on_cases, violated };

inline const char* to_string(Axiom a) {
  switch (a) {
    case Axiom::monotonicity:
      return "monotonicity";
    case Axiom::positive_homogeneity:
      return "positive_homogeneity";
    case Axiom::translation_invariance:
      return "translation_invariance";
    case Axiom::subadditivity:
      break;
  }
  return "subadditivity";
}

inline const char* to_string(Verdict v) {
  return v == Verdict::violated ? "violated" : "holds_on_cases";
}

struct JointOutcome {
  double loss1;
  double loss2;
  double p;
  bool operator==(const JointOutcome&) const = default;
};

struct JointDiscrete {
  std::vector<JointOutcome> outcomes;
  bool operator==(const JointDiscrete&) const = default;
};

inline std::vector<Violation> validate(const JointDiscrete& j) {
  std::vector<Violation> out;
  if (j.outcomes.empty()) out.push_back({"non_empty", "outcomes", "no outcomes"});
  double sum = 0.0;
  for (std::size_t i = 0; i < j.outcomes.size(); ++i) {
    const auto& o = j.outcomes[i];
    const std::string loc = "outcome " + std::to_string(i);
    if (!std::isfinite(o.loss1) || !std::isfinite(o.loss2) || !std::isfinite(o.p)) {
      out.push_back({"finite", loc, "non-finite value"});
      continue;
    }
    if (o.p < 0.0 || o.p > 1.0) out.push_back({"probability_range", loc, "p not in [0,1]"});
    sum += o.p;
  }
  if (std::abs(sum - 1.0) > kMassTolerance)
    out.push_back({"mass", "outcomes", "probabilities sum to " + format_number(sum) + " != 1"});
  return out;
}

namespace detail {
template <class Key>
DiscreteDistribution aggregate(const JointDiscrete& j, Key key) {
  std::map<double, double> merged;
  for (const auto& o : j.outcomes) merged[key(o)] += o.p;
  DiscreteDistribution out;
  // Summed cells can overshoot 1 by an ulp when one value collects everything.
  for (const auto& [x, p] : merged) out.atoms.push_back({x, p > 1.0 && p - 1.0 <= kMassSnap ? 1.0 : p});
  return out;
}
}  // namespace detail

inline DiscreteDistribution marginal1(const JointDiscrete& j) {
  return detail::aggregate(j, [](const JointOutcome& o) { return o.loss1; });
}
inline DiscreteDistribution marginal2(const JointDiscrete& j) {
  return detail::aggregate(j, [](const JointOutcome& o) { return o.loss2; });
}
inline DiscreteDistribution sum_distribution(const JointDiscrete& j) {
  return detail::aggregate(j, [](const JointOutcome& o) { return o.loss1 + o.loss2; });
}

inline JointDiscrete independent_joint(const DiscreteDistribution& a, const DiscreteDistribution& b) {
  ensure_valid(a);
  ensure_valid(b);
  JointDiscrete j;
  for (const Atom& u : to_loss(a).atoms)
    for (const Atom& v : to_loss(b).atoms) j.outcomes.push_back({u.x, v.x, u.p * v.p});
  return j;
}

struct Translation {
  double a;
};
struct Homogeneity {
  double k;
};
struct Monotonicity {};
using AxiomParams = std::variant<Translation, Homogeneity, Monotonicity>;

// Everything needed to recompute lhs and rhs.
struct Witness {
  std::optional<Distribution> distribution;   // single-position axioms
  std::optional<AxiomParams> params;
  std::optional<JointDiscrete> joint;         // subadditivity
  double rho_sum = 0.0;
  double rho_first = 0.0;
  double rho_second = 0.0;
};

struct AxiomCheckResult {
  Axiom axiom;
  MeasureSpec measure;
  Verdict verdict;
  double lhs;
  double rhs;
  std::optional<Witness> witness;  // present iff violated
};

inline constexpr double kAxiomTolerance = 1e-9;

inline bool nearly_equal(double lhs, double rhs) {
  return std::abs(lhs - rhs) <= kAxiomTolerance * std::max({1.0, std::abs(lhs), std::abs(rhs)});
}

namespace detail {

struct Sides {
  double lhs;
  double rhs;
};

inline Sides axiom_sides(const MeasureSpec& m, const Distribution& dist, const AxiomParams& params) {
  return std::visit(
      overloaded{
          [&](const Translation& t) -> Sides {
            return {evaluate(shift(dist, t.a), m), evaluate(dist, m) + t.a};
          },
          [&](const Homogeneity& h) -> Sides {
            if (!(h.k >= 0.0)) throw ArgumentError("homogeneity requires k >= 0");
            return {evaluate(scale(dist, h.k), m), h.k * evaluate(dist, m)};
          },
          [&](const Monotonicity&) -> Sides {
            if (max_loss(dist) > 0.0)
              throw ArgumentError("monotonicity premise needs loss support <= 0");
            return {evaluate(dist, m), 0.0};
          },
      },
      params);
}

inline Axiom axiom_of(const AxiomParams& p) {
  return std::visit(overloaded{
                        [](const Translation&) { return Axiom::translation_invariance; },
                        [](const Homogeneity&) { return Axiom::positive_homogeneity; },
                        [](const Monotonicity&) { return Axiom::monotonicity; },
                    },
                    p);
}

}  // namespace detail

inline AxiomCheckResult check_axiom(const MeasureSpec& measure, const Distribution& dist,
                                    const AxiomParams& params) {
  validate_spec(measure);
  ensure_valid(dist);
  const auto [lhs, rhs] = detail::axiom_sides(measure, dist, params);
  const Axiom axiom = detail::axiom_of(params);
  const bool holds = axiom == Axiom::monotonicity ? lhs <= rhs + kAxiomTolerance
                                                  : nearly_equal(lhs, rhs);
  AxiomCheckResult r{axiom, measure, holds ? Verdict::holds_on_cases : Verdict::violated, lhs, rhs,
                     std::nullopt};
  if (!holds) r.witness = Witness{to_loss(dist), params, std::nullopt, 0.0, 0.0, 0.0};
  return r;
}

/// lhs = rho of the sum, rhs = rho(first marginal) + rho(second marginal).
inline AxiomCheckResult check_subadditivity(const MeasureSpec& measure, const JointDiscrete& joint) {
  validate_spec(measure);
  if (auto v = validate(joint); !v.empty())
    throw ValidationError("invalid joint distribution: " + describe(v));
  const double rho_sum = evaluate(sum_distribution(joint), measure);
  const double rho1 = evaluate(marginal1(joint), measure);
  const double rho2 = evaluate(marginal2(joint), measure);
  const double rhs = rho1 + rho2;
  const bool holds = rho_sum <= rhs + kAxiomTolerance * std::max({1.0, std::abs(rho_sum), std::abs(rhs)});
  AxiomCheckResult r{Axiom::subadditivity,
                     measure,
                     holds ? Verdict::holds_on_cases : Verdict::violated,
                     rho_sum,
                     rhs,
                     std::nullopt};
  if (!holds) r.witness = Witness{std::nullopt, std::nullopt, joint, rho_sum, rho1, rho2};
  return r;
}

/// Recomputes (lhs, rhs) from a result's witness.
inline std::pair<double, double> replay(const AxiomCheckResult& r) {
  if (!r.witness) throw ArgumentError("result carries no witness");
  const Witness& w = *r.witness;
  if (r.axiom == Axiom::subadditivity) {
    const auto again = check_subadditivity(r.measure, *w.joint);
    return {again.lhs, again.rhs};
  }
  const auto s = detail::axiom_sides(r.measure, *w.distribution, *w.params);
  return {s.lhs, s.rhs};
}

struct LoanCounterexample {
  JointDiscrete pair;             // two independent $1M loans
  DiscreteDistribution big_loan;  // one $2M loan
};

/// Two independent $1M loans and one $2M loan, each defaulting with
/// probability 0.04 (total loss of principal on default).
inline LoanCounterexample loan_counterexample() {
  const DiscreteDistribution small{{{0.0, 0.96}, {1e6, 0.04}}, Orientation::loss};
  const DiscreteDistribution big{{{0.0, 0.96}, {2e6, 0.04}}, Orientation::loss};
  return {independent_joint(small, small), big};
}

}  // namespace riskscope
