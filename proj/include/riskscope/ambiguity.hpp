#pragma once

// Families of distinct tails that share a measure vector, and minimal
// measure sets that tell the members of a family apart.
//
// Templates are solved in closed form on [c, d] (c = VaR at the base level,
// d = ML); further members come from zero-mass perturbations that are
// symmetric about the tail midpoint and stay clear of every nested sub-tail.
// Every candidate is re-evaluated through `measures` before it is accepted.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "riskscope/dist_core.hpp"
#include "riskscope/measures.hpp"
#include "riskscope/sampling.hpp"

namespace riskscope {

enum class TemplateKind { uniform, rising_ramp, falling_ramp, triangle_train, symmetric_perturbation };

inline const char* to_string(TemplateKind k) {
  switch (k) {
    case TemplateKind::uniform:
      return "uniform";
    case TemplateKind::rising_ramp:
      return "rising_ramp";
    case TemplateKind::falling_ramp:
      return "falling_ramp";
    case TemplateKind::triangle_train:
      return "triangle_train";
    case TemplateKind::symmetric_perturbation:
      break;
  }
  return "symmetric_perturbation";
}

inline TemplateKind parse_template_kind(const std::string& s) {
  for (auto k : {TemplateKind::uniform, TemplateKind::rising_ramp, TemplateKind::falling_ramp,
                 TemplateKind::triangle_train, TemplateKind::symmetric_perturbation})
    if (s == to_string(k)) return k;
  throw FormatError("unknown template family '" + s + "'");
}

/// Mirrored tent pairs about the tail midpoint m: area +A at m +- positive_offset,
/// area -A at m +- negative_offset, all of the given base width.
struct Bump {
  double positive_offset;
  double negative_offset;
  double width;
  double area;
};

struct TemplateFamily {
  TemplateKind kind = TemplateKind::uniform;
  std::size_t n = 1;  // triangle count (for a perturbation: of its base, if a train)
  std::optional<Bump> bump;
  TemplateKind base = TemplateKind::uniform;

  static TemplateFamily uniform() { return {TemplateKind::uniform, 1, std::nullopt, TemplateKind::uniform}; }
  static TemplateFamily rising_ramp() { return {TemplateKind::rising_ramp, 1, std::nullopt, TemplateKind::uniform}; }
  static TemplateFamily falling_ramp() { return {TemplateKind::falling_ramp, 1, std::nullopt, TemplateKind::uniform}; }
  static TemplateFamily triangle_train(std::size_t n) { return {TemplateKind::triangle_train, n, std::nullopt, TemplateKind::uniform}; }
  static TemplateFamily perturbation(Bump b, TemplateKind base = TemplateKind::uniform,
                                     std::size_t base_n = 1) {
    return {TemplateKind::symmetric_perturbation, base_n, b, base};
  }

  std::string label() const {
    if (kind == TemplateKind::triangle_train) return "triangle_train(" + std::to_string(n) + ")";
    return to_string(kind);
  }
};

struct Target {
  MeasureSpec spec;
  double value;
};

struct ConstraintSet {
  double alpha = 0.95;
  std::vector<Target> targets;
  std::vector<double> nested_levels;

  std::optional<double> find(const MeasureSpec& s) const {
    for (const auto& t : targets)
      if (t.spec == s) return t.value;
    return std::nullopt;
  }

  std::optional<double> base_es() const {
    for (const auto& t : targets)
      if (t.spec.kind == MeasureKind::es && t.spec.level == alpha) return t.value;
    return std::nullopt;
  }

  // Nested levels plus every target level above alpha, sorted and unique.
  std::vector<double> all_nested_levels() const {
    std::vector<double> levels = nested_levels;
    for (const auto& t : targets)
      if (t.spec.kind != MeasureKind::ml && t.spec.level > alpha) levels.push_back(t.spec.level);
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    return levels;
  }

  std::vector<MeasureSpec> specs() const {
    std::vector<MeasureSpec> out;
    for (const auto& t : targets) out.push_back(t.spec);
    return canonical_specs(out);
  }
};

inline constexpr double kTargetTolerance = 1e-9;

/// Throws InfeasibleError naming the first broken invariant.
inline void validate_constraints(const ConstraintSet& cs) {
  auto fail = [](const std::string& why) { throw InfeasibleError("infeasible: " + why); };
  if (!(cs.alpha > 0.0 && cs.alpha < 1.0)) fail("alpha must lie in (0,1)");
  if (cs.targets.empty()) fail("no targets");
  for (double l : cs.nested_levels)
    if (!(l > cs.alpha && l < 1.0)) fail("nested levels must lie in (alpha, 1)");
  std::vector<MeasureSpec> specs;
  for (const auto& t : cs.targets) {
    if (!std::isfinite(t.value)) fail("non-finite target for " + to_string(t.spec));
    if (t.spec.kind != MeasureKind::ml) {
      if (!(t.spec.level > 0.0 && t.spec.level < 1.0)) fail("target level outside (0,1)");
      if (t.spec.level < cs.alpha)
        fail(to_string(t.spec) + " lies below the base level and depends on the body");
    }
    specs.push_back(t.spec);
  }
  std::sort(specs.begin(), specs.end());
  if (std::adjacent_find(specs.begin(), specs.end()) != specs.end()) fail("duplicate target");

  const auto v = cs.find(MeasureSpec::var(cs.alpha));
  const auto e = cs.base_es();
  const auto d = cs.find(MeasureSpec::ml());
  if (v && e && !(*v < *e)) fail("VaR must be < ES");
  if (e && d && !(*e < *d)) fail("ES must be < ML");
  if (v && d && !(*v < *d)) fail("VaR must be < ML");
  if ((v ? 1 : 0) + (e ? 1 : 0) + (d ? 1 : 0) < 2)
    fail("need at least two of VaR, ES and ML at the base level to fix the support");
}

struct Infeasible {
  std::string reason;
  std::optional<MeasureSpec> spec;
  double forced = 0.0;
  double target = 0.0;
};

using TemplateResult = std::variant<TailSpec, Infeasible>;

namespace detail {

// Position of ES inside [c, d] as a fraction of the width.
inline double es_fraction(TemplateKind k) {
  switch (k) {
    case TemplateKind::rising_ramp:
      return 2.0 / 3.0;
    case TemplateKind::falling_ramp:
      return 1.0 / 3.0;
    default:
      return 0.5;
  }
}

struct Support {
  double c;
  double d;
};

inline std::variant<Support, Infeasible> solve_support(TemplateKind kind, const ConstraintSet& cs) {
  const auto v = cs.find(MeasureSpec::var(cs.alpha));
  const auto e = cs.base_es();
  const auto ml = cs.find(MeasureSpec::ml());
  Support s{};
  if (v && ml) {
    s = {*v, *ml};
  } else if (v && e) {
    switch (kind) {
      case TemplateKind::rising_ramp:
        s = {*v, *v + 1.5 * (*e - *v)};
        break;
      case TemplateKind::falling_ramp:
        s = {*v, *v + 3.0 * (*e - *v)};
        break;
      default:
        s = {*v, 2.0 * *e - *v};
    }
  } else {
    switch (kind) {
      case TemplateKind::rising_ramp:
        s = {3.0 * *e - 2.0 * *ml, *ml};
        break;
      case TemplateKind::falling_ramp:
        s = {0.5 * (3.0 * *e - *ml), *ml};
        break;
      default:
        s = {2.0 * *e - *ml, *ml};
    }
  }
  if (!(s.c < s.d)) return Infeasible{"degenerate support", std::nullopt, 0.0, 0.0};
  return s;
}

inline std::vector<Knot> template_knots(TemplateKind kind, std::size_t n, Support s, double mass) {
  switch (kind) {
    case TemplateKind::rising_ramp:
      return shapes::rising(s.c, s.d, mass);
    case TemplateKind::falling_ramp:
      return shapes::falling(s.c, s.d, mass);
    case TemplateKind::triangle_train:
      return shapes::triangle_train(s.c, s.d, n, mass);
    default:
      return shapes::uniform(s.c, s.d, mass);
  }
}

// Every target re-evaluated on the candidate; first miss is reported.
inline std::optional<Infeasible> check_targets(const TailSpec& t, const ConstraintSet& cs) {
  for (const auto& target : cs.targets) {
    double got;
    try {
      got = evaluate(t, target.spec);
    } catch (const Error& err) {
      return Infeasible{std::string("evaluation failed: ") + err.what(), target.spec, 0.0, target.value};
    }
    if (!(std::abs(got - target.value) <= kTargetTolerance))
      return Infeasible{"template forces " + to_string(target.spec) + " = " + format_number(got) +
                            " (target " + format_number(target.value) + ")",
                        target.spec, got, target.value};
  }
  return std::nullopt;
}

// Half-width of the symmetric region about the midpoint that avoids every
// nested sub-tail and its mirror image.
inline double perturbation_room(const TailSpec& base, const ConstraintSet& cs) {
  const double m = 0.5 * (base.lower() + base.upper());
  double room = 0.5 * (base.upper() - base.lower());
  for (double level : cs.all_nested_levels()) room = std::min(room, var(base, level) - m);
  return room;
}

inline double perturbation_margin(const TailSpec& base) {
  return 1e-3 * (base.upper() - base.lower());
}

}  // namespace detail

/// Applies a bump to a base tail, refusing any placement that leaves the
/// admissible region, overlaps opposite-sign tents, or drives density negative.
inline TemplateResult apply_bump(const TailSpec& base, const Bump& b, const ConstraintSet& cs) {
  if (!(b.width > 0.0) || !(b.area > 0.0) || b.positive_offset < 0.0 || b.negative_offset < 0.0)
    return Infeasible{"bump needs positive width and area and non-negative offsets", std::nullopt, 0.0, 0.0};
  const double room = detail::perturbation_room(base, cs) - detail::perturbation_margin(base);
  if (!(room > 0.0)) return Infeasible{"no symmetric room outside the nested sub-tails", std::nullopt, 0.0, 0.0};
  const double half = 0.5 * b.width;
  if (b.positive_offset + half > room || b.negative_offset + half > room)
    return Infeasible{"bump leaves the admissible region", std::nullopt, 0.0, 0.0};
  if (std::abs(b.positive_offset - b.negative_offset) < b.width)
    return Infeasible{"opposite-sign tents overlap", std::nullopt, 0.0, 0.0};
  const double m = 0.5 * (base.lower() + base.upper());
  std::vector<Knot> knots = base.knots;
  for (double sign : {-1.0, 1.0}) {
    knots = polyline::add(knots, shapes::tent(m + sign * b.positive_offset, b.width, b.area));
    knots = polyline::add(knots, shapes::tent(m + sign * b.negative_offset, b.width, -b.area));
  }
  for (const Knot& k : knots)
    if (k.f < 0.0) return Infeasible{"bump drives the density negative", std::nullopt, 0.0, 0.0};
  TailSpec out{base.alpha, std::move(knots), Orientation::loss};
  if (!validate(out).empty()) return Infeasible{"perturbed tail fails validation: " + describe(validate(out)), std::nullopt, 0.0, 0.0};
  return out;
}

/// Closed-form parameter solve of one template against the constraint set.
inline TemplateResult solve_template(const TemplateFamily& family, const ConstraintSet& cs) {
  validate_constraints(cs);
  const TemplateKind shape =
      family.kind == TemplateKind::symmetric_perturbation ? family.base : family.kind;
  if (shape == TemplateKind::symmetric_perturbation)
    throw ArgumentError("a perturbation needs a closed-form base template");
  if (shape == TemplateKind::triangle_train && family.n == 0)
    throw ArgumentError("triangle train needs n >= 1");
  auto support = detail::solve_support(shape, cs);
  if (auto* bad = std::get_if<Infeasible>(&support)) return *bad;
  const auto s = std::get<detail::Support>(support);

  // Forced ES when VaR and ML are both pinned.
  if (const auto e = cs.base_es(); e && cs.find(MeasureSpec::var(cs.alpha)) && cs.find(MeasureSpec::ml())) {
    const double forced = s.c + detail::es_fraction(shape) * (s.d - s.c);
    if (std::abs(forced - *e) > kTargetTolerance)
      return Infeasible{"template forces ES = " + format_number(forced) + " (target " + format_number(*e) + ")",
                        MeasureSpec::es(cs.alpha), forced, *e};
  }

  TailSpec tail{cs.alpha, detail::template_knots(shape, family.n, s, 1.0 - cs.alpha), Orientation::loss};
  if (family.kind == TemplateKind::symmetric_perturbation) {
    if (!family.bump) throw ArgumentError("symmetric_perturbation needs a bump");
    auto bumped = apply_bump(tail, *family.bump, cs);
    if (std::holds_alternative<Infeasible>(bumped)) return bumped;
    tail = std::get<TailSpec>(std::move(bumped));
  }
  if (auto miss = detail::check_targets(tail, cs)) return *miss;
  return tail;
}

struct SynthesisOptions {
  std::vector<TemplateKind> templates = {TemplateKind::uniform, TemplateKind::rising_ramp,
                                         TemplateKind::falling_ramp, TemplateKind::triangle_train,
                                         TemplateKind::symmetric_perturbation};
  std::vector<std::size_t> train_counts = {2, 4};
  double min_separation = 1e-3;
  std::size_t max_attempts = 2000;
  std::uint64_t seed = 20140915;

  bool enabled(TemplateKind k) const {
    return std::find(templates.begin(), templates.end(), k) != templates.end();
  }
};

struct AmbiguityFamily {
  std::vector<TailSpec> members;
  std::vector<std::string> labels;
  MeasureVector shared;
  std::vector<std::vector<double>> l1;  // pairwise member distances
  double min_separation = 1e-3;
};

inline std::vector<std::vector<double>> pairwise_l1(const std::vector<TailSpec>& members) {
  const std::size_t n = members.size();
  std::vector<std::vector<double>> out(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      out[i][j] = out[j][i] = polyline::l1_distance(members[i].knots, members[j].knots);
  return out;
}

/// Synthesize-then-verify: closed-form templates first, then perturbations
/// of a feasible member (symmetric shapes preferred) until k members exist.
inline AmbiguityFamily synthesize_family(const ConstraintSet& cs, std::size_t k,
                                         const SynthesisOptions& opt = {}) {
  if (k < 2) throw ArgumentError("an ambiguity family needs k >= 2");
  validate_constraints(cs);

  AmbiguityFamily fam;
  fam.min_separation = opt.min_separation;
  for (const auto& s : cs.specs()) fam.shared.entries.push_back({s, *cs.find(s)});

  auto accept = [&](const TailSpec& t, std::string label) {
    if (!validate(t).empty()) return false;
    if (detail::check_targets(t, cs)) return false;
    for (const auto& other : fam.members)
      if (polyline::l1_distance(t.knots, other.knots) < opt.min_separation) return false;
    fam.members.push_back(t);
    fam.labels.push_back(std::move(label));
    return true;
  };

  std::vector<TemplateFamily> closed;
  for (auto kind : {TemplateKind::uniform, TemplateKind::rising_ramp, TemplateKind::falling_ramp}) {
    if (opt.enabled(kind)) closed.push_back({kind, 1, std::nullopt, TemplateKind::uniform});
  }
  if (opt.enabled(TemplateKind::triangle_train))
    for (std::size_t n : opt.train_counts) closed.push_back(TemplateFamily::triangle_train(n));

  std::vector<std::string> misses;
  std::vector<TemplateFamily> accepted_families;
  for (const auto& tf : closed) {
    if (fam.members.size() >= k) break;
    auto r = solve_template(tf, cs);
    if (const auto* bad = std::get_if<Infeasible>(&r)) {
      misses.push_back(tf.label() + ": " + bad->reason);
      continue;
    }
    if (accept(std::get<TailSpec>(r), tf.label())) accepted_families.push_back(tf);
  }

  if (fam.members.size() < k && opt.enabled(TemplateKind::symmetric_perturbation) &&
      !fam.members.empty()) {
    std::size_t base_index = 0;
    for (std::size_t i = 0; i < accepted_families.size(); ++i) {
      const auto kind = accepted_families[i].kind;
      if (kind == TemplateKind::uniform || kind == TemplateKind::triangle_train) {
        base_index = i;
        break;
      }
    }
    const TailSpec base = fam.members[base_index];
    const std::string base_label = fam.labels[base_index];
    const double room = detail::perturbation_room(base, cs) - detail::perturbation_margin(base);
    const double m = 0.5 * (base.lower() + base.upper());
    std::mt19937_64 rng(opt.seed);
    auto uniform_in = [&](double lo, double hi) { return lo + (hi - lo) * unit_uniform(rng); };
    for (std::size_t attempt = 0; room > 0.0 && attempt < opt.max_attempts && fam.members.size() < k;
         ++attempt) {
      Bump b{};
      b.width = uniform_in(0.1, 0.4) * room;
      const double half = 0.5 * b.width;
      b.positive_offset = uniform_in(half, room - half);
      b.negative_offset = uniform_in(half, room - half);
      if (std::abs(b.positive_offset - b.negative_offset) < b.width) continue;
      double floor = std::numeric_limits<double>::infinity();
      for (double sign : {-1.0, 1.0}) {
        const double centre = m + sign * b.negative_offset;
        for (double x : {centre - half, centre, centre + half})
          floor = std::min(floor, polyline::value_at(base.knots, x));
        for (const Knot& kn : base.knots)
          if (kn.x > centre - half && kn.x < centre + half) floor = std::min(floor, kn.f);
      }
      b.area = uniform_in(0.5, 1.0) * 0.45 * b.width * floor;
      if (4.0 * b.area < opt.min_separation) continue;
      auto r = apply_bump(base, b, cs);
      if (!std::holds_alternative<TailSpec>(r)) continue;
      accept(std::get<TailSpec>(r),
             "symmetric_perturbation(" + base_label + ")#" + std::to_string(attempt));
    }
  }

  if (fam.members.empty()) {
    std::string why = "infeasible: no template meets the constraints";
    for (const auto& m : misses) why += "; " + m;
    throw InfeasibleError(why);
  }
  if (fam.members.size() < k)
    throw CannotReachKError("cannot_reach_k: found " + std::to_string(fam.members.size()) +
                                " verified distinct members, requested " + std::to_string(k),
                            fam.members.size());
  fam.l1 = pairwise_l1(fam.members);
  return fam;
}

struct FamilyVerification {
  bool passes = true;
  double worst_deviation = 0.0;
  std::optional<std::size_t> worst_member;
  std::optional<MeasureSpec> worst_spec;
  double min_l1 = std::numeric_limits<double>::infinity();
  std::optional<std::pair<std::size_t, std::size_t>> min_pair;
  std::vector<std::string> failures;
};

inline FamilyVerification verify_family(const AmbiguityFamily& fam) {
  FamilyVerification rep;
  for (std::size_t i = 0; i < fam.members.size(); ++i) {
    const auto violations = validate(fam.members[i]);
    if (!violations.empty()) {
      rep.failures.push_back("member " + std::to_string(i) + ": " + describe(violations));
      continue;
    }
    for (const auto& entry : fam.shared.entries) {
      double got;
      try {
        got = evaluate(fam.members[i], entry.spec);
      } catch (const Error& e) {
        rep.failures.push_back("member " + std::to_string(i) + ": " + to_string(entry.spec) + " " + e.what());
        continue;
      }
      const double dev = std::abs(got - entry.value);
      if (dev > rep.worst_deviation || !rep.worst_member) {
        rep.worst_deviation = dev;
        rep.worst_member = i;
        rep.worst_spec = entry.spec;
      }
      if (!(dev <= kTargetTolerance))
        rep.failures.push_back("member " + std::to_string(i) + ": " + to_string(entry.spec) +
                               " deviates by " + format_number(dev));
    }
  }
  for (std::size_t i = 0; i < fam.members.size(); ++i) {
    for (std::size_t j = i + 1; j < fam.members.size(); ++j) {
      const double d = polyline::l1_distance(fam.members[i].knots, fam.members[j].knots);
      if (d < rep.min_l1) {
        rep.min_l1 = d;
        rep.min_pair = std::pair{i, j};
      }
      if (d < fam.min_separation)
        rep.failures.push_back("members " + std::to_string(i) + " and " + std::to_string(j) +
                               ": L1 distance " + format_number(d) + " below " +
                               format_number(fam.min_separation));
    }
  }
  rep.passes = rep.failures.empty();
  return rep;
}

// ---------------------------------------------------------------------------
// Distinguisher
// ---------------------------------------------------------------------------

inline constexpr double kSeparationTolerance = 1e-9;

struct DistinguishResult {
  bool separable = false;
  std::vector<MeasureSpec> subset;            // minimal separating set when separable
  std::vector<MeasureVector> vectors;         // per member, over subset (or the full menu)
  std::vector<std::pair<std::size_t, std::size_t>> unseparated;  // when not separable
};

/// Exhaustive search over menu subsets by (size, canonical order); the first
/// subset whose sub-vectors differ pairwise is minimal.
inline DistinguishResult distinguish(const std::vector<Distribution>& members,
                                     std::vector<MeasureSpec> menu) {
  if (members.size() < 2) throw ArgumentError("distinguish needs at least two members");
  if (menu.empty()) throw ArgumentError("distinguish needs a non-empty menu");
  menu = canonical_specs(std::move(menu));
  if (menu.size() > 20) throw ArgumentError("menu too large for exhaustive search");
  const std::size_t n = members.size();
  const std::size_t m = menu.size();

  std::vector<std::vector<double>> values(n, std::vector<double>(m));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      try {
        values[i][j] = evaluate(members[i], menu[j]);
      } catch (Error& e) {
        e.add_context("member " + std::to_string(i) + ": " + to_string(menu[j]));
        throw;
      }
    }
  }
  auto differs = [&](std::size_t a, std::size_t b, std::size_t j) {
    return std::abs(values[a][j] - values[b][j]) > kSeparationTolerance;
  };
  auto vectors_over = [&](const std::vector<std::size_t>& idx) {
    std::vector<MeasureVector> out(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j : idx) out[i].entries.push_back({menu[j], values[i][j]});
    return out;
  };

  for (std::size_t size = 1; size <= m; ++size) {
    // Lexicographic combinations of indices.
    std::vector<std::size_t> idx(size);
    for (std::size_t t = 0; t < size; ++t) idx[t] = t;
    while (true) {
      bool all = true;
      for (std::size_t a = 0; a < n && all; ++a)
        for (std::size_t b = a + 1; b < n && all; ++b) {
          bool sep = false;
          for (std::size_t j : idx) sep = sep || differs(a, b, j);
          all = sep;
        }
      if (all) {
        DistinguishResult r;
        r.separable = true;
        for (std::size_t j : idx) r.subset.push_back(menu[j]);
        r.vectors = vectors_over(idx);
        return r;
      }
      std::size_t t = size;
      while (t > 0 && idx[t - 1] == m - size + (t - 1)) --t;
      if (t == 0) break;
      ++idx[t - 1];
      for (std::size_t u = t; u < size; ++u) idx[u] = idx[u - 1] + 1;
    }
  }

  DistinguishResult r;
  std::vector<std::size_t> all_idx(m);
  for (std::size_t j = 0; j < m; ++j) all_idx[j] = j;
  r.vectors = vectors_over(all_idx);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      bool sep = false;
      for (std::size_t j = 0; j < m; ++j) sep = sep || differs(a, b, j);
      if (!sep) r.unseparated.emplace_back(a, b);
    }
  return r;
}

}  // namespace riskscope
