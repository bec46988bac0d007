#pragma once

// VaR, Expected Shortfall and Maximum Loss: exact evaluation on every
// distribution kind plus a Monte Carlo estimator used as an independent oracle.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "riskscope/dist_core.hpp"
#include "riskscope/sampling.hpp"

namespace riskscope {

enum class MeasureKind { var, es, ml };
enum class EsMode { atom_splitting, strict_conditional };

struct MeasureSpec {
  MeasureKind kind = MeasureKind::var;
  double level = 0.0;  // unused for ml
  EsMode es_mode = EsMode::atom_splitting;

  static MeasureSpec var(double level) { return {MeasureKind::var, level, EsMode::atom_splitting}; }
  static MeasureSpec es(double level, EsMode mode = EsMode::atom_splitting) {
    return {MeasureKind::es, level, mode};
  }
  static MeasureSpec ml() { return {MeasureKind::ml, 0.0, EsMode::atom_splitting}; }

  bool operator==(const MeasureSpec&) const = default;

  // Canonical order: VaR by level, ES by level, ML last.
  std::strong_ordering operator<=>(const MeasureSpec& o) const {
    if (auto c = kind <=> o.kind; c != 0) return c;
    if (kind == MeasureKind::ml) return std::strong_ordering::equal;
    if (level < o.level) return std::strong_ordering::less;
    if (level > o.level) return std::strong_ordering::greater;
    return es_mode <=> o.es_mode;
  }
};

// Shortest %g representation that parses back to the same double.
inline std::string shortest_repr(double v) {
  char buf[40];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline void validate_spec(const MeasureSpec& s) {
  if (s.kind == MeasureKind::ml) return;
  if (!(s.level > 0.0 && s.level < 1.0))
    throw ArgumentError("measure level " + format_number(s.level) + " not in (0,1)");
}

/// "var95", "es99", "ml", "var@0.975", "es95:strict".
inline std::string to_string(const MeasureSpec& s) {
  if (s.kind == MeasureKind::ml) return "ml";
  std::string out = s.kind == MeasureKind::var ? "var" : "es";
  const double pct = s.level * 100.0;
  const double rounded = std::round(pct);
  if (rounded >= 1.0 && rounded <= 99.0 && rounded / 100.0 == s.level) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%02d", static_cast<int>(rounded));
    out += buf;
  } else {
    out += "@" + shortest_repr(s.level);
  }
  if (s.kind == MeasureKind::es && s.es_mode == EsMode::strict_conditional) out += ":strict";
  return out;
}

inline MeasureSpec parse_measure_spec(std::string_view text) {
  std::string t(text);
  for (char& ch : t) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  auto fail = [&]() { return FormatError("malformed measure spec '" + std::string(text) + "'"); };
  if (t == "ml") return MeasureSpec::ml();
  EsMode mode = EsMode::atom_splitting;
  if (auto colon = t.find(':'); colon != std::string::npos) {
    const std::string suffix = t.substr(colon + 1);
    if (suffix == "strict")
      mode = EsMode::strict_conditional;
    else if (suffix != "atom")
      throw fail();
    t.resize(colon);
  }
  MeasureKind kind;
  std::string rest;
  if (t.rfind("var", 0) == 0) {
    kind = MeasureKind::var;
    rest = t.substr(3);
  } else if (t.rfind("es", 0) == 0) {
    kind = MeasureKind::es;
    rest = t.substr(2);
  } else {
    throw fail();
  }
  if (kind == MeasureKind::var && mode != EsMode::atom_splitting) throw fail();
  double level;
  if (!rest.empty() && rest[0] == '@') {
    char* end = nullptr;
    level = std::strtod(rest.c_str() + 1, &end);
    if (rest.size() == 1 || *end != '\0') throw fail();
  } else if (rest.size() == 2 && std::isdigit(static_cast<unsigned char>(rest[0])) &&
             std::isdigit(static_cast<unsigned char>(rest[1]))) {
    level = std::stoi(rest) / 100.0;
  } else {
    throw fail();
  }
  MeasureSpec spec{kind, level, mode};
  try {
    validate_spec(spec);
  } catch (const ArgumentError& e) {
    throw FormatError(e.what());
  }
  return spec;
}

inline std::vector<MeasureSpec> parse_measure_list(std::string_view text) {
  std::vector<MeasureSpec> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string_view item =
        text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    if (item.empty()) throw FormatError("empty measure in list '" + std::string(text) + "'");
    out.push_back(parse_measure_spec(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exact evaluation
// ---------------------------------------------------------------------------

namespace detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline void check_level(double level) {
  if (!(level > 0.0 && level < 1.0))
    throw ArgumentError("level " + format_number(level) + " not in (0,1)");
}

// Exceedance-based quantile on merged, sorted atoms.
inline double discrete_var(const std::vector<Atom>& atoms, double level) {
  const double bound = (1.0 - level) + kMassSnap;
  std::vector<double> above(atoms.size(), 0.0);
  double acc = 0.0;
  for (std::size_t i = atoms.size(); i-- > 0;) {
    above[i] = acc;
    acc += atoms[i].p;
  }
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i].p > 0.0 && above[i] <= bound) return atoms[i].x;
  }
  return atoms.back().x;
}

inline double tail_var(const TailSpec& t, double level) {
  if (level < t.alpha)
    throw UndefinedMeasureError("level " + format_number(level) + " lies below the tail level " +
                                format_number(t.alpha) + "; the value depends on the body");
  return polyline::quantile(t.knots, level - t.alpha);
}

struct Exceedance {
  double mass;
  double moment;
};

inline double es_from_parts(double v, Exceedance above, double level, EsMode mode) {
  const double tail = 1.0 - level;
  if (mode == EsMode::strict_conditional) {
    if (!(above.mass > 0.0))
      throw UndefinedMeasureError("strict conditional ES undefined: P(L > VaR) = 0");
    return above.moment / above.mass;
  }
  return (above.moment + v * (tail - above.mass)) / tail;
}

inline Exceedance discrete_above(const std::vector<Atom>& atoms, double v) {
  Exceedance e{0.0, 0.0};
  for (std::size_t i = atoms.size(); i-- > 0;) {
    if (!(atoms[i].x > v)) break;
    e.mass += atoms[i].p;
    e.moment += atoms[i].x * atoms[i].p;
  }
  return e;
}

}  // namespace detail

/// inf{x : P(L > x) <= 1 - level}.
inline double var(const Distribution& dist, double level) {
  detail::check_level(level);
  ensure_valid(dist);
  return std::visit(
      overloaded{
          [&](const PiecewiseLinearDensity& p) { return polyline::quantile(p.knots, level); },
          [&](const TailSpec& t) { return detail::tail_var(t, level); },
          [&](const DiscreteDistribution& d) {
            return detail::discrete_var(sorted_atoms(d.atoms), level);
          },
          [&](const EmpiricalSample& s) { return detail::discrete_var(to_discrete(s).atoms, level); },
      },
      to_loss(dist));
}

/// Expected Shortfall. atom_splitting tops the strictly-worse region up to
/// exactly 1 - level with mass at VaR; strict_conditional is E[L | L > VaR].
inline double es(const Distribution& dist, double level, EsMode mode = EsMode::atom_splitting) {
  detail::check_level(level);
  ensure_valid(dist);
  const Distribution d = to_loss(dist);
  const double v = var(d, level);
  auto continuous = [&](const std::vector<Knot>& knots) {
    const auto I = polyline::integrate(knots, v, detail::kInf);
    return detail::es_from_parts(v, {I.mass, I.moment}, level, mode);
  };
  return std::visit(
      overloaded{
          [&](const PiecewiseLinearDensity& p) { return continuous(p.knots); },
          [&](const TailSpec& t) { return continuous(t.knots); },
          [&](const DiscreteDistribution& dd) {
            const auto atoms = sorted_atoms(dd.atoms);
            return detail::es_from_parts(v, detail::discrete_above(atoms, v), level, mode);
          },
          [&](const EmpiricalSample& s) {
            const auto atoms = to_discrete(s).atoms;
            return detail::es_from_parts(v, detail::discrete_above(atoms, v), level, mode);
          },
      },
      d);
}

/// Essential supremum of the loss.
inline double max_loss(const Distribution& dist) {
  ensure_valid(dist);
  return std::visit(
      overloaded{
          [](const PiecewiseLinearDensity& p) { return polyline::upper_support(p.knots); },
          [](const TailSpec& t) { return polyline::upper_support(t.knots); },
          [](const DiscreteDistribution& d) {
            double m = -detail::kInf;
            for (const Atom& a : d.atoms)
              if (a.p > 0.0) m = std::max(m, a.x);
            return m;
          },
          [](const EmpiricalSample& s) { return *std::max_element(s.losses.begin(), s.losses.end()); },
      },
      to_loss(dist));
}

inline double evaluate(const Distribution& dist, const MeasureSpec& spec) {
  switch (spec.kind) {
    case MeasureKind::var:
      return var(dist, spec.level);
    case MeasureKind::es:
      return es(dist, spec.level, spec.es_mode);
    case MeasureKind::ml:
      break;
  }
  return max_loss(dist);
}

// ---------------------------------------------------------------------------
// Measure vectors
// ---------------------------------------------------------------------------

struct MeasureEntry {
  MeasureSpec spec;
  double value;
  bool operator==(const MeasureEntry&) const = default;
};

struct MeasureVector {
  std::vector<MeasureEntry> entries;

  std::optional<double> find(const MeasureSpec& s) const {
    for (const auto& e : entries)
      if (e.spec == s) return e.value;
    return std::nullopt;
  }
  std::vector<MeasureSpec> specs() const {
    std::vector<MeasureSpec> out;
    for (const auto& e : entries) out.push_back(e.spec);
    return out;
  }
  bool operator==(const MeasureVector&) const = default;
};

/// Sorts specs canonically; rejects duplicates and invalid levels.
inline std::vector<MeasureSpec> canonical_specs(std::vector<MeasureSpec> specs) {
  for (const auto& s : specs) validate_spec(s);
  std::sort(specs.begin(), specs.end());
  if (std::adjacent_find(specs.begin(), specs.end()) != specs.end())
    throw ArgumentError("duplicate measure spec");
  return specs;
}

inline MeasureVector evaluate_vector(const Distribution& dist, std::vector<MeasureSpec> specs) {
  if (specs.empty()) throw ArgumentError("no measures requested");
  specs = canonical_specs(std::move(specs));
  MeasureVector out;
  for (const auto& s : specs) {
    try {
      out.entries.push_back({s, evaluate(dist, s)});
    } catch (Error& e) {
      e.add_context(to_string(s));
      throw;
    }
  }
  return out;
}

inline std::vector<MeasureSpec> five_measure_menu() {
  return {MeasureSpec::var(0.95), MeasureSpec::var(0.99), MeasureSpec::es(0.95),
          MeasureSpec::es(0.99), MeasureSpec::ml()};
}

// ---------------------------------------------------------------------------
// Monte Carlo oracle
// ---------------------------------------------------------------------------

struct McEstimate {
  double value;
  double standard_error;
};

inline constexpr std::size_t kBootstrapResamples = 200;

namespace detail {

// Bootstrap SD of the k-th order statistic (1-based) of a sorted sample.
// The k-th smallest of n resampled indices is floor(n U_(k)) with
// U_(k) ~ Beta(k, n - k + 1), so each replicate costs O(1).
inline double bootstrap_order_stat_sd(const std::vector<double>& sorted, std::size_t k,
                                      std::uint64_t seed) {
  const std::size_t n = sorted.size();
  auto rng = stream_rng(seed, 0xB0075742ULL + k);
  std::gamma_distribution<double> ga(static_cast<double>(k), 1.0);
  std::gamma_distribution<double> gb(static_cast<double>(n - k + 1), 1.0);
  double sum = 0.0;
  double sumsq = 0.0;
  for (std::size_t b = 0; b < kBootstrapResamples; ++b) {
    const double x = ga(rng);
    const double y = gb(rng);
    const double u = x / (x + y);
    const auto j = std::min(n - 1, static_cast<std::size_t>(u * static_cast<double>(n)));
    const double r = sorted[j];
    sum += r;
    sumsq += r * r;
  }
  const double m = sum / kBootstrapResamples;
  const double variance =
      std::max(0.0, (sumsq - kBootstrapResamples * m * m) / (kBootstrapResamples - 1));
  return std::sqrt(variance);
}

inline std::size_t empirical_rank(std::size_t n, double level) {
  const double k = std::ceil(static_cast<double>(n) * level - 1e-9);
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(1.0, k)), 1, n);
}

inline McEstimate mc_from_sorted(const std::vector<double>& s, const MeasureSpec& spec,
                                 std::uint64_t seed) {
  const std::size_t n = s.size();
  if (spec.kind == MeasureKind::ml) return {s.back(), bootstrap_order_stat_sd(s, n, seed)};
  const std::size_t k = empirical_rank(n, spec.level);
  const double v = s[k - 1];
  if (spec.kind == MeasureKind::var) return {v, bootstrap_order_stat_sd(s, k, seed)};

  const auto first_above = std::upper_bound(s.begin(), s.end(), v);
  const auto m = static_cast<double>(s.end() - first_above);
  double sum = 0.0;
  for (auto it = first_above; it != s.end(); ++it) sum += *it;
  const double nd = static_cast<double>(n);
  const double tail_count = (1.0 - spec.level) * nd;
  double value;
  if (spec.es_mode == EsMode::strict_conditional) {
    if (m == 0.0) throw UndefinedMeasureError("strict conditional ES undefined: no draws above VaR");
    value = sum / m;
  } else {
    value = (sum + v * (tail_count - m)) / tail_count;
  }
  // Sample variance of the worst draws (from the VaR order statistic up).
  const auto tail_begin = s.begin() + static_cast<std::ptrdiff_t>(k - 1);
  const auto cnt = static_cast<double>(s.end() - tail_begin);
  double tm = 0.0;
  for (auto it = tail_begin; it != s.end(); ++it) tm += *it;
  tm /= cnt;
  double tv = 0.0;
  for (auto it = tail_begin; it != s.end(); ++it) tv += (*it - tm) * (*it - tm);
  tv = cnt > 1.0 ? tv / (cnt - 1.0) : 0.0;
  // Asymptotic variance of the tail average, including the VaR estimation term.
  const double se = std::sqrt((tv + spec.level * (value - v) * (value - v)) / tail_count);
  return {value, se};
}

}  // namespace detail

/// Evaluates several measures on a single set of n draws. Tails are lifted
/// with BodyPlacement::standard_for first.
inline std::vector<McEstimate> mc_estimate_vector(const Distribution& dist,
                                                  std::vector<MeasureSpec> specs, std::size_t n,
                                                  std::uint64_t seed) {
  if (n < 1000) throw ArgumentError("Monte Carlo estimation needs n >= 1000");
  specs = canonical_specs(std::move(specs));
  ensure_valid(dist);
  Distribution d = to_loss(dist);
  if (const auto* t = std::get_if<TailSpec>(&d)) {
    for (const auto& s : specs)
      if (s.kind != MeasureKind::ml && s.level < t->alpha)
        throw UndefinedMeasureError(to_string(s) + " lies below the tail level");
    d = lift_tail(*t, BodyPlacement::standard_for(*t));
  }
  auto draws = sample(d, n, seed).losses;
  std::sort(draws.begin(), draws.end());
  std::vector<McEstimate> out;
  out.reserve(specs.size());
  for (const auto& s : specs) out.push_back(detail::mc_from_sorted(draws, s, seed));
  return out;
}

inline McEstimate mc_estimate(const Distribution& dist, const MeasureSpec& spec, std::size_t n,
                              std::uint64_t seed) {
  return mc_estimate_vector(dist, {spec}, n, seed).front();
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

enum class EvaluationMethod { closed_form, monte_carlo };

struct ReportEntry {
  MeasureSpec spec;
  double value;
  EvaluationMethod method;
  std::optional<double> standard_error;  // present iff monte_carlo
};

struct RiskReport {
  std::string dist_id;
  std::vector<ReportEntry> entries;
};

struct McOptions {
  std::size_t n;
  std::uint64_t seed;
};

/// Closed-form entries in canonical order; with `mc`, one oracle entry per
/// spec follows its closed-form entry.
inline RiskReport make_report(std::string dist_id, const Distribution& dist,
                              const std::vector<MeasureSpec>& specs,
                              std::optional<McOptions> mc = std::nullopt) {
  RiskReport report{std::move(dist_id), {}};
  const MeasureVector exact = evaluate_vector(dist, specs);
  std::vector<McEstimate> oracle;
  if (mc) oracle = mc_estimate_vector(dist, exact.specs(), mc->n, mc->seed);
  for (std::size_t i = 0; i < exact.entries.size(); ++i) {
    const auto& e = exact.entries[i];
    report.entries.push_back({e.spec, e.value, EvaluationMethod::closed_form, std::nullopt});
    if (mc)
      report.entries.push_back(
          {e.spec, oracle[i].value, EvaluationMethod::monte_carlo, oracle[i].standard_error});
  }
  return report;
}

}  // namespace riskscope
