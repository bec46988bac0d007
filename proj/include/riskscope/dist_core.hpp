#pragma once

// Loss distributions: piecewise-linear densities, tails, discrete tables and
// empirical samples, with exact closed-form integration.
//
// Every value is loss-oriented internally (positive = bad). Values tagged
// Orientation::returns are reflected exactly once at the API boundary.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "riskscope/error.hpp"

namespace riskscope {

enum class Orientation { loss, returns };

inline const char* to_string(Orientation o) {
  return o == Orientation::loss ? "loss" : "return";
}

inline Orientation toggled(Orientation o) {
  return o == Orientation::loss ? Orientation::returns : Orientation::loss;
}

struct Knot {
  double x;
  double f;
  bool operator==(const Knot&) const = default;
};

struct Atom {
  double x;
  double p;
  bool operator==(const Atom&) const = default;
};

/// Continuous loss density: linear interpolation between consecutive knots,
/// zero outside [front().x, back().x]. Unit mass.
struct PiecewiseLinearDensity {
  std::vector<Knot> knots;
  Orientation orientation = Orientation::loss;
  bool operator==(const PiecewiseLinearDensity&) const = default;
};

/// The worst (1 - alpha) probability region [c, d] of a loss distribution.
/// The polyline integrates to 1 - alpha, c is the VaR at alpha and d the
/// maximum loss. Whatever lies below c is left unspecified.
struct TailSpec {
  double alpha = 0.95;
  std::vector<Knot> knots;
  Orientation orientation = Orientation::loss;

  double lower() const { return knots.front().x; }
  double upper() const { return knots.back().x; }
  double mass() const { return 1.0 - alpha; }
  bool operator==(const TailSpec&) const = default;
};

struct DiscreteDistribution {
  std::vector<Atom> atoms;
  Orientation orientation = Orientation::loss;
  bool operator==(const DiscreteDistribution&) const = default;
};

struct EmpiricalSample {
  std::vector<double> losses;
  Orientation orientation = Orientation::loss;
  bool operator==(const EmpiricalSample&) const = default;
};

using Distribution =
    std::variant<PiecewiseLinearDensity, TailSpec, DiscreteDistribution, EmpiricalSample>;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Structural invariants (closed forms) are checked at this tolerance.
inline constexpr double kMassTolerance = 1e-12;
// Cumulative-mass comparisons inside quantile searches snap to knots and
// atoms within this distance, so c is recovered exactly from a lifted tail.
inline constexpr double kMassSnap = 1e-14;

inline std::string format_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// Polyline primitives
// ---------------------------------------------------------------------------

namespace polyline {

struct Integral {
  double mass = 0.0;
  double moment = 0.0;
};

inline double interpolate(const Knot& a, const Knot& b, double x) {
  if (x <= a.x) return a.f;
  if (x >= b.x) return b.f;
  return a.f + (b.f - a.f) * ((x - a.x) / (b.x - a.x));
}

// Density at x; zero outside the support. At an interior knot both sides agree.
inline double value_at(std::span<const Knot> knots, double x) {
  if (knots.empty() || x < knots.front().x || x > knots.back().x) return 0.0;
  auto it = std::upper_bound(knots.begin(), knots.end(), x,
                             [](double v, const Knot& k) { return v < k.x; });
  if (it == knots.end()) return knots.back().f;
  if (it == knots.begin()) return knots.front().f;
  return interpolate(*(it - 1), *it, x);
}

// One-sided limit of the density at x (side < 0: from the left).
inline double limit_at(std::span<const Knot> knots, double x, int side) {
  if (knots.empty()) return 0.0;
  if (x < knots.front().x || x > knots.back().x) return 0.0;
  if (x == knots.front().x && side < 0) return 0.0;
  if (x == knots.back().x && side > 0) return 0.0;
  return value_at(knots, x);
}

// Exact integral of f and x*f over [a, b] (trapezoid and Simpson are exact
// on linear pieces).
inline Integral integrate(std::span<const Knot> knots, double a, double b) {
  Integral out;
  if (!(a < b)) return out;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const Knot& k0 = knots[i];
    const Knot& k1 = knots[i + 1];
    const double lo = std::max(a, k0.x);
    const double hi = std::min(b, k1.x);
    if (!(lo < hi)) continue;
    const double flo = lo == k0.x ? k0.f : interpolate(k0, k1, lo);
    const double fhi = hi == k1.x ? k1.f : interpolate(k0, k1, hi);
    const double h = hi - lo;
    out.mass += 0.5 * (flo + fhi) * h;
    out.moment += h / 6.0 * (flo * (2.0 * lo + hi) + fhi * (lo + 2.0 * hi));
  }
  return out;
}

inline double total_mass(std::span<const Knot> knots) {
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i)
    m += 0.5 * (knots[i].f + knots[i + 1].f) * (knots[i + 1].x - knots[i].x);
  return m;
}

// Offset t in [0, h] at which a linear piece (f0 -> f1 over width h) has
// accumulated mass r. Rationalized root, stable for f0 = 0 and flat pieces.
inline double segment_offset(double f0, double f1, double h, double r) {
  if (r <= 0.0) return 0.0;
  const double slope = (f1 - f0) / h;
  const double disc = std::max(0.0, f0 * f0 + 2.0 * slope * r);
  const double denom = f0 + std::sqrt(disc);
  if (!(denom > 0.0)) return h;
  return std::clamp(2.0 * r / denom, 0.0, h);
}

// Right end of the essential support: last knot whose left piece is not
// identically zero.
inline double upper_support(std::span<const Knot> knots) {
  for (std::size_t i = knots.size(); i-- > 1;) {
    if (knots[i].f > 0.0 || knots[i - 1].f > 0.0) return knots[i].x;
  }
  return knots.back().x;
}

inline double lower_support(std::span<const Knot> knots) {
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    if (knots[i].f > 0.0 || knots[i + 1].f > 0.0) return knots[i].x;
  }
  return knots.front().x;
}

// inf{x : mass(-inf, x] >= need}, with knot snapping at kMassSnap. Returns
// the upper support when the polyline never accumulates `need`.
inline double quantile(std::span<const Knot> knots, double need) {
  if (need <= kMassSnap) return lower_support(knots);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const Knot& k0 = knots[i];
    const Knot& k1 = knots[i + 1];
    const double h = k1.x - k0.x;
    const double m = 0.5 * (k0.f + k1.f) * h;
    if (acc + m >= need - kMassSnap) {
      const double r = need - acc;
      if (r <= kMassSnap) return k0.x;
      if (m - r <= kMassSnap) return k1.x;
      return k0.x + segment_offset(k0.f, k1.f, h, r);
    }
    acc += m;
  }
  return upper_support(knots);
}

// Pointwise sum. Inputs must vanish at any of their support boundaries that
// fall strictly inside the other's support (no implicit jumps).
inline std::vector<Knot> add(std::span<const Knot> a, std::span<const Knot> b) {
  if (a.empty()) return {b.begin(), b.end()};
  if (b.empty()) return {a.begin(), a.end()};
  auto jump_inside = [](std::span<const Knot> p, std::span<const Knot> q) {
    const bool left = p.front().f != 0.0 && p.front().x > q.front().x &&
                      p.front().x < q.back().x;
    const bool right = p.back().f != 0.0 && p.back().x > q.front().x &&
                       p.back().x < q.back().x;
    return left || right;
  };
  if (jump_inside(a, b) || jump_inside(b, a))
    throw ArgumentError("polyline sum would need a vertical jump inside the support");
  std::vector<double> xs;
  xs.reserve(a.size() + b.size());
  for (const Knot& k : a) xs.push_back(k.x);
  for (const Knot& k : b) xs.push_back(k.x);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::vector<Knot> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back({x, value_at(a, x) + value_at(b, x)});
  return out;
}

// Exact L1 distance between two polyline densities (implicit boundary jumps
// are handled through one-sided limits).
inline double l1_distance(std::span<const Knot> a, std::span<const Knot> b) {
  std::vector<double> xs;
  for (const Knot& k : a) xs.push_back(k.x);
  for (const Knot& k : b) xs.push_back(k.x);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double u = xs[i];
    const double v = xs[i + 1];
    const double du = limit_at(a, u, +1) - limit_at(b, u, +1);
    const double dv = limit_at(a, v, -1) - limit_at(b, v, -1);
    const double h = v - u;
    if ((du >= 0.0 && dv >= 0.0) || (du <= 0.0 && dv <= 0.0)) {
      total += 0.5 * std::abs(du + dv) * h;
    } else {
      total += 0.5 * h * (du * du + dv * dv) / (std::abs(du) + std::abs(dv));
    }
  }
  return total;
}

}  // namespace polyline

// ---------------------------------------------------------------------------
// Shape builders (total area `mass` on [c, d])
// ---------------------------------------------------------------------------

namespace shapes {

inline std::vector<Knot> uniform(double c, double d, double mass) {
  const double f = mass / (d - c);
  return {{c, f}, {d, f}};
}

// Zero at c, peak at d.
inline std::vector<Knot> rising(double c, double d, double mass) {
  return {{c, 0.0}, {d, 2.0 * mass / (d - c)}};
}

// Peak at c, zero at d.
inline std::vector<Knot> falling(double c, double d, double mass) {
  return {{c, 2.0 * mass / (d - c)}, {d, 0.0}};
}

// n congruent triangles tiling [c, d]; heights scaled so the area is `mass`.
inline std::vector<Knot> triangle_train(double c, double d, std::size_t n, double mass) {
  if (n == 0) throw ArgumentError("triangle train needs n >= 1");
  const double peak = 2.0 * mass / (d - c);
  const std::size_t steps = 2 * n;
  std::vector<Knot> out;
  out.reserve(steps + 1);
  for (std::size_t j = 0; j <= steps; ++j) {
    const double x = j == steps ? d : c + (d - c) * static_cast<double>(j) / static_cast<double>(steps);
    out.push_back({x, j % 2 == 1 ? peak : 0.0});
  }
  return out;
}

// Tent of total area `area` (may be negative) centred at `centre`.
inline std::vector<Knot> tent(double centre, double width, double area) {
  return {{centre - 0.5 * width, 0.0}, {centre, 2.0 * area / width}, {centre + 0.5 * width, 0.0}};
}

}  // namespace shapes

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct Violation {
  std::string invariant;
  std::string location;
  std::string detail;
};

namespace detail {

inline void check_knots(std::span<const Knot> knots, double expected_mass,
                        std::vector<Violation>& out) {
  if (knots.size() < 2) {
    out.push_back({"min_knots", "knots", "at least 2 knots required, got " +
                                             std::to_string(knots.size())});
    return;
  }
  bool finite = true;
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (!std::isfinite(knots[i].x) || !std::isfinite(knots[i].f)) {
      out.push_back({"finite", "knot " + std::to_string(i), "non-finite coordinate"});
      finite = false;
      continue;
    }
    if (knots[i].f < 0.0)
      out.push_back({"non_negative", "knot " + std::to_string(i),
                     "f = " + format_number(knots[i].f) + " < 0"});
    if (i > 0 && !(knots[i].x > knots[i - 1].x))
      out.push_back({"strictly_increasing", "knot " + std::to_string(i),
                     "x = " + format_number(knots[i].x) + " does not exceed the previous knot"});
  }
  if (!finite) return;
  const double mass = polyline::total_mass(knots);
  if (std::abs(mass - expected_mass) > kMassTolerance)
    out.push_back({"mass", "knots",
                   "integral = " + format_number(mass) + " != " + format_number(expected_mass)});
}

}  // namespace detail

inline std::vector<Violation> validate(const PiecewiseLinearDensity& d) {
  std::vector<Violation> out;
  detail::check_knots(d.knots, 1.0, out);
  return out;
}

inline std::vector<Violation> validate(const TailSpec& t) {
  std::vector<Violation> out;
  if (!(t.alpha > 0.0 && t.alpha < 1.0)) {
    out.push_back({"alpha_range", "alpha", "alpha = " + format_number(t.alpha) + " not in (0,1)"});
    detail::check_knots(t.knots, 0.0, out);
    std::erase_if(out, [](const Violation& v) { return v.invariant == "mass"; });
    return out;
  }
  detail::check_knots(t.knots, t.mass(), out);
  if (t.knots.size() >= 2) {
    const auto& k = t.knots;
    if (!(k[0].f > 0.0 || k[1].f > 0.0))
      out.push_back({"positive_near_c", "knot 0", "density vanishes right of c"});
    const std::size_t n = k.size();
    if (!(k[n - 1].f > 0.0 || k[n - 2].f > 0.0))
      out.push_back({"positive_near_d", "knot " + std::to_string(n - 1), "density vanishes left of d"});
  }
  return out;
}

inline std::vector<Violation> validate(const DiscreteDistribution& d) {
  std::vector<Violation> out;
  if (d.atoms.empty()) {
    out.push_back({"non_empty", "atoms", "no atoms"});
    return out;
  }
  double sum = 0.0;
  std::vector<double> xs;
  for (std::size_t i = 0; i < d.atoms.size(); ++i) {
    const Atom& a = d.atoms[i];
    const std::string loc = "atom " + std::to_string(i);
    if (!std::isfinite(a.x) || !std::isfinite(a.p)) {
      out.push_back({"finite", loc, "non-finite value"});
      continue;
    }
    if (a.p < 0.0 || a.p > 1.0)
      out.push_back({"probability_range", loc, "p = " + format_number(a.p) + " not in [0,1]"});
    sum += a.p;
    xs.push_back(a.x);
  }
  std::vector<double> sorted = xs;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    out.push_back({"distinct_values", "atoms", "duplicate loss value"});
  if (std::abs(sum - 1.0) > kMassTolerance)
    out.push_back({"mass", "atoms", "probabilities sum to " + format_number(sum) + " != 1"});
  return out;
}

inline std::vector<Violation> validate(const EmpiricalSample& s) {
  std::vector<Violation> out;
  if (s.losses.empty()) out.push_back({"non_empty", "losses", "empty sample"});
  for (std::size_t i = 0; i < s.losses.size(); ++i) {
    if (!std::isfinite(s.losses[i]))
      out.push_back({"finite", "loss " + std::to_string(i), "non-finite value"});
  }
  return out;
}

inline std::vector<Violation> validate(const Distribution& d) {
  return std::visit([](const auto& v) { return validate(v); }, d);
}

inline std::string describe(const std::vector<Violation>& violations) {
  std::string s;
  for (const Violation& v : violations) {
    if (!s.empty()) s += "; ";
    s += v.invariant + " at " + v.location + " (" + v.detail + ")";
  }
  return s;
}

template <class D>
void ensure_valid(const D& d) {
  auto violations = validate(d);
  if (!violations.empty())
    throw ValidationError("invalid distribution: " + describe(violations));
}

// ---------------------------------------------------------------------------
// Orientation
// ---------------------------------------------------------------------------

namespace detail {
inline double negate(double x) { return x == 0.0 ? 0.0 : -x; }

inline std::vector<Knot> reflect_knots(const std::vector<Knot>& knots) {
  std::vector<Knot> out;
  out.reserve(knots.size());
  for (auto it = knots.rbegin(); it != knots.rend(); ++it) out.push_back({negate(it->x), it->f});
  return out;
}
}  // namespace detail

// Negates every value and toggles the orientation tag.
inline PiecewiseLinearDensity reflect(const PiecewiseLinearDensity& d) {
  return {detail::reflect_knots(d.knots), toggled(d.orientation)};
}

inline TailSpec reflect(const TailSpec& t) {
  return {t.alpha, detail::reflect_knots(t.knots), toggled(t.orientation)};
}

inline DiscreteDistribution reflect(const DiscreteDistribution& d) {
  DiscreteDistribution out{{}, toggled(d.orientation)};
  out.atoms.reserve(d.atoms.size());
  for (auto it = d.atoms.rbegin(); it != d.atoms.rend(); ++it)
    out.atoms.push_back({detail::negate(it->x), it->p});
  return out;
}

inline EmpiricalSample reflect(const EmpiricalSample& s) {
  EmpiricalSample out{{}, toggled(s.orientation)};
  out.losses.reserve(s.losses.size());
  for (double v : s.losses) out.losses.push_back(detail::negate(v));
  return out;
}

inline Distribution reflect(const Distribution& d) {
  return std::visit([](const auto& v) -> Distribution { return reflect(v); }, d);
}

template <class D>
D to_loss(const D& d) {
  return d.orientation == Orientation::loss ? d : reflect(d);
}

inline Distribution to_loss(const Distribution& d) {
  return std::visit([](const auto& v) -> Distribution { return to_loss(v); }, d);
}

inline Orientation orientation_of(const Distribution& d) {
  return std::visit([](const auto& v) { return v.orientation; }, d);
}

inline const char* kind_name(const Distribution& d) {
  return std::visit(overloaded{
                        [](const PiecewiseLinearDensity&) { return "piecewise_linear"; },
                        [](const TailSpec&) { return "tail"; },
                        [](const DiscreteDistribution&) { return "discrete"; },
                        [](const EmpiricalSample&) { return "empirical"; },
                    },
                    d);
}

// ---------------------------------------------------------------------------
// Discrete helpers
// ---------------------------------------------------------------------------

// Atoms sorted by value with equal values merged.
inline std::vector<Atom> sorted_atoms(std::span<const Atom> atoms) {
  std::map<double, double> merged;
  for (const Atom& a : atoms) merged[a.x] += a.p;
  std::vector<Atom> out;
  out.reserve(merged.size());
  for (const auto& [x, p] : merged) out.push_back({x, p});
  return out;
}

inline DiscreteDistribution to_discrete(const EmpiricalSample& s) {
  std::vector<double> v = s.losses;
  std::sort(v.begin(), v.end());
  DiscreteDistribution out{{}, s.orientation};
  const double w = 1.0 / static_cast<double>(v.size());
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i]) ++j;
    out.atoms.push_back({v[i], static_cast<double>(j - i) * w});
    i = j;
  }
  return out;
}

inline DiscreteDistribution point_mass(double x) { return {{{x, 1.0}}, Orientation::loss}; }

// Exact distribution of the independent sum; equal losses are merged.
inline DiscreteDistribution convolve(const DiscreteDistribution& a, const DiscreteDistribution& b) {
  ensure_valid(a);
  ensure_valid(b);
  const auto la = to_loss(a);
  const auto lb = to_loss(b);
  std::map<double, double> merged;
  for (const Atom& u : la.atoms) {
    for (const Atom& v : lb.atoms) {
      const double p = u.p * v.p;
      if (p > 0.0) merged[u.x + v.x] += p;
    }
  }
  DiscreteDistribution out;
  for (const auto& [x, p] : merged) out.atoms.push_back({x, p > 1.0 && p - 1.0 <= kMassSnap ? 1.0 : p});
  return out;
}

// ---------------------------------------------------------------------------
// CDF and interval integrals (loss space)
// ---------------------------------------------------------------------------

namespace detail {

inline double discrete_mass(std::span<const Atom> atoms, double a, double b) {
  double m = 0.0;
  for (const Atom& at : atoms)
    if (at.x > a && at.x <= b) m += at.p;
  return m;
}

inline double discrete_moment(std::span<const Atom> atoms, double a, double b) {
  double m = 0.0;
  for (const Atom& at : atoms)
    if (at.x > a && at.x <= b) m += at.x * at.p;
  return m;
}

// P(V <= v) on the stored values, ignoring the orientation tag.
inline double raw_cdf(const Distribution& d, double v) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  return std::visit(
      overloaded{
          [&](const PiecewiseLinearDensity& p) { return polyline::integrate(p.knots, -kInf, v).mass; },
          [&](const TailSpec& t) -> double {
            if (v < t.lower())
              throw UndefinedMeasureError("cdf below the tail start depends on the unspecified body");
            return t.alpha + polyline::integrate(t.knots, -kInf, v).mass;
          },
          [&](const DiscreteDistribution& dd) { return discrete_mass(dd.atoms, -kInf, v); },
          [&](const EmpiricalSample& s) {
            const auto n = std::count_if(s.losses.begin(), s.losses.end(),
                                         [&](double x) { return x <= v; });
            return static_cast<double>(n) / static_cast<double>(s.losses.size());
          },
      },
      d);
}

}  // namespace detail

/// P(L <= x) for a loss value x.
inline double cdf(const Distribution& d, double x) {
  ensure_valid(d);
  return detail::raw_cdf(to_loss(d), x);
}

/// P(V <= v) in the distribution's own orientation (returns stay returns).
inline double value_cdf(const Distribution& d, double v) {
  ensure_valid(d);
  return detail::raw_cdf(d, v);
}

/// Exact mass on [a, b] (discrete and empirical: atoms in (a, b]).
inline double interval_mass(const Distribution& d, double a, double b) {
  if (a > b) throw ArgumentError("interval_mass requires a <= b");
  ensure_valid(d);
  return std::visit(
      overloaded{
          [&](const PiecewiseLinearDensity& p) { return polyline::integrate(p.knots, a, b).mass; },
          [&](const TailSpec& t) { return polyline::integrate(t.knots, a, b).mass; },
          [&](const DiscreteDistribution& dd) { return detail::discrete_mass(dd.atoms, a, b); },
          [&](const EmpiricalSample& s) {
            return detail::discrete_mass(to_discrete(s).atoms, a, b);
          },
      },
      to_loss(d));
}

/// Exact integral of x f(x) over [a, b].
inline double interval_first_moment(const Distribution& d, double a, double b) {
  if (a > b) throw ArgumentError("interval_first_moment requires a <= b");
  ensure_valid(d);
  return std::visit(
      overloaded{
          [&](const PiecewiseLinearDensity& p) { return polyline::integrate(p.knots, a, b).moment; },
          [&](const TailSpec& t) { return polyline::integrate(t.knots, a, b).moment; },
          [&](const DiscreteDistribution& dd) { return detail::discrete_moment(dd.atoms, a, b); },
          [&](const EmpiricalSample& s) {
            return detail::discrete_moment(to_discrete(s).atoms, a, b);
          },
      },
      to_loss(d));
}

/// Mean loss of a full distribution (tails have no defined mean).
inline double mean(const Distribution& d) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  if (std::holds_alternative<TailSpec>(d))
    throw UndefinedMeasureError("the mean of a tail depends on the unspecified body");
  return interval_first_moment(d, -kInf, kInf);
}

// ---------------------------------------------------------------------------
// Affine transforms in loss space
// ---------------------------------------------------------------------------

namespace detail {
// Rounded knot positions change segment widths; rescale so the mass is kept.
inline void restore_mass(std::vector<Knot>& knots, double mass) {
  const double m = polyline::total_mass(knots);
  if (m > 0.0 && m != mass)
    for (Knot& k : knots) k.f *= mass / m;
}
}  // namespace detail

/// Loss-space translation L + a.
inline Distribution shift(const Distribution& d, double a) {
  return std::visit(
      overloaded{
          [&](PiecewiseLinearDensity p) -> Distribution {
            const double m = polyline::total_mass(p.knots);
            for (Knot& k : p.knots) k.x += a;
            detail::restore_mass(p.knots, m);
            return p;
          },
          [&](TailSpec t) -> Distribution {
            const double m = polyline::total_mass(t.knots);
            for (Knot& k : t.knots) k.x += a;
            detail::restore_mass(t.knots, m);
            return t;
          },
          [&](DiscreteDistribution dd) -> Distribution {
            for (Atom& at : dd.atoms) at.x += a;
            return dd;
          },
          [&](EmpiricalSample s) -> Distribution {
            for (double& v : s.losses) v += a;
            return s;
          },
      },
      to_loss(d));
}

/// Loss-space scaling k L for k >= 0 (k = 0 collapses to a point mass at 0).
inline Distribution scale(const Distribution& d, double k) {
  if (!(k >= 0.0) || !std::isfinite(k)) throw ArgumentError("scale factor must be finite and >= 0");
  if (k == 0.0) return point_mass(0.0);
  return std::visit(
      overloaded{
          [&](PiecewiseLinearDensity p) -> Distribution {
            for (Knot& kn : p.knots) kn = {kn.x * k, kn.f / k};
            return p;
          },
          [&](TailSpec t) -> Distribution {
            for (Knot& kn : t.knots) kn = {kn.x * k, kn.f / k};
            return t;
          },
          [&](DiscreteDistribution dd) -> Distribution {
            for (Atom& at : dd.atoms) at.x *= k;
            return dd;
          },
          [&](EmpiricalSample s) -> Distribution {
            for (double& v : s.losses) v *= k;
            return s;
          },
      },
      to_loss(d));
}

// ---------------------------------------------------------------------------
// Tail lifting
// ---------------------------------------------------------------------------

/// Where the body mass alpha goes: uniform on [lower, upper] with upper <= c.
/// A vertical step inside the support is realized as a linear junction of
/// width `junction_width` (0 picks a default of 1e-6 of the body width).
struct BodyPlacement {
  double lower;
  double upper;
  double junction_width = 0.0;

  static BodyPlacement uniform_below(double c, double width) { return {c - width, c, 0.0}; }

  // Default used by Monte Carlo evaluation of tails: ten tail-widths of body.
  static BodyPlacement standard_for(const TailSpec& t) {
    return uniform_below(t.lower(), 10.0 * (t.upper() - t.lower()));
  }
};

/// Full unit-mass density agreeing with the tail on [c, d] and holding the
/// remaining mass alpha strictly below c.
inline PiecewiseLinearDensity lift_tail(const TailSpec& tail_in, const BodyPlacement& body) {
  ensure_valid(tail_in);
  const TailSpec tail = to_loss(tail_in);
  const double c = tail.lower();
  const double fc = tail.knots.front().f;
  if (!std::isfinite(body.lower) || !std::isfinite(body.upper) || !(body.lower < body.upper))
    throw ArgumentError("body placement needs finite lower < upper");
  if (body.upper > c)
    throw ArgumentError("body placement puts mass above c = " + format_number(c));
  const double width = body.upper - body.lower;
  const double alpha = tail.alpha;

  std::vector<Knot> knots;
  if (body.upper == c) {
    const double eps = body.junction_width > 0.0 ? body.junction_width : 1e-6 * width;
    if (!(eps < width)) throw ArgumentError("junction width exceeds body width");
    const double h = (alpha - 0.5 * eps * fc) / (width - 0.5 * eps);
    if (!(h > 0.0)) throw ArgumentError("junction too wide for the body mass");
    knots = {{body.lower, h}, {c - eps, h}};
  } else {
    const double gap = c - body.upper;
    const double eps = body.junction_width > 0.0 ? body.junction_width
                                                 : std::min(1e-6 * width, gap / 3.0);
    const bool step_up = fc > 0.0;
    if (!(body.upper + eps < (step_up ? c - eps : c)))
      throw ArgumentError("junction width does not fit between body and tail");
    const double junction_mass = step_up ? 0.5 * eps * fc : 0.0;
    const double h = (alpha - junction_mass) / (width + 0.5 * eps);
    if (!(h > 0.0)) throw ArgumentError("junction too wide for the body mass");
    knots = {{body.lower, h}, {body.upper, h}, {body.upper + eps, 0.0}};
    if (step_up) knots.push_back({c - eps, 0.0});
  }
  knots.insert(knots.end(), tail.knots.begin(), tail.knots.end());
  PiecewiseLinearDensity out{std::move(knots), Orientation::loss};
  ensure_valid(out);
  return out;
}

}  // namespace riskscope
