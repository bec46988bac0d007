#pragma once

// Tail plots: CSV samples of the density polyline and a fixed-viewport SVG
// with ticks at VaR, ES and ML. Output depends only on the input values.

#include <algorithm>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "riskscope/dist_core.hpp"
#include "riskscope/measures.hpp"

namespace riskscope::plot {

inline constexpr std::size_t kInteriorPoints = 256;
inline constexpr double kWidth = 800.0;
inline constexpr double kHeight = 400.0;
inline constexpr double kMargin = 40.0;

namespace detail {

inline std::string fmt(const char* spec, double v) {
  if (v == 0.0) v = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

inline const std::vector<Knot>* knots_of(const Distribution& d) {
  if (auto* p = std::get_if<PiecewiseLinearDensity>(&d)) return &p->knots;
  if (auto* t = std::get_if<TailSpec>(&d)) return &t->knots;
  return nullptr;
}

}  // namespace detail

/// Knots plus kInteriorPoints evenly spaced points strictly inside the support.
inline std::vector<Knot> density_samples(const std::vector<Knot>& knots) {
  const double lo = knots.front().x;
  const double hi = knots.back().x;
  std::vector<Knot> out(knots.begin(), knots.end());
  const double step = (hi - lo) / static_cast<double>(kInteriorPoints + 1);
  for (std::size_t i = 1; i <= kInteriorPoints; ++i) {
    const double x = lo + step * static_cast<double>(i);
    if (x <= lo || x >= hi) continue;
    out.push_back({x, polyline::value_at(knots, x)});
  }
  std::stable_sort(out.begin(), out.end(), [](const Knot& a, const Knot& b) { return a.x < b.x; });
  // Interior points landing on a knot would duplicate it.
  out.erase(std::unique(out.begin(), out.end(), [](const Knot& a, const Knot& b) { return a.x == b.x; }),
            out.end());
  return out;
}

inline std::string csv(const Distribution& dist) {
  ensure_valid(dist);
  const Distribution d = to_loss(dist);
  std::string out;
  if (const auto* knots = detail::knots_of(d)) {
    out = "x,f\n";
    for (const Knot& k : density_samples(*knots))
      out += detail::fmt("%.17g", k.x) + "," + detail::fmt("%.17g", k.f) + "\n";
    return out;
  }
  if (const auto* dd = std::get_if<DiscreteDistribution>(&d)) {
    out = "x,p\n";
    for (const Atom& a : sorted_atoms(dd->atoms))
      out += detail::fmt("%.17g", a.x) + "," + detail::fmt("%.17g", a.p) + "\n";
    return out;
  }
  throw ArgumentError("empirical samples have no density to plot");
}

struct Tick {
  const char* name;
  double value;
};

/// VaR, ES and ML at `level`; a tail defaults to its own alpha, others to 0.95.
inline std::vector<Tick> ticks(const Distribution& dist, std::optional<double> level) {
  double l = level.value_or(0.95);
  if (!level)
    if (const auto* t = std::get_if<TailSpec>(&dist)) l = t->alpha;
  return {{"var", var(dist, l)}, {"es", es(dist, l)}, {"ml", max_loss(dist)}};
}

inline std::string svg(const Distribution& dist, std::optional<double> level = std::nullopt) {
  ensure_valid(dist);
  const Distribution d = to_loss(dist);
  if (std::holds_alternative<EmpiricalSample>(d))
    throw ArgumentError("empirical samples have no density to plot");

  std::vector<Knot> pts;
  bool stems = false;
  if (const auto* knots = detail::knots_of(d)) {
    pts = density_samples(*knots);
  } else {
    stems = true;
    for (const Atom& a : sorted_atoms(std::get<DiscreteDistribution>(d).atoms)) pts.push_back({a.x, a.p});
  }
  const auto marks = ticks(d, level);

  double lo = pts.front().x;
  double hi = pts.back().x;
  for (const Tick& t : marks) {
    lo = std::min(lo, t.value);
    hi = std::max(hi, t.value);
  }
  if (hi - lo <= 0.0) {
    lo -= 1.0;
    hi += 1.0;
  }
  double top = 0.0;
  for (const Knot& k : pts) top = std::max(top, k.f);
  if (top <= 0.0) top = 1.0;
  top *= 1.1;

  const double plot_w = kWidth - 2.0 * kMargin;
  const double plot_h = kHeight - 2.0 * kMargin;
  auto px = [&](double x) { return kMargin + (x - lo) / (hi - lo) * plot_w; };
  auto py = [&](double f) { return kHeight - kMargin - f / top * plot_h; };
  const double base = py(0.0);

  std::string path;
  if (stems) {
    for (const Knot& k : pts) {
      const std::string x = detail::fmt("%.3f", px(k.x));
      path += "M" + x + "," + detail::fmt("%.3f", base) + " L" + x + "," + detail::fmt("%.3f", py(k.f)) + " ";
    }
  } else {
    for (std::size_t i = 0; i < pts.size(); ++i)
      path += (i == 0 ? "M" : "L") + detail::fmt("%.3f", px(pts[i].x)) + "," +
              detail::fmt("%.3f", py(pts[i].f)) + " ";
  }
  if (!path.empty()) path.pop_back();

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"400\" viewBox=\"0 0 800 400\">\n";
  out += "<rect width=\"800\" height=\"400\" fill=\"white\"/>\n";
  out += "<line class=\"axis\" x1=\"" + detail::fmt("%.3f", kMargin) + "\" y1=\"" + detail::fmt("%.3f", base) +
         "\" x2=\"" + detail::fmt("%.3f", kWidth - kMargin) + "\" y2=\"" + detail::fmt("%.3f", base) +
         "\" stroke=\"black\"/>\n";
  out += "<path class=\"density\" d=\"" + path + "\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\"/>\n";
  for (const Tick& t : marks) {
    const std::string x = detail::fmt("%.3f", px(t.value));
    out += "<g class=\"tick-" + std::string(t.name) + "\">";
    out += "<line x1=\"" + x + "\" y1=\"" + detail::fmt("%.3f", base) + "\" x2=\"" + x + "\" y2=\"" +
           detail::fmt("%.3f", base + 6.0) + "\" stroke=\"black\"/>";
    out += "<text x=\"" + x + "\" y=\"" + detail::fmt("%.3f", base + 20.0) +
           "\" text-anchor=\"middle\" font-size=\"12\">" + t.name + " " + detail::fmt("%.6g", t.value) +
           "</text></g>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace riskscope::plot
