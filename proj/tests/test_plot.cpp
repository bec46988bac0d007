#include <gtest/gtest.h>

#include <sstream>

#include "riskscope/plot.hpp"

using namespace riskscope;

namespace {

std::vector<std::pair<double, double>> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::vector<std::pair<double, double>> out;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    out.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
  }
  return out;
}

double trapezoid(const std::vector<std::pair<double, double>>& pts) {
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    m += 0.5 * (pts[i].second + pts[i + 1].second) * (pts[i + 1].first - pts[i].first);
  return m;
}

}  // namespace

TEST(Csv, UniformTailKeepsItsMass) {
  const TailSpec t{0.95, shapes::uniform(0, 10, 1.0 - 0.95), Orientation::loss};
  const auto text = plot::csv(t);
  EXPECT_EQ(text.rfind("x,f\n", 0), 0u);
  const auto pts = parse_csv(text);
  EXPECT_EQ(pts.size(), 2u + plot::kInteriorPoints);
  EXPECT_NEAR(trapezoid(pts), 0.05, 1e-9);
}

TEST(Csv, TrainSamplesIncludeEveryKnot) {
  const TailSpec t{0.95, shapes::triangle_train(0, 10, 3, 1.0 - 0.95), Orientation::loss};
  const auto pts = parse_csv(plot::csv(t));
  EXPECT_NEAR(trapezoid(pts), 0.05, 1e-12);
  for (const Knot& k : t.knots)
    EXPECT_TRUE(std::any_of(pts.begin(), pts.end(), [&](const auto& p) { return p.first == k.x; }));
}

TEST(Csv, DiscreteStemsAndEmpiricalRejection) {
  const DiscreteDistribution d{{{2, 0.25}, {1, 0.75}}, Orientation::loss};
  EXPECT_EQ(plot::csv(d), "x,p\n1,0.75\n2,0.25\n");
  EXPECT_THROW(plot::csv(EmpiricalSample{{1, 2}, Orientation::loss}), ArgumentError);
}

TEST(Svg, TicksAtVarEsAndMl) {
  const TailSpec t{0.95, shapes::rising(-15, 15, 1.0 - 0.95), Orientation::loss};
  const auto svg = plot::svg(t);
  EXPECT_NE(svg.find("width=\"800\" height=\"400\""), std::string::npos);
  EXPECT_NE(svg.find(">var -15</text>"), std::string::npos);
  EXPECT_NE(svg.find(">es 5</text>"), std::string::npos);
  EXPECT_NE(svg.find(">ml 15</text>"), std::string::npos);
  EXPECT_EQ(svg, plot::svg(t));
  EXPECT_EQ(std::count(svg.begin(), svg.end(), '\n'), 8);
}

TEST(Svg, LevelSelectsTheTicks) {
  const TailSpec t{0.95, shapes::uniform(0, 10, 1.0 - 0.95), Orientation::loss};
  EXPECT_NE(plot::svg(t, 0.99).find(">var 8</text>"), std::string::npos);
  EXPECT_THROW(plot::svg(t, 0.9), UndefinedMeasureError);
}
