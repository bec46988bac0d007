#include <gtest/gtest.h>

#include "riskscope/scenarios.hpp"

using namespace riskscope;

namespace {

std::vector<double> values(const scenarios::ScenarioFixture& f, const MeasureSpec& s) {
  std::vector<double> out;
  for (const auto& m : f.members) out.push_back(evaluate(m.dist, s));
  return out;
}

void expect_all_near(const std::vector<double>& got, const std::vector<double>& want) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-12) << "member " << i;
}

const MeasureSpec kVar = MeasureSpec::var(0.95);
const MeasureSpec kEs = MeasureSpec::es(0.95);
const MeasureSpec kMl = MeasureSpec::ml();

}  // namespace

TEST(Registry, IdsAndUnknown) {
  const auto ids = scenarios::registered_ids();
  EXPECT_EQ(ids.size(), 9u);
  EXPECT_EQ(ids.front(), "fig2");
  EXPECT_EQ(ids.back(), "loans");
  EXPECT_THROW(scenarios::load("fig1"), ArgumentError);
}

TEST(Fixtures, Fig6Es) { expect_all_near(values(scenarios::load("fig6"), kEs), {5.0 / 3, 2.5, 10.0 / 3}); }

TEST(Fixtures, Fig7Var) { expect_all_near(values(scenarios::load("fig7"), kVar), {-5, -15, 0}); }

TEST(Fixtures, Fig3Values) {
  const auto f = scenarios::load("fig3");
  expect_all_near(values(f, kVar), {4, 0, 0});
  expect_all_near(values(f, kEs), {10, 10, 10});
  expect_all_near(values(f, kMl), {16, 15, 30});
}

TEST(Fixtures, LoanSumAtoms) {
  const auto f = scenarios::load("loans");
  const auto& pair = std::get<DiscreteDistribution>(f.members[2].dist);
  ASSERT_EQ(pair.atoms.size(), 3u);
  EXPECT_EQ(pair.atoms[0].p, 0.9216);
  EXPECT_EQ(pair.atoms[1].p, 0.0768);
  EXPECT_EQ(pair.atoms[2].p, 0.0016);
}

TEST(Fixtures, EveryExpectedValueHasANote) {
  for (const auto& id : scenarios::registered_ids())
    for (const auto& m : scenarios::load(id).members) {
      for (const auto& e : m.expected) EXPECT_FALSE(e.note.empty()) << id << " " << m.label;
      for (const auto& a : m.expected_atoms) EXPECT_FALSE(a.note.empty()) << id << " " << m.label;
    }
}

TEST(Fixtures, SynthesizedFamiliesShareTheirVectors) {
  const auto f8 = scenarios::load("fig8");
  ASSERT_EQ(f8.members.size(), 4u);
  expect_all_near(values(f8, kVar), {0, 0, 0, 0});
  expect_all_near(values(f8, kEs), {5, 5, 5, 5});
  expect_all_near(values(f8, kMl), {10, 10, 10, 10});
  const auto f9 = scenarios::load("fig9");
  ASSERT_EQ(f9.members.size(), 3u);
  expect_all_near(values(f9, MeasureSpec::var(0.99)), {8, 8, 8});
  expect_all_near(values(f9, MeasureSpec::es(0.99)), {9, 9, 9});
}

TEST(RunAll, EveryFixturePasses) {
  const auto rep = scenarios::run_all();
  EXPECT_TRUE(rep.passes);
  for (const auto& f : rep.fixtures) {
    EXPECT_TRUE(f.passes) << f.id;
    for (const auto& v : f.values) EXPECT_TRUE(v.pass) << f.id << " " << v.what << " member " << v.member;
    for (const auto& c : f.claims) EXPECT_TRUE(c.pass) << f.id;
  }
}

TEST(RunAll, FiveMeasureMenuResults) {
  const auto rep = scenarios::run_all();
  for (const auto& f : rep.fixtures) {
    if (f.id == "fig9")
      EXPECT_FALSE(f.five_measure.separable);
    else
      EXPECT_TRUE(f.five_measure.separable) << f.id;
  }
}

TEST(RunAll, DeterministicAndIdempotent) {
  const auto a = json_io::dump(scenarios::to_json(scenarios::run_all()));
  const auto b = json_io::dump(scenarios::to_json(scenarios::run_all()));
  EXPECT_EQ(a, b);
}
