#include <gtest/gtest.h>

#include "generators.hpp"
#include "riskscope/riskscope.hpp"

using namespace riskscope;

namespace {

std::vector<MeasureSpec> specs_for(const Distribution& d) {
  double l = 0.95;
  if (const auto* t = std::get_if<TailSpec>(&d)) l = t->alpha;
  return {MeasureSpec::var(l), MeasureSpec::es(l), MeasureSpec::ml()};
}

}  // namespace

TEST(AxiomCases, TranslationHoldsOnGeneratedDistributions) {
  gen::Gen g(51);
  for (int i = 0; i < 1000; ++i) {
    const auto d = gen::random_distribution(g);
    const Translation t{g.uniform(-1e3, 1e3)};
    for (const auto& s : specs_for(d)) {
      const auto r = check_axiom(s, d, t);
      EXPECT_EQ(r.verdict, Verdict::holds_on_cases) << to_string(s) << " " << r.lhs << " vs " << r.rhs;
    }
  }
}

TEST(AxiomCases, HomogeneityHoldsOnGeneratedDistributions) {
  gen::Gen g(52);
  for (int i = 0; i < 1000; ++i) {
    const auto d = gen::random_distribution(g);
    const Homogeneity h{g.coin(0.05) ? 0.0 : g.uniform(0.0, 20.0)};
    for (const auto& s : specs_for(d)) {
      const auto r = check_axiom(s, d, h);
      EXPECT_EQ(r.verdict, Verdict::holds_on_cases) << to_string(s) << " " << r.lhs << " vs " << r.rhs;
    }
  }
}

TEST(AxiomCases, MonotonicityOnNonPositiveLosses) {
  gen::Gen g(53);
  for (int i = 0; i < 300; ++i) {
    auto d = gen::random_discrete(g);
    double top = -1e300;
    for (const Atom& a : d.atoms) top = std::max(top, a.x);
    const Distribution shifted = shift(d, -top - g.uniform(0.0, 5.0));
    for (const auto& s : specs_for(shifted))
      EXPECT_EQ(check_axiom(s, shifted, Monotonicity{}).verdict, Verdict::holds_on_cases);
  }
}

TEST(AxiomCases, ViolationsAlwaysCarryReplayableWitnesses) {
  gen::Gen g(54);
  for (int i = 0; i < 1000; ++i) {
    const auto j = gen::random_joint(g);
    for (double l : {0.9, 0.95}) {
      const auto r = check_subadditivity(MeasureSpec::var(l), j);
      EXPECT_EQ(r.witness.has_value(), r.verdict == Verdict::violated);
      if (r.witness) {
        const auto text = json_io::dump(json_io::to_json(r));
        const auto back = json_io::joint_from_json(json_io::parse(text)["witness"]["joint"]);
        const auto again = check_subadditivity(r.measure, back);
        EXPECT_EQ(again.lhs, r.lhs);
        EXPECT_EQ(again.rhs, r.rhs);
      }
    }
  }
}

TEST(RoundTrip, ReEvaluationAfterJsonIsIdentical) {
  gen::Gen g(55);
  for (int i = 0; i < 200; ++i) {
    const auto d = gen::random_distribution(g);
    const auto back = json_io::read_distribution(json_io::write_distribution(d));
    for (const auto& s : specs_for(d)) EXPECT_EQ(evaluate(d, s), evaluate(back, s));
  }
}
