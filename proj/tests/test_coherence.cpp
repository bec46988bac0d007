#include <gtest/gtest.h>

#include "generators.hpp"
#include "riskscope/coherence.hpp"

using namespace riskscope;

TEST(Loans, PairDistributionAndVarJump) {
  const auto ex = loan_counterexample();
  const auto sum = sum_distribution(ex.pair);
  ASSERT_EQ(sum.atoms.size(), 3u);
  EXPECT_EQ(sum.atoms[0].x, 0.0);
  EXPECT_EQ(sum.atoms[0].p, 0.9216);
  EXPECT_EQ(sum.atoms[1].x, 1e6);
  EXPECT_EQ(sum.atoms[1].p, 0.0768);
  EXPECT_EQ(sum.atoms[2].x, 2e6);
  EXPECT_EQ(sum.atoms[2].p, 0.0016);
  EXPECT_EQ(var(ex.big_loan, 0.95), 0.0);
  EXPECT_EQ(var(marginal1(ex.pair), 0.95), 0.0);
  EXPECT_EQ(var(marginal2(ex.pair), 0.95), 0.0);
  EXPECT_EQ(var(sum, 0.95), 1e6);
}

TEST(Loans, VarViolatesSubadditivityAndEsDoesNot) {
  const auto ex = loan_counterexample();
  const auto v = check_subadditivity(MeasureSpec::var(0.95), ex.pair);
  EXPECT_EQ(v.verdict, Verdict::violated);
  EXPECT_EQ(v.lhs, 1e6);
  EXPECT_EQ(v.rhs, 0.0);
  ASSERT_TRUE(v.witness.has_value());
  EXPECT_EQ(replay(v), std::pair(v.lhs, v.rhs));

  const auto e = check_subadditivity(MeasureSpec::es(0.95), ex.pair);
  EXPECT_EQ(e.verdict, Verdict::holds_on_cases);
  EXPECT_FALSE(e.witness.has_value());
  // Oracle: enumerate the worst 5% of the four joint outcomes by hand.
  const double both = 0.04 * 0.04;
  const double one = 0.05 - both;
  EXPECT_NEAR(e.lhs, (both * 2e6 + one * 1e6) / 0.05, 1e-6);
  EXPECT_NEAR(e.rhs, 2 * 800000.0, 1e-6);
  EXPECT_THROW(replay(e), ArgumentError);
}

TEST(Loans, ThreeLoanEnumeration) {
  const DiscreteDistribution loan{{{0, 0.96}, {1e6, 0.04}}, Orientation::loss};
  const auto three = convolve(convolve(loan, loan), loan);
  // Binomial(3, 0.04) by enumeration of 8 default patterns.
  double p[4] = {0, 0, 0, 0};
  for (int mask = 0; mask < 8; ++mask) {
    int k = 0;
    double q = 1.0;
    for (int b = 0; b < 3; ++b) {
      const bool d = (mask >> b) & 1;
      k += d;
      q *= d ? 0.04 : 0.96;
    }
    p[k] += q;
  }
  ASSERT_EQ(three.atoms.size(), 4u);
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(three.atoms[k].p, p[k], 1e-16);
  EXPECT_NEAR(three.atoms[3].p, 6.4e-5, 1e-18);
  EXPECT_EQ(var(three, 0.95), 1e6);
}

TEST(Axioms, TranslationHomogeneityAndMonotonicity) {
  const TailSpec t{0.95, shapes::rising(0, 10, 1.0 - 0.95), Orientation::loss};
  for (const auto& m : {MeasureSpec::var(0.95), MeasureSpec::es(0.99), MeasureSpec::ml()}) {
    EXPECT_EQ(check_axiom(m, t, Translation{3.5}).verdict, Verdict::holds_on_cases);
    EXPECT_EQ(check_axiom(m, t, Homogeneity{2.0}).verdict, Verdict::holds_on_cases);
    EXPECT_EQ(check_axiom(m, t, Homogeneity{0.0}).verdict, Verdict::holds_on_cases);
  }
  EXPECT_THROW(check_axiom(MeasureSpec::ml(), t, Homogeneity{-1.0}), ArgumentError);
  EXPECT_THROW(check_axiom(MeasureSpec::ml(), t, Monotonicity{}), ArgumentError);
  const DiscreteDistribution gains{{{-5, 0.5}, {-1, 0.5}}, Orientation::loss};
  const auto r = check_axiom(MeasureSpec::es(0.95), gains, Monotonicity{});
  EXPECT_EQ(r.verdict, Verdict::holds_on_cases);
  EXPECT_EQ(r.lhs, -1.0);
}

TEST(Axioms, ToleranceIsRelativeWithAFloor) {
  EXPECT_TRUE(nearly_equal(1e12, 1e12 + 1.0));
  EXPECT_FALSE(nearly_equal(1.0, 1.0 + 2e-9));
  EXPECT_TRUE(nearly_equal(0.0, 5e-10));
}

TEST(Joint, ValidationAndIndependentProduct) {
  EXPECT_FALSE(validate(JointDiscrete{}).empty());
  EXPECT_FALSE(validate(JointDiscrete{{{0, 0, 0.5}}}).empty());
  EXPECT_THROW(check_subadditivity(MeasureSpec::ml(), JointDiscrete{{{0, 0, 0.5}}}), ValidationError);
  const DiscreteDistribution a{{{0, 0.5}, {1, 0.5}}, Orientation::loss};
  const auto j = independent_joint(a, a);
  EXPECT_EQ(j.outcomes.size(), 4u);
  EXPECT_EQ(marginal1(j), a);
}

TEST(Properties, EsIsSubadditiveOnRandomJoints) {
  gen::Gen g(21);
  for (int i = 0; i < 500; ++i) {
    const auto j = gen::random_joint(g);
    for (double l : {0.8, 0.9, 0.95, 0.99}) {
      const auto r = check_subadditivity(MeasureSpec::es(l), j);
      EXPECT_EQ(r.verdict, Verdict::holds_on_cases) << r.lhs << " > " << r.rhs;
    }
    EXPECT_EQ(check_subadditivity(MeasureSpec::ml(), j).verdict, Verdict::holds_on_cases);
  }
}

TEST(Properties, VarViolationsReplayExactly) {
  gen::Gen g(22);
  int found = 0;
  for (int i = 0; i < 500; ++i) {
    const auto r = check_subadditivity(MeasureSpec::var(0.9), gen::random_joint(g));
    if (r.verdict != Verdict::violated) continue;
    ++found;
    ASSERT_TRUE(r.witness && r.witness->joint);
    const auto [lhs, rhs] = replay(r);
    EXPECT_EQ(lhs, r.lhs);
    EXPECT_EQ(rhs, r.rhs);
    EXPECT_EQ(r.witness->rho_first + r.witness->rho_second, r.rhs);
  }
  EXPECT_GT(found, 0);
}
