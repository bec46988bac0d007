#include <gtest/gtest.h>

#include <numeric>

#include "riskscope/riskscope.hpp"

using namespace riskscope;

TEST(Sampling, FallingRampCdfAtMidpoint) {
  const PiecewiseLinearDensity falling{{{0, 0.1}, {20, 0}}, Orientation::loss};
  const std::size_t n = 200000;
  const auto s = sample(falling, n, 5).losses;
  const double hits = static_cast<double>(std::count_if(s.begin(), s.end(), [](double x) { return x <= 10; }));
  const double se = std::sqrt(0.75 * 0.25 / n);
  EXPECT_NEAR(hits / n, 0.75, 4 * se);
  EXPECT_NEAR(cdf(falling, 10.0), 0.75, 1e-15);
}

TEST(Sampling, RisingRampMeanAndVariance) {
  const PiecewiseLinearDensity rising{{{0, 0}, {10, 0.2}}, Orientation::loss};
  const std::size_t n = 200000;
  const auto s = sample(rising, n, 6).losses;
  const double m = std::accumulate(s.begin(), s.end(), 0.0) / n;
  double v = 0.0;
  for (double x : s) v += (x - m) * (x - m);
  v /= n - 1;
  EXPECT_NEAR(m, 20.0 / 3.0, 4 * std::sqrt(50.0 / 9.0 / n));
  EXPECT_NEAR(v, 50.0 / 9.0, 0.05);
  EXPECT_NEAR(mean(rising), 20.0 / 3.0, 1e-12);
}

TEST(Sampling, DiscreteFrequencies) {
  const DiscreteDistribution d{{{0, 0.9216}, {1e6, 0.0768}, {2e6, 0.0016}}, Orientation::loss};
  const std::size_t n = 400000;
  const auto s = sample(d, n, 8).losses;
  const double top = static_cast<double>(std::count(s.begin(), s.end(), 2e6)) / n;
  EXPECT_NEAR(top, 0.0016, 4 * std::sqrt(0.0016 * 0.9984 / n));
}

TEST(Sampling, ChunkedStreamsAreStable) {
  const PiecewiseLinearDensity u{{{0, 0.1}, {10, 0.1}}, Orientation::loss};
  const auto small = sample(u, kSampleChunk, 77).losses;
  const auto large = sample(u, 3 * kSampleChunk + 11, 77).losses;
  EXPECT_TRUE(std::equal(small.begin(), small.end(), large.begin()));
  EXPECT_EQ(sample(u, 1000, 77).losses, sample(u, 1000, 77).losses);
  EXPECT_NE(sample(u, 1000, 78).losses, sample(u, 1000, 77).losses);
  EXPECT_THROW(sample(u, 0, 1), ArgumentError);
  EXPECT_THROW(sample(TailSpec{0.95, shapes::uniform(0, 1, 1.0 - 0.95), Orientation::loss}, 10, 1), ArgumentError);
}

TEST(MonteCarlo, ClosedFormsWithinThreeStandardErrors) {
  const PiecewiseLinearDensity rising{{{0, 0}, {10, 0.2}}, Orientation::loss};
  const auto specs = std::vector<MeasureSpec>{MeasureSpec::var(0.95), MeasureSpec::es(0.95), MeasureSpec::var(0.99),
                                              MeasureSpec::es(0.99)};
  const auto mc = mc_estimate_vector(rising, specs, 1'000'000, 7);
  const auto exact = evaluate_vector(rising, specs);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    EXPECT_GT(mc[i].standard_error, 0.0);
    EXPECT_LE(std::abs(mc[i].value - exact.entries[i].value), 3 * mc[i].standard_error) << to_string(specs[i]);
  }
}

TEST(MonteCarlo, LiftedTailAgreesWithTheTailForm) {
  const TailSpec t{0.95, shapes::rising(0, 15, 1.0 - 0.95), Orientation::loss};
  const auto e = mc_estimate(t, MeasureSpec::es(0.95), 1'000'000, 11);
  EXPECT_LE(std::abs(e.value - 10.0), 3 * e.standard_error);
  EXPECT_THROW(mc_estimate(t, MeasureSpec::var(0.9), 1000, 1), UndefinedMeasureError);
}

TEST(MonteCarlo, EmpiricalEstimatorsOnAKnownSample) {
  EmpiricalSample s;
  for (int i = 1; i <= 1000; ++i) s.losses.push_back(i);
  const auto v = mc_estimate(s, MeasureSpec::var(0.95), 1000, 3);
  // Resampling 1..1000: the 950th order statistic sits near 950.
  EXPECT_NEAR(v.value, 950.0, 30.0);
  EXPECT_EQ(var(s, 0.95), 950.0);
  EXPECT_NEAR(es(s, 0.95), 975.5, 1e-9);
}
