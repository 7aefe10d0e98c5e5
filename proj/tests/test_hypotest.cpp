#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <boost/math/distributions/normal.hpp>
#include <nlohmann/json.hpp>

#include "heavytail/dist.hpp"
#include "heavytail/errors.hpp"
#include "heavytail/hypotest.hpp"

using namespace heavytail;

TEST(Constants, FormulaValues) {
  const long double pi = 3.141592653589793238462643383279502884L;
  EXPECT_NEAR(kTwoOverPi, static_cast<double>(2.0L / pi), 1e-15);
  EXPECT_NEAR(kTwoOverPi, 0.6366197723, 1e-10);
  EXPECT_NEAR(kSigmaPiSq, static_cast<double>(1.0L + 4.0L / pi - 20.0L / (pi * pi)), 1e-15);
  // 30-digit evaluation: 0.246815871888407257273480842786
  EXPECT_NEAR(kSigmaPiSq, 0.2468158718884073, 1e-12);
  EXPECT_NEAR(sigma_pi(), 0.4968056681323264, 1e-12);
}

TEST(Constants, CovarianceIdentity) {
  EXPECT_NEAR(CovarianceConstants::ratio_variance(), kSigmaPiSq, 1e-12);
  EXPECT_NEAR(CovarianceConstants::sigma12, 4.0 / std::numbers::pi, 0.0);
  EXPECT_EQ(CovarianceConstants::sigma22, 2.0);
}

TEST(Constants, CovarianceMatchesGaussianIncrements) {
  // Empirical long-run covariance of (|G_i||G_{i+1}| - 2/pi, G_i^2 - 1) over
  // 1-dependent lags, from 4e6 standard normal draws.
  const auto g = dist::sample_standard_normal({2718, 0}, 4000000).values;
  const std::size_t count = g.size() - 2;
  double s11 = 0.0;
  double s12 = 0.0;
  double s22 = 0.0;
  for (std::size_t i = 1; i < count; ++i) {
    const double a0 = std::abs(g[i - 1]) * std::abs(g[i]) - kTwoOverPi;
    const double a1 = std::abs(g[i]) * std::abs(g[i + 1]) - kTwoOverPi;
    const double b0 = g[i - 1] * g[i - 1] - 1.0;
    const double b1 = g[i] * g[i] - 1.0;
    const double b2 = g[i + 1] * g[i + 1] - 1.0;
    s11 += a1 * a1 + 2.0 * a0 * a1;
    s12 += a0 * b0 + a0 * b1 + a1 * b0;  // E[(bv_1)(q_1)] + E[(bv_1)(q_2)] + E[(bv_2)(q_1)]
    s22 += b1 * b1 + 2.0 * b1 * b2;
  }
  const double total = static_cast<double>(count - 1);
  EXPECT_NEAR(s11 / total, CovarianceConstants::sigma11, 0.02);
  EXPECT_NEAR(s12 / total, CovarianceConstants::sigma12, 0.03);
  EXPECT_NEAR(s22 / total, CovarianceConstants::sigma22, 0.05);
}

TEST(Evaluate, HandCaseDoesNotReject) {
  const auto r = evaluate({0.5, 2, 4}, 0.05);
  EXPECT_NEAR(r.z_score, std::sqrt(2.0) * (0.5 - 0.636620) / 0.496806, 1e-5);
  EXPECT_NEAR(r.z_score, -0.3889, 1e-4);
  EXPECT_FALSE(r.reject);
  EXPECT_EQ(r.kappa_target, kTwoOverPi);
  EXPECT_EQ(r.sigma_pi_sq, kSigmaPiSq);
}

TEST(Evaluate, CenterOfRegion) {
  for (std::size_t n : {2u, 10u, 10000u})
    for (double q : {0.01, 0.5, 0.99}) {
      const auto r = evaluate({kTwoOverPi, n, n}, q);
      EXPECT_EQ(r.z_score, 0.0);
      EXPECT_EQ(r.p_value, 1.0);
      EXPECT_FALSE(r.reject);
    }
}

TEST(Evaluate, ZeroStatisticRejects) {
  const auto r = evaluate({0.0, 400, 100000}, 0.05);
  EXPECT_NEAR(r.z_score, -20.0 * 0.636620 / 0.496806, 1e-2);
  EXPECT_NEAR(r.z_score, -25.63, 0.01);
  EXPECT_TRUE(r.reject);
  EXPECT_LT(r.p_value, 1e-100);
}

TEST(Evaluate, DecisionConsistencyProperty) {
  const boost::math::normal reference;
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> stat(0.0, 1.0);
  std::uniform_real_distribution<double> level(0.001, 0.999);
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t n = 2 + gen() % 100000;
    const double s = stat(gen);
    const double q = level(gen);
    const auto r = evaluate({s, n, n}, q);

    const double z = std::sqrt(static_cast<double>(n)) * (s - 2.0 / std::numbers::pi) /
                     std::sqrt(1.0 + 4.0 / std::numbers::pi - 20.0 / std::pow(std::numbers::pi, 2));
    const double p = 2.0 * boost::math::cdf(complement(reference, std::abs(z)));
    const bool by_quantile = std::abs(z) > boost::math::quantile(reference, 1.0 - q / 2.0);
    ASSERT_EQ(r.reject, by_quantile) << s << " " << n << " " << q;
    ASSERT_EQ(r.reject, p < q) << s << " " << n << " " << q;
    ASSERT_EQ(r.reject, r.p_value < q);
    ASSERT_NEAR(r.p_value, p, 1e-9);
  }
}

TEST(Evaluate, RejectMonotoneInN) {
  for (double s : {0.2, 0.6, 0.62, 0.65, 0.7, 0.9}) {
    bool previous = false;
    for (std::size_t n = 2; n < 20000; n += 7) {
      const bool reject = evaluate({s, n, n * n}, 0.05).reject;
      ASSERT_TRUE(reject || !previous) << s << " " << n;
      previous = reject;
    }
  }
}

TEST(Evaluate, FlagsTooManyBlocks) {
  EXPECT_FALSE(evaluate({0.6, 100, 10000}, 0.05).blocks_exceed_sqrt_m);
  EXPECT_TRUE(evaluate({0.6, 101, 10000}, 0.05).blocks_exceed_sqrt_m);
}

TEST(Evaluate, RejectsBadConfig) {
  EXPECT_THROW(evaluate({0.5, 1, 4}, 0.05), BadConfig);
  EXPECT_THROW(evaluate({0.5, 2, 4}, 0.0), BadConfig);
  EXPECT_THROW(evaluate({0.5, 2, 4}, 1.0), BadConfig);
}

TEST(CriticalBand, HalfWidth) {
  const auto [lo, hi] = critical_band(100, 0.05);
  EXPECT_NEAR((hi - lo) / 2.0, 1.959964 * 0.496806 / 10.0, 1e-6);
  EXPECT_NEAR((hi - lo) / 2.0, 0.09737, 1e-5);
  EXPECT_LT(lo, kTwoOverPi);
  EXPECT_GT(hi, kTwoOverPi);
}

TEST(CriticalBand, ShrinksWithN) {
  const auto [lo, hi] = critical_band(100000000, 0.05);
  EXPECT_NEAR(lo, kTwoOverPi, 1e-3);
  EXPECT_NEAR(hi, kTwoOverPi, 1e-3);
}

TEST(CriticalBand, LargerLevelIsNarrower) {
  const auto wide = critical_band(500, 0.05);
  const auto narrow = critical_band(500, 0.1);
  EXPECT_GT(narrow.first, wide.first);
  EXPECT_LT(narrow.second, wide.second);
}

TEST(CriticalBand, AgreesWithDecision) {
  const auto [lo, hi] = critical_band(250, 0.1);
  EXPECT_TRUE(evaluate({lo - 1e-9, 250, 250}, 0.1).reject);
  EXPECT_FALSE(evaluate({lo + 1e-9, 250, 250}, 0.1).reject);
  EXPECT_FALSE(evaluate({hi - 1e-9, 250, 250}, 0.1).reject);
  EXPECT_TRUE(evaluate({hi + 1e-9, 250, 250}, 0.1).reject);
}

TEST(CriticalBand, DomainErrors) {
  EXPECT_THROW(critical_band(1, 0.05), BadConfig);
  EXPECT_THROW(critical_band(10, 0.0), BadConfig);
  EXPECT_THROW(critical_band(10, 1.5), BadConfig);
}

TEST(Standardize, UnitStep) {
  EXPECT_EQ(standardize(kTwoOverPi, 50), 0.0);
  EXPECT_NEAR(standardize(kTwoOverPi + sigma_pi() / std::sqrt(50.0), 50), 1.0, 1e-12);
  EXPECT_NEAR(standardize(0.5, 2), -0.3889, 1e-4);
  EXPECT_THROW(standardize(0.5, 1), BadConfig);
}

TEST(RunTest, HandSample) {
  const std::vector<double> x{1, 2, 3, 4};
  const auto r = run_test(x, {2, 0.05});
  EXPECT_EQ(r.statistic, 0.5);
  EXPECT_EQ(r.m, 4u);
  EXPECT_FALSE(r.reject);
  EXPECT_TRUE(r.blocks_exceed_sqrt_m == false);
}

TEST(RunTest, PropagatesErrors) {
  const std::vector<double> constant(10, 2.0);
  EXPECT_THROW(run_test(constant, {2, 0.05}), DegenerateSample);
  EXPECT_THROW(run_test(constant, {20, 0.05}), InsufficientSample);
  EXPECT_THROW(run_test(constant, {2, 2.0}), BadConfig);
}

TEST(RunTest, JsonRecord) {
  const std::vector<double> x{1, 2, 3, 4};
  const auto text = run_test(x, {2, 0.05}).to_json();
  EXPECT_EQ(text.find('\n'), std::string::npos);
  const auto j = nlohmann::json::parse(text);
  EXPECT_EQ(j.at("statistic").get<double>(), 0.5);
  EXPECT_FALSE(j.at("reject").get<bool>());
  EXPECT_EQ(j.at("n").get<int>(), 2);
  EXPECT_EQ(j.at("m").get<int>(), 4);
  EXPECT_EQ(j.at("q").get<double>(), 0.05);
  EXPECT_TRUE(j.contains("z"));
  EXPECT_TRUE(j.contains("p"));
  EXPECT_EQ(text.rfind("{\"statistic\":", 0), 0u);
}

TEST(RunTest, VerdictMentionsInfiniteSecondMoment) {
  const auto r = evaluate({0.0, 400, 100000}, 0.05);
  EXPECT_NE(r.verdict().find("second moment is infinite"), std::string::npos);
}

TEST(RunTest, CalibrationUnderNull) {
  constexpr int kScenarios = 2000;
  int rejections = 0;
  for (int s = 0; s < kScenarios; ++s) {
    const auto x =
        dist::sample_standard_normal({808, static_cast<std::uint64_t>(s)}, 100000).values;
    if (run_test(x, {100, 0.05}).reject) ++rejections;
  }
  const double err = rejections / static_cast<double>(kScenarios);
  EXPECT_GE(err, 0.03);
  EXPECT_LE(err, 0.08);
}
