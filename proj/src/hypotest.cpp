#include "heavytail/hypotest.hpp"

#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "heavytail/dist.hpp"
#include "heavytail/errors.hpp"

namespace heavytail {

double sigma_pi() {
  static const double value = std::sqrt(kSigmaPiSq);
  return value;
}

void TestConfig::validate() const {
  if (n < 2) throw BadConfig("number of blocks n must be >= 2, got " + std::to_string(n));
  if (!(q > 0.0 && q < 1.0))
    throw BadConfig("significance level q must lie in (0, 1), got " + format_real(q));
}

double standardize(double statistic, std::size_t n) {
  if (n < 2) throw BadConfig("number of blocks n must be >= 2");
  return std::sqrt(static_cast<double>(n)) * (statistic - kTwoOverPi) / sigma_pi();
}

std::pair<double, double> critical_band(std::size_t n, double q) {
  TestConfig{n, q}.validate();
  const double half = normal_quantile(1.0 - q / 2.0) * sigma_pi() /
                      std::sqrt(static_cast<double>(n));
  return {kTwoOverPi - half, kTwoOverPi + half};
}

TestResult evaluate(const StatisticValue& statistic, double q) {
  TestConfig{statistic.n, q}.validate();
  TestResult r;
  r.statistic = statistic.value;
  r.n = statistic.n;
  r.m = statistic.m;
  r.q = q;
  r.z_score = standardize(statistic.value, statistic.n);
  r.p_value = std::erfc(std::fabs(r.z_score) / std::numbers::sqrt2);
  r.reject = std::fabs(r.z_score) > normal_quantile(1.0 - q / 2.0);
  r.blocks_exceed_sqrt_m =
      static_cast<double>(r.n) > std::sqrt(static_cast<double>(r.m));
  return r;
}

TestResult run_test(std::span<const double> sample, const TestConfig& config) {
  config.validate();
  return evaluate(compute_statistic(summarize_blocks(sample, config.n)), config.q);
}

std::string TestResult::to_json() const {
  nlohmann::ordered_json j;
  j["statistic"] = statistic;
  j["z"] = z_score;
  j["p"] = p_value;
  j["reject"] = reject;
  j["n"] = n;
  j["m"] = m;
  j["q"] = q;
  return j.dump();
}

std::string TestResult::verdict() const {
  if (reject)
    return "reject H0: X is not in the Gaussian domain of attraction; "
           "its second moment is infinite";
  return "do not reject H0: data consistent with the Gaussian domain of attraction";
}

}  // namespace heavytail
