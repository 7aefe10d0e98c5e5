#pragma once

#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>

#include "heavytail/statistic.hpp"

namespace heavytail {

/// Probability limit of the statistic when X is in the Gaussian domain of attraction.
inline constexpr double kTwoOverPi = 2.0 / std::numbers::pi;

/// Asymptotic variance of sqrt(n) * (statistic - 2/pi) under the null.
inline constexpr double kSigmaPiSq =
    1.0 + 4.0 / std::numbers::pi - 20.0 / (std::numbers::pi * std::numbers::pi);

/// Limit covariance of sqrt(n) * (bivariation - 2/pi, quadratic variation - 1)
/// for Brownian increments. The delta method applied to their ratio gives
/// sigma11 - (4/pi) sigma12 + (4/pi^2) sigma22 = kSigmaPiSq.
struct CovarianceConstants {
  static constexpr double sigma11 =
      1.0 + 4.0 / std::numbers::pi - 12.0 / (std::numbers::pi * std::numbers::pi);
  static constexpr double sigma12 = 4.0 / std::numbers::pi;
  static constexpr double sigma22 = 2.0;

  static constexpr double ratio_variance() {
    return sigma11 - (4.0 / std::numbers::pi) * sigma12 +
           (4.0 / (std::numbers::pi * std::numbers::pi)) * sigma22;
  }
};

double sigma_pi();

struct TestConfig {
  std::size_t n = 100;
  double q = 0.05;

  /// Throws BadConfig unless n >= 2 and 0 < q < 1.
  void validate() const;
};

struct TestResult {
  double statistic = 0.0;
  double z_score = 0.0;
  double p_value = 1.0;
  bool reject = false;
  double kappa_target = kTwoOverPi;
  double sigma_pi_sq = kSigmaPiSq;
  std::size_t n = 0;
  std::size_t m = 0;
  double q = 0.0;
  /// Set when n > sqrt(m): too many blocks for the sample size.
  bool blocks_exceed_sqrt_m = false;

  /// {"statistic":..,"z":..,"p":..,"reject":..,"n":..,"m":..,"q":..} on one line.
  std::string to_json() const;
  /// Human-readable verdict.
  std::string verdict() const;
};

/// sqrt(n) * (statistic - 2/pi) / sigma_pi.
double standardize(double statistic, std::size_t n);

/// [2/pi - h, 2/pi + h] with h = z_{1-q/2} sigma_pi / sqrt(n); outside is the rejection region.
std::pair<double, double> critical_band(std::size_t n, double q);

/// Applies the decision rule to an already computed statistic.
TestResult evaluate(const StatisticValue& statistic, double q);

/// Blocks the sample, computes the statistic and applies the decision rule.
/// Propagates InsufficientSample and DegenerateSample.
TestResult run_test(std::span<const double> sample, const TestConfig& config);

}  // namespace heavytail
