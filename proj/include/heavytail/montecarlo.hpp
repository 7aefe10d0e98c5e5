#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "heavytail/dist.hpp"

namespace heavytail {

enum class Hypothesis { H0, H1, Unknown };

std::string to_string(Hypothesis h);
Hypothesis parse_hypothesis(const std::string& text);

/// A grid of Monte Carlo cells over (m, n, q) for one distribution.
struct ExperimentSpec {
  dist::DistributionSpec distribution;
  std::vector<std::size_t> m_values;
  std::vector<std::size_t> n_values;
  std::vector<double> q_values;
  std::size_t scenarios = 2000;
  std::uint64_t master_seed = 0;
  Hypothesis hypothesis = Hypothesis::Unknown;

  /// Throws BadConfig for empty grids, n < 2, q outside (0,1), n > m, or
  /// scenarios == 0. Never samples.
  void validate() const;
};

/// Parses a JSON experiment description:
///   {"dist": "alpha-stable:1.2", "m": [100000], "n": [10, 100], "q": [0.05, 0.1],
///    "scenarios": 2000, "seed": 7, "hypothesis": "H1"}
/// Scalars are accepted where lists are expected. Throws ParseError on bad
/// JSON or unknown keys; the result is validated.
ExperimentSpec parse_experiment_spec(std::string_view json_text);

struct RunOptions {
  unsigned workers = 1;
};

struct CellResult {
  std::size_t m = 0;
  std::size_t n = 0;
  double q = 0.0;
  std::size_t rejections = 0;
  std::size_t scenarios = 0;
  /// Scenarios whose statistic could not be computed (degenerate data).
  std::size_t failures = 0;
  double err = 0.0;
  double type2 = 1.0;
  double mean_statistic = 0.0;
  double std_statistic = 0.0;
};

/// Statistic of every scenario for one (m, n) pair; NaN marks a failed scenario.
struct ScenarioStatistics {
  std::size_t m = 0;
  std::size_t n = 0;
  std::vector<double> values;
  std::size_t failures = 0;
};

/// Draws `scenarios` samples per m and evaluates the statistic for every n on
/// the same sample. Scenario s of the k-th m value uses the stream
/// (master_seed, k * scenarios + s). Output is independent of worker count.
std::vector<ScenarioStatistics> simulate_statistics(const ExperimentSpec& spec,
                                                    const RunOptions& options = {});

/// Rejection counts per (m, n, q), in that nesting order.
std::vector<CellResult> tabulate(const std::vector<ScenarioStatistics>& statistics,
                                 std::span<const double> q_values);

std::vector<CellResult> run_experiment(const ExperimentSpec& spec,
                                       const RunOptions& options = {});

/// Wilson score interval for err at the given confidence level.
std::pair<double, double> err_confidence_interval(const CellResult& cell, double level);

/// Writes the experiment report:
/// dist,param,m,n,q,scenarios,rejections,err,err_low,err_high,mean_stat,std_stat
void write_report_csv(std::ostream& out, const ExperimentSpec& spec,
                      std::span<const CellResult> cells, double level = 0.95);

/// Exponential model type2 ~ amplitude * exp(-rate * n), fitted by least
/// squares on log(type2).
struct DecayFit {
  double amplitude = 0.0;
  double rate = 0.0;
  double r_squared = 0.0;
  std::size_t points_used = 0;
  std::vector<std::string> warnings;
};

/// Cells with type2 outside (0, 1) are skipped with a warning; throws
/// FitError when fewer than three remain.
DecayFit type2_decay_fit(std::span<const CellResult> cells);

struct HistogramExport {
  std::vector<double> bin_edges;
  std::vector<std::size_t> counts;
  double ks_distance = 0.0;
  /// Name of the reference density the histogram is meant to be compared with.
  std::string reference = "standard normal density";
};

/// Kolmogorov-Smirnov distance between the empirical law of `values` and N(0,1).
double ks_distance_standard_normal(std::span<const double> values);

/// Equal-width histogram over [min, max] of the finite values.
HistogramExport make_histogram(std::span<const double> values, std::size_t bins);

/// Runs the single (m, n) cell described by `cell` (first m and n are used)
/// and histograms sqrt(n)/sigma_pi * (statistic - 2/pi). Requires >= 100 scenarios.
HistogramExport export_standardized_histogram(const ExperimentSpec& cell, std::size_t bins,
                                              const RunOptions& options = {});

/// bin_left,bin_right,count
void write_histogram_csv(std::ostream& out, const HistogramExport& histogram);

/// max(0, 1 - c / n^(2/alpha - 1)), a heuristic lower bound on the power
/// against a symmetric alpha-stable alternative, 1 < alpha < 2.
double heuristic_power_bound(double alpha, double q, double n, double c_constant);

/// Smallest n for which heuristic_power_bound reaches `target`.
double heuristic_blocks_for_power(double alpha, double c_constant, double target);

}  // namespace heavytail
