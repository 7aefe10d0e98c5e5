#include "heavytail/statistic.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "heavytail/dist.hpp"
#include "heavytail/errors.hpp"

namespace heavytail {

namespace {

void check_shape(std::size_t n, std::size_t m) {
  if (n < 2) throw BadConfig("number of blocks n must be >= 2, got " + std::to_string(n));
  if (m < n)
    throw InsufficientSample("sample of length " + std::to_string(m) +
                             " is shorter than n = " + std::to_string(n));
}

// Ratio of the realized bivariation to the realized quadratic variation.
double bivariation_ratio(std::span<const double> increments) {
  CompensatedSum numerator;
  CompensatedSum denominator;
  for (std::size_t i = 0; i < increments.size(); ++i) {
    denominator.add(increments[i] * increments[i]);
    if (i + 1 < increments.size())
      numerator.add(std::fabs(increments[i]) * std::fabs(increments[i + 1]));
  }
  const double den = denominator.value();
  if (!(den > 0.0) || !std::isfinite(den))
    throw DegenerateSample(den == 0.0
                               ? "all centered block sums vanish (constant sample?)"
                               : "quadratic variation is not finite");
  return std::clamp(numerator.value() / den, 0.0, 1.0);
}

StatisticValue ratio_from_summary(const BlockSummary& s, bool centered) {
  check_shape(s.n, s.m);
  if (s.block_sums.size() != s.n || s.block_counts.size() != s.n)
    throw BadConfig("block summary has inconsistent sizes");
  const double mean = centered ? s.mean() : 0.0;
  std::vector<double> deviations(s.n);
  for (std::size_t i = 0; i < s.n; ++i)
    deviations[i] = s.block_sums[i] - static_cast<double>(s.block_counts[i]) * mean;
  return {bivariation_ratio(deviations), s.n, s.m};
}

}  // namespace

std::size_t block_boundary(std::size_t m, std::size_t n, std::size_t i) noexcept {
  return (m / n) * i + ((m % n) * i) / n;
}

BlockAccumulator::BlockAccumulator(std::size_t n, std::size_t m) : n_(n), m_(m) {
  check_shape(n, m);
  sums_.reserve(n);
  block_end_ = block_boundary(m_, n_, 1);
}

void BlockAccumulator::feed(std::span<const double> chunk) {
  if (chunk.size() > m_ - consumed_)
    throw BadConfig("fed more than m = " + std::to_string(m_) + " values");
  std::size_t pos = 0;
  while (pos < chunk.size()) {
    const std::size_t take = std::min(chunk.size() - pos, block_end_ - consumed_);
    for (std::size_t j = pos; j < pos + take; ++j) {
      current_.add(chunk[j]);
      total_.add(chunk[j]);
    }
    pos += take;
    consumed_ += take;
    if (consumed_ == block_end_) {
      sums_.push_back(current_.value());
      current_ = {};
      ++block_;
      if (block_ < n_) block_end_ = block_boundary(m_, n_, block_ + 1);
    }
  }
}

BlockSummary BlockAccumulator::summary() const {
  if (!complete())
    throw InsufficientSample("accumulator received " + std::to_string(consumed_) + " of " +
                             std::to_string(m_) + " values");
  BlockSummary s;
  s.n = n_;
  s.m = m_;
  s.block_sums = sums_;
  s.block_counts.resize(n_);
  for (std::size_t i = 0; i < n_; ++i)
    s.block_counts[i] = block_boundary(m_, n_, i + 1) - block_boundary(m_, n_, i);
  s.total_sum = total_.value();
  return s;
}

BlockSummary summarize_blocks(std::span<const double> sample, std::size_t n) {
  BlockAccumulator acc(n, sample.size());
  acc.feed(sample);
  return acc.summary();
}

StatisticValue compute_statistic(const BlockSummary& summary) {
  return ratio_from_summary(summary, true);
}

StatisticValue compute_uncentered_statistic(const BlockSummary& summary) {
  return ratio_from_summary(summary, false);
}

StatisticValue uncentered_statistic(std::span<const double> sample, std::size_t n) {
  return compute_uncentered_statistic(summarize_blocks(sample, n));
}

BridgePath build_bridge_path(std::span<const double> sample, std::size_t n,
                             double normalizer) {
  const std::size_t m = sample.size();
  check_shape(n, m);
  if (!(normalizer > 0.0) || !std::isfinite(normalizer))
    throw BadConfig("path normalizer must be > 0");

  // Prefix sums at the block boundaries.
  std::vector<double> partial(n + 1, 0.0);
  CompensatedSum running;
  std::size_t j = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    const std::size_t end = block_boundary(m, n, i);
    for (; j < end; ++j) running.add(sample[j]);
    partial[i] = running.value();
  }
  const double total = partial[n];

  BridgePath path;
  path.normalizer = normalizer;
  path.m = m;
  path.grid.resize(n + 1);
  path.values.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const std::size_t k = block_boundary(m, n, i);
    path.grid[i] = static_cast<double>(i) / static_cast<double>(n);
    path.values[i] =
        (partial[i] - total * static_cast<double>(k) / static_cast<double>(m)) / normalizer;
  }
  path.values[0] = 0.0;
  path.values[n] = 0.0;
  return path;
}

StatisticValue statistic_from_path(const BridgePath& path) {
  if (path.values.size() < 3) throw BadConfig("path needs at least 3 grid points");
  std::vector<double> increments(path.values.size() - 1);
  for (std::size_t i = 0; i + 1 < path.values.size(); ++i)
    increments[i] = path.values[i + 1] - path.values[i];
  return {bivariation_ratio(increments), increments.size(), path.m};
}

void write_path_csv(std::ostream& out, const BridgePath& path) {
  out << "t,z\n";
  for (std::size_t i = 0; i < path.values.size(); ++i)
    out << format_real(path.grid[i]) << ',' << format_real(path.values[i]) << '\n';
}

}  // namespace heavytail
