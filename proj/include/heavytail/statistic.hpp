#pragma once

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace heavytail {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x))
      correction_ += (sum_ - t) + x;
    else
      correction_ += (x - t) + sum_;
    sum_ = t;
  }

  double value() const noexcept { return sum_ + correction_; }

 private:
  double sum_ = 0.0;
  double correction_ = 0.0;
};

/// Per-block sums of a sample cut at the indices floor(m*i/n), i = 0..n.
/// This is the sufficient statistic for the normalized bivariation.
struct BlockSummary {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<double> block_sums;
  std::vector<std::size_t> block_counts;
  double total_sum = 0.0;

  double mean() const noexcept { return total_sum / static_cast<double>(m); }
};

/// floor(m * i / n) without overflowing for m, n < 2^32.
std::size_t block_boundary(std::size_t m, std::size_t n, std::size_t i) noexcept;

/// Incremental construction of a BlockSummary for a sample of known length m.
/// Holds exactly n block accumulators; chunks may be of any size.
class BlockAccumulator {
 public:
  /// Throws BadConfig if n < 2 and InsufficientSample if m < n.
  BlockAccumulator(std::size_t n, std::size_t m);

  void feed(std::span<const double> chunk);

  std::size_t consumed() const noexcept { return consumed_; }
  bool complete() const noexcept { return consumed_ == m_; }

  /// Throws InsufficientSample unless exactly m values were fed.
  BlockSummary summary() const;

 private:
  std::size_t n_;
  std::size_t m_;
  std::size_t consumed_ = 0;
  std::size_t block_ = 0;
  std::size_t block_end_;
  std::vector<double> sums_;
  CompensatedSum current_;
  CompensatedSum total_;
};

struct StatisticValue {
  double value = 0.0;
  std::size_t n = 0;
  std::size_t m = 0;
};

/// Values Z(i/n), i = 0..n, of the bridge built from the partial sums.
struct BridgePath {
  std::vector<double> grid;
  std::vector<double> values;
  double normalizer = 1.0;
  std::size_t m = 0;  // length of the underlying sample
};

/// One pass over the sample; O(n) memory.
BlockSummary summarize_blocks(std::span<const double> sample, std::size_t n);

/// sum_{i<n} |D_i||D_{i+1}| / sum_i D_i^2 with D_i = B_i - count_i * mean.
/// Throws DegenerateSample when the denominator is zero or not finite.
StatisticValue compute_statistic(const BlockSummary& summary);

/// Same ratio with D_i = B_i (no centering).
StatisticValue compute_uncentered_statistic(const BlockSummary& summary);

StatisticValue uncentered_statistic(std::span<const double> sample, std::size_t n);

/// Bridge of the partial sums, values[i] = (S_k - (k/m) S_m) / normalizer with
/// k = floor(m i / n). Equal to (S_k - (i/n) S_m) / normalizer whenever n | m.
BridgePath build_bridge_path(std::span<const double> sample, std::size_t n,
                             double normalizer);

/// Normalized bivariation of the path increments.
StatisticValue statistic_from_path(const BridgePath& path);

/// CSV with header `t,z`, one row per grid point.
void write_path_csv(std::ostream& out, const BridgePath& path);

}  // namespace heavytail
