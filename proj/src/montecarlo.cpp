#include "heavytail/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "heavytail/errors.hpp"
#include "heavytail/hypotest.hpp"
#include "heavytail/statistic.hpp"

namespace heavytail {

namespace {

constexpr std::size_t kChunk = 4096;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Runs body(i) for i in [0, count) on `workers` threads. Each index is
// processed exactly once; the first exception is rethrown after joining.
template <class Body>
void parallel_for(std::size_t count, unsigned workers, Body&& body) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::string to_string(Hypothesis h) {
  switch (h) {
    case Hypothesis::H0: return "H0";
    case Hypothesis::H1: return "H1";
    case Hypothesis::Unknown: break;
  }
  return "unknown";
}

Hypothesis parse_hypothesis(const std::string& text) {
  if (text == "H0" || text == "h0") return Hypothesis::H0;
  if (text == "H1" || text == "h1") return Hypothesis::H1;
  if (text == "unknown" || text.empty()) return Hypothesis::Unknown;
  throw BadConfig("hypothesis label must be H0, H1 or unknown, got '" + text + "'");
}

void ExperimentSpec::validate() const {
  distribution.validate();
  if (m_values.empty() || n_values.empty() || q_values.empty())
    throw BadConfig("experiment grid needs at least one m, n and q");
  if (scenarios == 0) throw BadConfig("scenarios must be >= 1");
  for (double q : q_values) TestConfig{2, q}.validate();
  for (std::size_t n : n_values) {
    if (n < 2) throw BadConfig("number of blocks n must be >= 2, got " + std::to_string(n));
    for (std::size_t m : m_values)
      if (n > m)
        throw BadConfig("grid cell with n = " + std::to_string(n) + " > m = " +
                        std::to_string(m));
  }
}

std::vector<ScenarioStatistics> simulate_statistics(const ExperimentSpec& spec,
                                                    const RunOptions& options) {
  spec.validate();

  std::vector<double> file_values;
  if (const auto* file = std::get_if<dist::ExternalFile>(&spec.distribution.kind)) {
    file_values = read_sample_file(file->path).values;
    if (file_values.empty()) throw BadConfig("sample file '" + file->path + "' is empty");
  }

  const std::size_t n_count = spec.n_values.size();
  std::vector<ScenarioStatistics> out;
  for (std::size_t k = 0; k < spec.m_values.size(); ++k) {
    const std::size_t m = spec.m_values[k];
    // Row-major [scenario][n index]; each slot is written by exactly one task.
    std::vector<double> table(spec.scenarios * n_count, kNaN);

    parallel_for(spec.scenarios, options.workers, [&](std::size_t s) {
      const RngStream stream{spec.master_seed, k * spec.scenarios + s};
      auto source = file_values.empty() ? dist::make_source(spec.distribution, stream)
                                        : dist::make_replay(file_values);
      std::vector<BlockAccumulator> accumulators;
      accumulators.reserve(n_count);
      for (std::size_t n : spec.n_values) accumulators.emplace_back(n, m);

      std::vector<double> buffer(std::min(kChunk, m));
      for (std::size_t done = 0; done < m;) {
        const std::size_t take = std::min(buffer.size(), m - done);
        std::span<double> chunk(buffer.data(), take);
        source->fill(chunk);
        for (auto& acc : accumulators) acc.feed(chunk);
        done += take;
      }
      for (std::size_t j = 0; j < n_count; ++j) {
        try {
          table[s * n_count + j] = compute_statistic(accumulators[j].summary()).value;
        } catch (const DegenerateSample&) {
          // stays NaN, counted below
        }
      }
    });

    for (std::size_t j = 0; j < n_count; ++j) {
      ScenarioStatistics cell;
      cell.m = m;
      cell.n = spec.n_values[j];
      cell.values.resize(spec.scenarios);
      for (std::size_t s = 0; s < spec.scenarios; ++s) {
        cell.values[s] = table[s * n_count + j];
        if (std::isnan(cell.values[s])) ++cell.failures;
      }
      out.push_back(std::move(cell));
    }
  }
  return out;
}

std::vector<CellResult> tabulate(const std::vector<ScenarioStatistics>& statistics,
                                 std::span<const double> q_values) {
  std::vector<CellResult> cells;
  for (const auto& st : statistics) {
    // Welford in scenario order keeps the summary bit-stable.
    double mean = 0.0;
    double m2 = 0.0;
    std::size_t valid = 0;
    for (double v : st.values) {
      if (std::isnan(v)) continue;
      ++valid;
      const double delta = v - mean;
      mean += delta / static_cast<double>(valid);
      m2 += delta * (v - mean);
    }
    const double sd = valid > 1 ? std::sqrt(m2 / static_cast<double>(valid - 1)) : 0.0;

    for (double q : q_values) {
      CellResult cell;
      cell.m = st.m;
      cell.n = st.n;
      cell.q = q;
      cell.scenarios = st.values.size();
      cell.failures = st.failures;
      for (double v : st.values) {
        if (std::isnan(v)) continue;
        if (evaluate({v, st.n, st.m}, q).reject) ++cell.rejections;
      }
      cell.err = cell.scenarios == 0
                     ? 0.0
                     : static_cast<double>(cell.rejections) / static_cast<double>(cell.scenarios);
      cell.type2 = 1.0 - cell.err;
      cell.mean_statistic = valid > 0 ? mean : kNaN;
      cell.std_statistic = valid > 0 ? sd : kNaN;
      cells.push_back(cell);
    }
  }
  return cells;
}

std::vector<CellResult> run_experiment(const ExperimentSpec& spec, const RunOptions& options) {
  return tabulate(simulate_statistics(spec, options), spec.q_values);
}

std::pair<double, double> err_confidence_interval(const CellResult& cell, double level) {
  if (!(level > 0.0 && level < 1.0)) throw BadConfig("confidence level must lie in (0, 1)");
  if (cell.scenarios == 0) return {0.0, 1.0};
  const double total = static_cast<double>(cell.scenarios);
  const double p = static_cast<double>(cell.rejections) / total;
  const double z = normal_quantile(0.5 + level / 2.0);
  const double z2 = z * z;
  const double denom = 1.0 + z2 / total;
  const double center = (p + z2 / (2.0 * total)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / total + z2 / (4.0 * total * total));
  double low = std::max(0.0, center - half);
  double high = std::min(1.0, center + half);
  if (cell.rejections == 0) low = 0.0;
  if (cell.rejections == cell.scenarios) high = 1.0;
  return {low, high};
}

void write_report_csv(std::ostream& out, const ExperimentSpec& spec,
                      std::span<const CellResult> cells, double level) {
  out << "dist,param,m,n,q,scenarios,rejections,err,err_low,err_high,mean_stat,std_stat\n";
  const std::string family = spec.distribution.family();
  std::string params = spec.distribution.parameters();
  if (params.find_first_of(",\"\n") != std::string::npos) {
    std::string quoted = "\"";
    for (char c : params) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
    params = quoted + "\"";
  }
  for (const auto& c : cells) {
    const auto [low, high] = err_confidence_interval(c, level);
    out << family << ',' << params << ',' << c.m << ',' << c.n << ',' << format_real(c.q) << ','
        << c.scenarios << ',' << c.rejections << ',' << format_real(c.err) << ','
        << format_real(low) << ',' << format_real(high) << ',' << format_real(c.mean_statistic)
        << ',' << format_real(c.std_statistic) << '\n';
  }
}

DecayFit type2_decay_fit(std::span<const CellResult> cells) {
  DecayFit fit;
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& c : cells) {
    if (!(c.type2 > 0.0 && c.type2 < 1.0)) {
      fit.warnings.push_back("excluded n = " + std::to_string(c.n) + ": type II error " +
                             format_real(c.type2) + " has no finite logarithm or is 1");
      continue;
    }
    xs.push_back(static_cast<double>(c.n));
    ys.push_back(std::log(c.type2));
  }
  if (xs.size() < 3)
    throw FitError("decay fit needs at least 3 cells with type II error in (0, 1), got " +
                   std::to_string(xs.size()));

  const double count = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= count;
  my /= count;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0) throw FitError("decay fit needs at least two distinct n values");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;

  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (intercept + slope * xs[i]);
    ss_res += r * r;
  }
  fit.amplitude = std::exp(intercept);
  fit.rate = -slope;
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  fit.points_used = xs.size();
  return fit;
}

double ks_distance_standard_normal(std::span<const double> values) {
  std::vector<double> sorted;
  sorted.reserve(values.size());
  for (double v : values)
    if (!std::isnan(v)) sorted.push_back(v);
  if (sorted.empty()) throw BadConfig("KS distance of an empty sample");
  std::sort(sorted.begin(), sorted.end());
  const double total = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = normal_cdf(sorted[i]);
    d = std::max({d, static_cast<double>(i + 1) / total - f, f - static_cast<double>(i) / total});
  }
  return d;
}

HistogramExport make_histogram(std::span<const double> values, std::size_t bins) {
  if (bins == 0) throw BadConfig("histogram needs at least one bin");
  std::vector<double> finite;
  for (double v : values)
    if (std::isfinite(v)) finite.push_back(v);
  if (finite.empty()) throw BadConfig("histogram of an empty sample");

  const auto [lo_it, hi_it] = std::minmax_element(finite.begin(), finite.end());
  double lo = *lo_it;
  double hi = *hi_it;
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  HistogramExport h;
  h.bin_edges.resize(bins + 1);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i <= bins; ++i) h.bin_edges[i] = lo + width * static_cast<double>(i);
  h.bin_edges[bins] = hi;
  h.counts.assign(bins, 0);
  for (double v : finite) {
    auto idx = static_cast<std::size_t>((v - lo) / width);
    ++h.counts[std::min(idx, bins - 1)];
  }
  h.ks_distance = ks_distance_standard_normal(finite);
  return h;
}

HistogramExport export_standardized_histogram(const ExperimentSpec& cell, std::size_t bins,
                                              const RunOptions& options) {
  if (cell.scenarios < 100) throw BadConfig("histogram export needs >= 100 scenarios");
  ExperimentSpec single = cell;
  single.m_values.resize(1);
  single.n_values.resize(1);
  if (single.q_values.empty()) single.q_values = {0.05};
  const auto stats = simulate_statistics(single, options);
  std::vector<double> standardized;
  standardized.reserve(stats.front().values.size());
  for (double v : stats.front().values)
    if (!std::isnan(v)) standardized.push_back(standardize(v, stats.front().n));
  return make_histogram(standardized, bins);
}

void write_histogram_csv(std::ostream& out, const HistogramExport& histogram) {
  out << "bin_left,bin_right,count\n";
  for (std::size_t i = 0; i < histogram.counts.size(); ++i)
    out << format_real(histogram.bin_edges[i]) << ',' << format_real(histogram.bin_edges[i + 1])
        << ',' << histogram.counts[i] << '\n';
}

double heuristic_power_bound(double alpha, double q, double n, double c_constant) {
  if (!(alpha > 1.0 && alpha < 2.0)) throw BadConfig("heuristic bound requires 1 < alpha < 2");
  if (!(q > 0.0 && q < 1.0)) throw BadConfig("significance level q must lie in (0, 1)");
  if (!(n >= 1.0)) throw BadConfig("number of blocks must be >= 1");
  if (!(c_constant > 0.0)) throw BadConfig("constant C(alpha, q) must be > 0");
  return std::max(0.0, 1.0 - c_constant / std::pow(n, 2.0 / alpha - 1.0));
}

double heuristic_blocks_for_power(double alpha, double c_constant, double target) {
  if (!(alpha > 1.0 && alpha < 2.0)) throw BadConfig("heuristic bound requires 1 < alpha < 2");
  if (!(target > 0.0 && target < 1.0)) throw BadConfig("target power must lie in (0, 1)");
  if (!(c_constant > 0.0)) throw BadConfig("constant C(alpha, q) must be > 0");
  return std::pow(c_constant / (1.0 - target), 1.0 / (2.0 / alpha - 1.0));
}

}  // namespace heavytail
