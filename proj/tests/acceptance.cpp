// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "heavytail/heavytail.hpp"

using namespace heavytail;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

RunOptions all_cores() { return {std::max(1u, std::thread::hardware_concurrency())}; }

std::vector<CellResult> grid(const std::string& dist, std::size_t m, std::vector<std::size_t> n,
                             std::vector<double> q, std::size_t scenarios, std::uint64_t seed) {
  ExperimentSpec spec;
  spec.distribution = dist::DistributionSpec::parse(dist);
  spec.m_values = {m};
  spec.n_values = std::move(n);
  spec.q_values = std::move(q);
  spec.scenarios = scenarios;
  spec.master_seed = seed;
  return run_experiment(spec, all_cores());
}

std::string err_text(const CellResult& c) {
  const auto [lo, hi] = err_confidence_interval(c, 0.95);
  return fmt("ERR=%.4f (95%% CI %.4f-%.4f, %zu/%zu)", c.err, lo, hi, c.rejections, c.scenarios);
}

Outcome constants() {
  const long double pi = std::numbers::pi_v<long double>;
  const double two_over_pi = static_cast<double>(2.0L / pi);
  const double sigma_sq = static_cast<double>(1.0L + 4.0L / pi - 20.0L / (pi * pi));
  const double identity_gap = std::abs(CovarianceConstants::ratio_variance() - kSigmaPiSq);
  const bool pass = std::abs(kTwoOverPi - two_over_pi) <= 1e-10 &&
                    std::abs(kTwoOverPi - 0.6366197723) <= 1e-10 &&
                    std::abs(kSigmaPiSq - sigma_sq) <= 1e-10 && identity_gap <= 1e-12;
  return {pass, fmt("2/pi=%.12f sigma_pi^2=%.12f (formula %.12f) identity gap=%.1e", kTwoOverPi,
                    kSigmaPiSq, sigma_sq, identity_gap)};
}

Outcome exactness() {
  std::mt19937_64 gen(2024);
  const char* families[] = {"normal", "gaussian-power:0.4", "alpha-stable:1.3", "alpha-stable:0.8"};
  double worst_oracle = 0.0;
  double worst_affine = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + gen() % 200;
    const std::size_t m = n + gen() % 5000;
    const auto spec = dist::DistributionSpec::parse(families[trial % 4]);
    const auto x = dist::draw(spec, {99, static_cast<std::uint64_t>(trial)}, m).values;
    const double normalizer = std::exp(std::uniform_real_distribution<double>(-5.0, 5.0)(gen));

    const double direct = compute_statistic(summarize_blocks(x, n)).value;
    const double via_path = statistic_from_path(build_bridge_path(x, n, normalizer)).value;
    worst_oracle = std::max(worst_oracle, std::abs(direct - via_path) / direct);

    const double a = std::exp(std::uniform_real_distribution<double>(-4.6, 4.6)(gen));
    const double b = std::uniform_real_distribution<double>(-10.0, 10.0)(gen);
    std::vector<double> y(x);
    for (double& v : y) v = a * v + b;
    const double moved = compute_statistic(summarize_blocks(y, n)).value;
    worst_affine = std::max(worst_affine, std::abs(moved - direct) / direct);
  }
  return {worst_oracle <= 1e-12 && worst_affine <= 1e-12,
          fmt("max rel err path oracle=%.2e affine=%.2e over 1000 triples", worst_oracle,
              worst_affine)};
}

Outcome hand_case() {
  const std::vector<double> x{1, 2, 3, 4};
  const double s = compute_statistic(summarize_blocks(x, 2)).value;
  const double u = uncentered_statistic(x, 2).value;
  return {s == 0.5 && u == 21.0 / 58.0, fmt("S=%.17g uncentered=%.17g (21/58=%.17g)", s, u,
                                            21.0 / 58.0)};
}

Outcome calibration() {
  const auto cells = grid("normal", 100000, {100}, {0.05, 0.1}, 2000, 4);
  const bool pass = cells[0].err >= 0.03 && cells[0].err <= 0.08 && cells[1].err >= 0.07 &&
                    cells[1].err <= 0.14;
  return {pass, "q=0.05 " + err_text(cells[0]) + "; q=0.1 " + err_text(cells[1])};
}

Outcome infinite_variance_in_domain() {
  const auto c = grid("gaussian-power:0.3", 1000000, {10}, {0.1}, 1000, 5).front();
  return {c.err >= 0.07 && c.err <= 0.14, err_text(c)};
}

Outcome power() {
  const auto a12 = grid("alpha-stable:1.2", 1000000, {100}, {0.1}, 500, 6).front();
  const auto a09 = grid("alpha-stable:0.9", 1000000, {100}, {0.1}, 500, 6).front();
  return {a12.err >= 0.90 && a09.err >= 0.95,
          "alpha=1.2 " + err_text(a12) + "; alpha=0.9 " + err_text(a09)};
}

Outcome clt_shape() {
  ExperimentSpec spec;
  spec.distribution = dist::DistributionSpec::parse("normal");
  spec.m_values = {100000};
  spec.n_values = {1000};
  spec.q_values = {0.05};
  spec.scenarios = 2000;
  spec.master_seed = 7;
  const auto h = export_standardized_histogram(spec, 40, all_cores());
  return {h.ks_distance <= 0.05, fmt("KS distance=%.4f", h.ks_distance)};
}

Outcome type2_decay() {
  const auto cells = grid("alpha-stable:1.8", 1000000, {200, 250, 500}, {0.05}, 500, 8);
  const bool decreasing = cells[0].type2 > cells[1].type2 && cells[1].type2 > cells[2].type2;
  std::string detail = fmt("type II = %.3f, %.3f, %.3f", cells[0].type2, cells[1].type2,
                           cells[2].type2);
  try {
    const auto fit = type2_decay_fit(cells);
    detail += fmt("; fit %.3f*exp(-%.5f n) r^2=%.4f", fit.amplitude, fit.rate, fit.r_squared);
    return {decreasing && fit.r_squared >= 0.9, detail};
  } catch (const FitError& e) {
    return {false, detail + "; fit failed: " + e.what()};
  }
}

Outcome weak_dependence() {
  const auto light = grid("weak-dependent:0.3", 1000000, {100}, {0.1}, 500, 9).front();
  const auto heavy = grid("weak-dependent:0.75", 1000000, {100}, {0.1}, 500, 9).front();
  return {light.err >= 0.05 && light.err <= 0.20 && heavy.err >= 0.85,
          "r=0.3 " + err_text(light) + "; r=0.75 " + err_text(heavy)};
}

Outcome over_zoom() {
  const auto c = grid("gaussian-power:0.45", 100000, {10000}, {0.1}, 500, 10).front();
  return {c.err >= 0.5, err_text(c) + " (expected degradation with n > sqrt(m))"};
}

Outcome determinism() {
  ExperimentSpec spec;
  spec.distribution = dist::DistributionSpec::parse("alpha-stable:1.6");
  spec.m_values = {20000, 50000};
  spec.n_values = {10, 100};
  spec.q_values = {0.05, 0.1};
  spec.scenarios = 200;
  spec.master_seed = 11;
  auto csv = [&](unsigned workers) {
    std::ostringstream out;
    write_report_csv(out, spec, run_experiment(spec, {workers}));
    return out.str();
  };
  const auto one = csv(1);
  const auto four = csv(4);
  const auto eight = csv(8);
  return {one == four && one == eight,
          fmt("%zu-byte CSV, 1 vs 4 vs 8 workers %s", one.size(),
              one == four && one == eight ? "identical" : "differ")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"constants", constants},
      {"path oracle and affine invariance", exactness},
      {"hand case", hand_case},
      {"calibration under H0", calibration},
      {"infinite variance inside the Gaussian domain", infinite_variance_in_domain},
      {"power against stable alternatives", power},
      {"CLT shape of the standardized statistic", clt_shape},
      {"type II error decay", type2_decay},
      {"weak dependence", weak_dependence},
      {"over-zoom degradation", over_zoom},
      {"determinism across worker counts", determinism},
  };
  int failures = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", index - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
