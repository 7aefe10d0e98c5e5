// heavytail: decide from a sample whether X lies in the Gaussian domain of
// attraction, simulate samples, and run Monte Carlo calibration grids.
//
// Exit codes: 0 success / H0 not rejected, 2 H0 rejected (`test` only), 1 error.
// HEAVYTAIL_SEED sets the default --seed of every command.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "heavytail/heavytail.hpp"

namespace ht = heavytail;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitReject = 2;
constexpr std::size_t kDeskScaleMaxM = 1'000'000;

constexpr const char* kDistHelp =
    "Distribution: normal | gaussian-power:R | alpha-stable:ALPHA[:BETA[:SCALE[:LOC]]] | "
    "weak-dependent:R | file:PATH";

std::uint64_t default_seed() {
  if (const char* env = std::getenv("HEAVYTAIL_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ht::BadConfig(std::string("HEAVYTAIL_SEED is not an unsigned integer: ") + env);
    }
  }
  return 1;
}

// Writes through `writer` to `path`, or to stdout when path is empty or "-".
template <class Writer>
void emit(const std::string& path, Writer&& writer) {
  if (path.empty() || path == "-") {
    writer(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path);
  if (!out) throw ht::Error("cannot write '" + path + "'");
  writer(out);
  if (!out) throw ht::Error("write failed for '" + path + "'");
}

void check_desk_scale(std::size_t m, bool full_scale) {
  if (m > kDeskScaleMaxM && !full_scale)
    throw ht::BadConfig("m = " + std::to_string(m) +
                        " exceeds desk scale (1e6); pass --full-scale to run it");
}

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

struct TestArgs {
  std::string file;
  std::size_t n = 100;
  double q = 0.05;
};

int cmd_test(const TestArgs& a) {
  const ht::TestConfig config{a.n, a.q};
  config.validate();
  const auto sample = ht::read_sample_file(a.file);
  const auto result = ht::run_test(sample.values, config);
  if (result.blocks_exceed_sqrt_m)
    std::cerr << "warning: n = " << result.n << " exceeds sqrt(m) = "
              << std::sqrt(static_cast<double>(result.m))
              << "; use n significantly smaller than m\n";
  std::cout << result.to_json() << '\n';
  std::cerr << result.verdict() << '\n';
  return result.reject ? kExitReject : kExitOk;
}

struct SimulateArgs {
  std::string dist;
  std::size_t m = 0;
  std::optional<std::uint64_t> seed;
  std::uint64_t stream = 0;
  std::string out;
};

int cmd_simulate(const SimulateArgs& a) {
  const auto spec = ht::dist::DistributionSpec::parse(a.dist);
  if (a.m == 0) throw ht::BadConfig("--m must be >= 1");
  const auto sample = ht::dist::draw(spec, {a.seed.value_or(default_seed()), a.stream}, a.m);
  emit(a.out, [&](std::ostream& os) {
    os << "# " << sample.provenance << '\n';
    ht::write_sample(os, sample.values);
  });
  return kExitOk;
}

struct ExperimentArgs {
  std::string spec_file;
  std::string dist;
  std::vector<std::size_t> m;
  std::vector<std::size_t> n;
  std::vector<double> q;
  std::size_t scenarios = 2000;
  std::optional<std::uint64_t> seed;
  std::string hypothesis = "unknown";
  std::string out;
  unsigned workers = 0;
  bool full_scale = false;
  double level = 0.95;
};

ht::ExperimentSpec build_experiment(const ExperimentArgs& a) {
  ht::ExperimentSpec spec;
  if (!a.spec_file.empty()) {
    std::ifstream in(a.spec_file);
    if (!in) throw ht::ParseError("cannot open spec file '" + a.spec_file + "'", 0);
    std::stringstream buf;
    buf << in.rdbuf();
    spec = ht::parse_experiment_spec(buf.str());
    if (a.seed) spec.master_seed = *a.seed;
  } else {
    if (a.dist.empty() || a.m.empty() || a.n.empty())
      throw ht::BadConfig("experiment needs --spec-file or --dist, --m and --n");
    spec.distribution = ht::dist::DistributionSpec::parse(a.dist);
    spec.m_values = a.m;
    spec.n_values = a.n;
    spec.q_values = a.q.empty() ? std::vector<double>{0.05, 0.1} : a.q;
    spec.scenarios = a.scenarios;
    spec.master_seed = a.seed.value_or(default_seed());
    spec.hypothesis = ht::parse_hypothesis(a.hypothesis);
  }
  spec.validate();
  for (std::size_t m : spec.m_values) check_desk_scale(m, a.full_scale);
  return spec;
}

int cmd_experiment(const ExperimentArgs& a) {
  if (!(a.level > 0.0 && a.level < 1.0)) throw ht::BadConfig("--level must lie in (0, 1)");
  const auto spec = build_experiment(a);
  const auto cells = ht::run_experiment(spec, {resolve_workers(a.workers)});
  for (const auto& c : cells)
    if (c.failures > 0)
      std::cerr << "warning: m=" << c.m << " n=" << c.n << ": " << c.failures
                << " scenario(s) failed (degenerate sample)\n";
  emit(a.out, [&](std::ostream& os) { ht::write_report_csv(os, spec, cells, a.level); });
  return kExitOk;
}

struct PathArgs {
  std::string file;
  std::string dist;
  std::size_t m = 10000;
  std::optional<std::uint64_t> seed;
  std::size_t n = 1000;
  std::optional<double> normalizer;
  std::string out;
};

int cmd_path(const PathArgs& a) {
  ht::Sample sample;
  if (!a.file.empty() && !a.dist.empty())
    throw ht::BadConfig("give either an input file or --dist, not both");
  if (!a.file.empty()) {
    sample = ht::read_sample_file(a.file);
  } else if (!a.dist.empty()) {
    sample = ht::dist::draw(ht::dist::DistributionSpec::parse(a.dist),
                            {a.seed.value_or(default_seed()), 0}, a.m);
  } else {
    throw ht::BadConfig("path needs an input file or --dist");
  }
  const double normalizer =
      a.normalizer.value_or(std::sqrt(static_cast<double>(sample.size())));
  const auto path = ht::build_bridge_path(sample.values, a.n, normalizer);
  emit(a.out, [&](std::ostream& os) { ht::write_path_csv(os, path); });
  return kExitOk;
}

struct HistArgs {
  std::string dist;
  std::size_t m = 100000;
  std::size_t n = 1000;
  std::size_t scenarios = 2000;
  std::optional<std::uint64_t> seed;
  std::size_t bins = 40;
  std::string out;
  unsigned workers = 0;
  bool full_scale = false;
};

int cmd_hist(const HistArgs& a) {
  ht::ExperimentSpec spec;
  spec.distribution = ht::dist::DistributionSpec::parse(a.dist);
  spec.m_values = {a.m};
  spec.n_values = {a.n};
  spec.q_values = {0.05};
  spec.scenarios = a.scenarios;
  spec.master_seed = a.seed.value_or(default_seed());
  spec.validate();
  check_desk_scale(a.m, a.full_scale);
  const auto hist = ht::export_standardized_histogram(spec, a.bins, {resolve_workers(a.workers)});
  std::cerr << "ks_distance=" << ht::format_real(hist.ks_distance) << " (reference: "
            << hist.reference << ")\n";
  emit(a.out, [&](std::ostream& os) { ht::write_histogram_csv(os, hist); });
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Test whether a sample lies in the Gaussian domain of attraction"};
  app.require_subcommand(1);
  app.footer(std::string(kDistHelp) +
             "\nExit codes: 0 ok / not rejected, 2 rejected (test), 1 error."
             "\nHEAVYTAIL_SEED overrides the default seed (1).");

  TestArgs test_args;
  auto* test = app.add_subcommand("test", "Run the test on a sample file");
  test->add_option("file", test_args.file, "Sample file: one real per line, '#' comments")
      ->required();
  test->add_option("--n", test_args.n, "Number of blocks (>= 2)")->capture_default_str();
  test->add_option("--q", test_args.q, "Significance level in (0,1)")->capture_default_str();

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "Draw a sample and write it as a sample file");
  simulate->add_option("--dist", sim_args.dist, kDistHelp)->required();
  simulate->add_option("--m", sim_args.m, "Sample size")->required();
  simulate->add_option("--seed", sim_args.seed, "Master seed");
  simulate->add_option("--stream", sim_args.stream, "Stream index")->capture_default_str();
  simulate->add_option("--out", sim_args.out, "Output file (default stdout)");

  ExperimentArgs exp_args;
  auto* experiment = app.add_subcommand("experiment", "Monte Carlo rejection rates over a grid");
  experiment->add_option("--spec-file", exp_args.spec_file, "JSON experiment description");
  experiment->add_option("--dist", exp_args.dist, kDistHelp);
  experiment->add_option("--m", exp_args.m, "Sample sizes")->delimiter(',');
  experiment->add_option("--n", exp_args.n, "Block counts")->delimiter(',');
  experiment->add_option("--q", exp_args.q, "Significance levels (default 0.05,0.1)")
      ->delimiter(',');
  experiment->add_option("--scenarios", exp_args.scenarios, "Samples per cell")
      ->capture_default_str();
  experiment->add_option("--seed", exp_args.seed, "Master seed");
  experiment->add_option("--hypothesis", exp_args.hypothesis, "H0, H1 or unknown")
      ->capture_default_str();
  experiment->add_option("--out", exp_args.out, "Report CSV (default stdout)");
  experiment->add_option("--workers", exp_args.workers, "Worker threads (0 = all cores)")
      ->capture_default_str();
  experiment->add_flag("--full-scale", exp_args.full_scale, "Allow m > 1e6");
  experiment->add_option("--level", exp_args.level, "Confidence level of err_low/err_high")
      ->capture_default_str();

  PathArgs path_args;
  auto* path = app.add_subcommand("path", "Export the bridge path as t,z CSV");
  path->add_option("file", path_args.file, "Sample file (or use --dist)");
  path->add_option("--dist", path_args.dist, kDistHelp);
  path->add_option("--m", path_args.m, "Sample size with --dist")->capture_default_str();
  path->add_option("--seed", path_args.seed, "Master seed with --dist");
  path->add_option("--n", path_args.n, "Number of blocks")->capture_default_str();
  path->add_option("--normalizer", path_args.normalizer, "Path scale (default sqrt(m))");
  path->add_option("--out", path_args.out, "Output CSV (default stdout)");

  HistArgs hist_args;
  auto* hist = app.add_subcommand("hist", "Histogram of the standardized statistic");
  hist->add_option("--dist", hist_args.dist, kDistHelp)->required();
  hist->add_option("--m", hist_args.m, "Sample size")->capture_default_str();
  hist->add_option("--n", hist_args.n, "Number of blocks")->capture_default_str();
  hist->add_option("--scenarios", hist_args.scenarios, "Samples (>= 100)")->capture_default_str();
  hist->add_option("--seed", hist_args.seed, "Master seed");
  hist->add_option("--bins", hist_args.bins, "Number of bins")->capture_default_str();
  hist->add_option("--out", hist_args.out, "Output CSV (default stdout)");
  hist->add_option("--workers", hist_args.workers, "Worker threads (0 = all cores)")
      ->capture_default_str();
  hist->add_flag("--full-scale", hist_args.full_scale, "Allow m > 1e6");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (*test) return cmd_test(test_args);
    if (*simulate) return cmd_simulate(sim_args);
    if (*experiment) return cmd_experiment(exp_args);
    if (*path) return cmd_path(path_args);
    if (*hist) return cmd_hist(hist_args);
  } catch (const ht::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
