#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "heavytail/rng.hpp"

namespace heavytail {

/// An ordered sequence of observations plus a note on where it came from.
struct Sample {
  std::vector<double> values;
  std::string provenance;

  std::size_t size() const noexcept { return values.size(); }
};

namespace dist {

struct StandardNormal {};

/// X = |G|^{-r}, G standard normal. r <= 1/2 lies in DA(2), r > 1/2 in DA(1/r).
struct GaussianPower {
  double r = 0.0;
};

/// Stable law with characteristic function
///   exp(i*location*t - scale^alpha |t|^alpha (1 - i beta sign(t) w(t, alpha)))
/// where w = tan(pi alpha / 2) for alpha != 1 and -(2/pi) log|t| for alpha = 1.
struct AlphaStable {
  double alpha = 2.0;
  double beta = 0.0;
  double scale = 1.0;
  double location = 0.0;
};

/// The 1-dependent chain Y_k = X_{k-1} / (X_{k-1} + 1) * X_k over X = |G|^{-r}.
struct WeakDependentGaussianPower {
  double r = 0.0;
};

/// Observations replayed from a sample file.
struct ExternalFile {
  std::string path;
};

using DistributionKind = std::variant<StandardNormal, GaussianPower, AlphaStable,
                                      WeakDependentGaussianPower, ExternalFile>;

/// Tagged description of a sample generator.
///
/// Text form (used on the command line and in report files):
///   normal
///   gaussian-power:R
///   alpha-stable:ALPHA[:BETA[:SCALE[:LOCATION]]]
///   weak-dependent:R
///   file:PATH
struct DistributionSpec {
  DistributionKind kind = StandardNormal{};

  /// Throws BadConfig when parameters are outside their ranges.
  void validate() const;

  /// Short family name: "normal", "gaussian-power", ...
  std::string family() const;
  /// Parameters joined by ':' ("" for the standard normal).
  std::string parameters() const;
  std::string to_string() const;

  static DistributionSpec parse(std::string_view text);
};

/// Streaming generator: successive fill() calls continue the same sequence.
class SampleSource {
 public:
  virtual ~SampleSource() = default;
  virtual void fill(std::span<double> out) = 0;
};

/// Builds the generator for `spec` driven by `stream`. ExternalFile sources
/// load the file once and replay it, cycling if more values are requested.
std::unique_ptr<SampleSource> make_source(const DistributionSpec& spec,
                                          const RngStream& stream);

/// Wraps any source of X values into the chain Y_k = X_{k-1}/(X_{k-1}+1) X_k.
/// The first fill() consumes one extra X to prime the chain.
std::unique_ptr<SampleSource> make_weak_dependent(std::unique_ptr<SampleSource> upstream);

/// Source replaying a fixed vector (cycling).
std::unique_ptr<SampleSource> make_replay(std::vector<double> values);

/// Draws `count` values from `spec`. For WeakDependentGaussianPower this
/// yields `count` chain values (count + 1 underlying draws).
Sample draw(const DistributionSpec& spec, const RngStream& stream, std::size_t count);

Sample sample_standard_normal(const RngStream& stream, std::size_t count);
Sample sample_gaussian_power(const RngStream& stream, double r, std::size_t count);
Sample sample_alpha_stable(const RngStream& stream, double alpha, double beta,
                           double scale, double location, std::size_t count);
/// Builds Y_2..Y_count from `count` i.i.d. |G|^{-r} draws; returns count - 1 values.
Sample sample_weak_dependent(const RngStream& stream, double r, std::size_t count);

/// Chambers-Mallows-Stuck sampler for the standard (scale 1, location 0)
/// stable law; alpha == 1 uses the logarithmic branch.
class StableVariate {
 public:
  StableVariate(double alpha, double beta);
  double operator()(Engine& engine) const;

 private:
  double alpha_;
  double beta_;
  double shift_ = 0.0;  // atan(beta tan(pi alpha / 2)) / alpha
  double scale_ = 1.0;  // (1 + beta^2 tan^2(pi alpha / 2))^(1 / (2 alpha))
};

}  // namespace dist

double normal_cdf(double x);
/// Inverse of normal_cdf on (0, 1); throws DomainError outside.
double normal_quantile(double p);

/// Reads newline-delimited reals. Blank lines and lines starting with '#'
/// are skipped; anything else that is not a number is a ParseError.
Sample read_sample(std::istream& in, std::string provenance = "stream");
Sample read_sample_file(const std::string& path);
/// Writes one value per line with 17 significant digits.
void write_sample(std::ostream& out, std::span<const double> values);
void write_sample_file(const std::string& path, std::span<const double> values);

/// printf("%.17g") formatting used by every text output.
std::string format_real(double value);

}  // namespace heavytail
