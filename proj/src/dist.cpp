#include "heavytail/dist.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

#include "heavytail/errors.hpp"

namespace heavytail {

namespace {

constexpr double kPi = std::numbers::pi;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view text, double& out) {
  text = trim(text);
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

using NormalDist = boost::random::normal_distribution<double>;

class NormalSource final : public dist::SampleSource {
 public:
  explicit NormalSource(const RngStream& stream) : engine_(stream.engine()) {}

  void fill(std::span<double> out) override {
    for (double& v : out) v = normal_(engine_);
  }

 private:
  Engine engine_;
  NormalDist normal_;
};

class GaussianPowerSource final : public dist::SampleSource {
 public:
  GaussianPowerSource(const RngStream& stream, double r)
      : engine_(stream.engine()), r_(r) {}

  void fill(std::span<double> out) override {
    for (double& v : out) {
      double g = 0.0;
      // g == 0 has probability zero but would give +inf; redraw keeps the law.
      do {
        g = normal_(engine_);
      } while (g == 0.0);
      v = std::exp(-r_ * std::log(std::abs(g)));
    }
  }

 private:
  Engine engine_;
  NormalDist normal_;
  double r_;
};

class StableSource final : public dist::SampleSource {
 public:
  StableSource(const RngStream& stream, const dist::AlphaStable& p)
      : engine_(stream.engine()), p_(p), variate_(p.alpha, p.beta) {}

  void fill(std::span<double> out) override {
    if (p_.alpha == 1.0) {
      const double shift = 2.0 / kPi * p_.beta * p_.scale * std::log(p_.scale);
      for (double& v : out)
        v = p_.scale * variate_(engine_) + shift + p_.location;
    } else {
      for (double& v : out)
        v = p_.scale * variate_(engine_) + p_.location;
    }
  }

 private:
  Engine engine_;
  dist::AlphaStable p_;
  dist::StableVariate variate_;
};

class WeakDependentSource final : public dist::SampleSource {
 public:
  explicit WeakDependentSource(std::unique_ptr<dist::SampleSource> upstream)
      : upstream_(std::move(upstream)) {}

  void fill(std::span<double> out) override {
    if (out.empty()) return;
    if (!primed_) {
      double first = 0.0;
      upstream_->fill({&first, 1});
      previous_ = first;
      primed_ = true;
    }
    upstream_->fill(out);
    for (double& v : out) {
      const double x = v;
      v = previous_ / (previous_ + 1.0) * x;
      previous_ = x;
    }
  }

 private:
  std::unique_ptr<dist::SampleSource> upstream_;
  double previous_ = 0.0;
  bool primed_ = false;
};

class ReplaySource final : public dist::SampleSource {
 public:
  explicit ReplaySource(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw BadConfig("cannot replay an empty sample");
  }

  void fill(std::span<double> out) override {
    std::size_t written = 0;
    while (written < out.size()) {
      const std::size_t take = std::min(out.size() - written, values_.size() - pos_);
      std::copy_n(values_.begin() + static_cast<std::ptrdiff_t>(pos_), take,
                  out.begin() + static_cast<std::ptrdiff_t>(written));
      written += take;
      pos_ = (pos_ + take) % values_.size();
    }
  }

 private:
  std::vector<double> values_;
  std::size_t pos_ = 0;
};

void require_positive_r(double r) {
  if (!(r > 0.0) || !std::isfinite(r))
    throw BadConfig("gaussian-power exponent r must be > 0, got " + format_real(r));
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

namespace dist {

void DistributionSpec::validate() const {
  std::visit(Overloaded{
                 [](const StandardNormal&) {},
                 [](const GaussianPower& p) { require_positive_r(p.r); },
                 [](const WeakDependentGaussianPower& p) { require_positive_r(p.r); },
                 [](const AlphaStable& p) {
                   if (!(p.alpha > 0.0 && p.alpha <= 2.0))
                     throw BadConfig("alpha-stable requires 0 < alpha <= 2");
                   if (!(p.beta >= -1.0 && p.beta <= 1.0))
                     throw BadConfig("alpha-stable requires -1 <= beta <= 1");
                   if (!(p.scale > 0.0) || !std::isfinite(p.scale))
                     throw BadConfig("alpha-stable requires scale > 0");
                   if (!std::isfinite(p.location))
                     throw BadConfig("alpha-stable location must be finite");
                 },
                 [](const ExternalFile& f) {
                   if (f.path.empty()) throw BadConfig("file distribution needs a path");
                 },
             },
             kind);
}

std::string DistributionSpec::family() const {
  return std::visit(Overloaded{
                        [](const StandardNormal&) { return std::string("normal"); },
                        [](const GaussianPower&) { return std::string("gaussian-power"); },
                        [](const AlphaStable&) { return std::string("alpha-stable"); },
                        [](const WeakDependentGaussianPower&) {
                          return std::string("weak-dependent");
                        },
                        [](const ExternalFile&) { return std::string("file"); },
                    },
                    kind);
}

std::string DistributionSpec::parameters() const {
  return std::visit(Overloaded{
                        [](const StandardNormal&) { return std::string(); },
                        [](const GaussianPower& p) { return format_real(p.r); },
                        [](const AlphaStable& p) {
                          return format_real(p.alpha) + ":" + format_real(p.beta) + ":" +
                                 format_real(p.scale) + ":" + format_real(p.location);
                        },
                        [](const WeakDependentGaussianPower& p) { return format_real(p.r); },
                        [](const ExternalFile& f) { return f.path; },
                    },
                    kind);
}

std::string DistributionSpec::to_string() const {
  const auto params = parameters();
  return params.empty() ? family() : family() + ":" + params;
}

DistributionSpec DistributionSpec::parse(std::string_view text) {
  text = trim(text);
  const auto colon = text.find(':');
  const std::string_view name = text.substr(0, colon);
  const std::string_view rest =
      colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);

  if (name == "file") {
    if (rest.empty()) throw BadConfig("file distribution needs a path: file:PATH");
    return {ExternalFile{std::string(rest)}};
  }

  std::vector<double> params;
  if (!rest.empty()) {
    for (auto part : split(rest, ':')) {
      double v = 0.0;
      if (!parse_double(part, v))
        throw BadConfig("bad numeric parameter '" + std::string(part) + "' in '" +
                        std::string(text) + "'");
      params.push_back(v);
    }
  }

  auto expect = [&](std::size_t lo, std::size_t hi) {
    if (params.size() < lo || params.size() > hi)
      throw BadConfig("wrong number of parameters in '" + std::string(text) + "'");
  };

  DistributionSpec spec;
  if (name == "normal" || name == "standard-normal") {
    expect(0, 0);
    spec.kind = StandardNormal{};
  } else if (name == "gaussian-power") {
    expect(1, 1);
    spec.kind = GaussianPower{params[0]};
  } else if (name == "weak-dependent") {
    expect(1, 1);
    spec.kind = WeakDependentGaussianPower{params[0]};
  } else if (name == "alpha-stable" || name == "stable") {
    expect(1, 4);
    AlphaStable p;
    p.alpha = params[0];
    if (params.size() > 1) p.beta = params[1];
    if (params.size() > 2) p.scale = params[2];
    if (params.size() > 3) p.location = params[3];
    spec.kind = p;
  } else {
    throw BadConfig("unknown distribution '" + std::string(name) + "'");
  }
  spec.validate();
  return spec;
}

StableVariate::StableVariate(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  if (alpha != 1.0) {
    const double zeta = beta * std::tan(kPi * alpha / 2.0);
    shift_ = std::atan(zeta) / alpha;
    scale_ = std::pow(1.0 + zeta * zeta, 1.0 / (2.0 * alpha));
  }
}

double StableVariate::operator()(Engine& engine) const {
  const double v = kPi * (uniform_open(engine) - 0.5);
  double w = 0.0;
  do {
    w = boost::random::exponential_distribution<double>{}(engine);
  } while (w == 0.0);

  if (alpha_ == 1.0) {
    const double half_pi_bv = kPi / 2.0 + beta_ * v;
    return 2.0 / kPi *
           (half_pi_bv * std::tan(v) -
            beta_ * std::log((kPi / 2.0) * w * std::cos(v) / half_pi_bv));
  }

  const double av = alpha_ * (v + shift_);
  // scale * sin(av) / cos(v)^(1/alpha) * (cos(v - av) / w)^((1 - alpha) / alpha)
  const double log_factor =
      (1.0 - alpha_) / alpha_ * (std::log(std::cos(v - av)) - std::log(w)) -
      std::log(std::cos(v)) / alpha_;
  return scale_ * std::sin(av) * std::exp(log_factor);
}

std::unique_ptr<SampleSource> make_source(const DistributionSpec& spec,
                                          const RngStream& stream) {
  spec.validate();
  return std::visit(
      Overloaded{
          [&](const StandardNormal&) -> std::unique_ptr<SampleSource> {
            return std::make_unique<NormalSource>(stream);
          },
          [&](const GaussianPower& p) -> std::unique_ptr<SampleSource> {
            return std::make_unique<GaussianPowerSource>(stream, p.r);
          },
          [&](const AlphaStable& p) -> std::unique_ptr<SampleSource> {
            return std::make_unique<StableSource>(stream, p);
          },
          [&](const WeakDependentGaussianPower& p) -> std::unique_ptr<SampleSource> {
            return make_weak_dependent(std::make_unique<GaussianPowerSource>(stream, p.r));
          },
          [&](const ExternalFile& f) -> std::unique_ptr<SampleSource> {
            return make_replay(read_sample_file(f.path).values);
          },
      },
      spec.kind);
}

std::unique_ptr<SampleSource> make_weak_dependent(std::unique_ptr<SampleSource> upstream) {
  return std::make_unique<WeakDependentSource>(std::move(upstream));
}

std::unique_ptr<SampleSource> make_replay(std::vector<double> values) {
  return std::make_unique<ReplaySource>(std::move(values));
}

Sample draw(const DistributionSpec& spec, const RngStream& stream, std::size_t count) {
  if (count == 0) throw BadConfig("sample count must be >= 1");
  Sample out;
  out.values.resize(count);
  make_source(spec, stream)->fill(out.values);
  out.provenance = spec.to_string() + " seed=" + std::to_string(stream.master_seed) +
                   " stream=" + std::to_string(stream.stream_index);
  return out;
}

Sample sample_standard_normal(const RngStream& stream, std::size_t count) {
  return draw({StandardNormal{}}, stream, count);
}

Sample sample_gaussian_power(const RngStream& stream, double r, std::size_t count) {
  return draw({GaussianPower{r}}, stream, count);
}

Sample sample_alpha_stable(const RngStream& stream, double alpha, double beta, double scale,
                           double location, std::size_t count) {
  return draw({AlphaStable{alpha, beta, scale, location}}, stream, count);
}

Sample sample_weak_dependent(const RngStream& stream, double r, std::size_t count) {
  if (count < 2) throw BadConfig("weak-dependent chain needs count >= 2");
  return draw({WeakDependentGaussianPower{r}}, stream, count - 1);
}

}  // namespace dist

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw DomainError("normal_quantile requires 0 < p < 1, got " + format_real(p));

  // Acklam's rational approximation (relative error ~1.2e-9).
  static constexpr std::array<double, 6> a{-3.969683028665376e+01, 2.209460984245205e+02,
                                           -2.759285104469687e+02, 1.383577518672690e+02,
                                           -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr std::array<double, 5> b{-5.447609879822406e+01, 1.615858368580409e+02,
                                           -1.556989798598866e+02, 6.680131188771972e+01,
                                           -1.328068155288572e+01};
  static constexpr std::array<double, 6> c{-7.784894002430293e-03, -3.223964580411365e-01,
                                           -2.400758277161838e+00, -2.549732539343734e+00,
                                           4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr std::array<double, 4> d{7.784695709041462e-03, 3.224671290700398e-01,
                                           2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double kLow = 0.02425;

  // Work in the lower half so that quantile(1 - p) == -quantile(p).
  const bool upper = p > 0.5;
  const double pl = upper ? 1.0 - p : p;

  double x = 0.0;
  if (pl < kLow) {
    const double t = std::sqrt(-2.0 * std::log(pl));
    x = (((((c[0] * t + c[1]) * t + c[2]) * t + c[3]) * t + c[4]) * t + c[5]) /
        ((((d[0] * t + d[1]) * t + d[2]) * t + d[3]) * t + 1.0);
  } else {
    const double t = pl - 0.5;
    const double r = t * t;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * t /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }

  // One Newton step against the exact cdf.
  const double density = std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi);
  if (density > 0.0) x -= (normal_cdf(x) - pl) / density;

  return upper ? -x : x;
}

std::string format_real(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

Sample read_sample(std::istream& in, std::string provenance) {
  Sample sample;
  sample.provenance = std::move(provenance);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view = trim(view.substr(3));
    if (view.empty() || view.front() == '#') continue;
    double v = 0.0;
    if (!parse_double(view, v))
      throw ParseError("not a decimal real: '" + std::string(view) + "'", line_no);
    if (!std::isfinite(v)) throw ParseError("non-finite value", line_no);
    sample.values.push_back(v);
  }
  return sample;
}

Sample read_sample_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open sample file '" + path + "'", 0);
  try {
    return read_sample(in, "file:" + path);
  } catch (const ParseError& e) {
    throw ParseError(e.reason(), e.line(), path);
  }
}

void write_sample(std::ostream& out, std::span<const double> values) {
  for (double v : values) out << format_real(v) << '\n';
}

void write_sample_file(const std::string& path, std::span<const double> values) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  write_sample(out, values);
  if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace heavytail
