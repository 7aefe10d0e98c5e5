#include <set>

#include <nlohmann/json.hpp>

#include "heavytail/errors.hpp"
#include "heavytail/montecarlo.hpp"

namespace heavytail {

namespace {

template <class T>
std::vector<T> as_list(const nlohmann::json& value, const char* key) {
  try {
    if (value.is_array()) return value.get<std::vector<T>>();
    return {value.get<T>()};
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad value for '") + key + "': " + e.what(), 0);
  }
}

}  // namespace

ExperimentSpec parse_experiment_spec(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), 0);
  }
  if (!doc.is_object()) throw ParseError("experiment spec must be a JSON object", 0);

  static const std::set<std::string> kKeys{"dist", "m", "n", "q", "scenarios", "seed",
                                           "hypothesis"};
  for (const auto& [key, value] : doc.items())
    if (!kKeys.contains(key)) throw ParseError("unknown key '" + key + "'", 0);
  for (const char* key : {"dist", "m", "n", "q"})
    if (!doc.contains(key)) throw ParseError(std::string("missing key '") + key + "'", 0);

  ExperimentSpec spec;
  try {
    spec.distribution = dist::DistributionSpec::parse(doc.at("dist").get<std::string>());
    if (doc.contains("scenarios")) spec.scenarios = doc.at("scenarios").get<std::size_t>();
    if (doc.contains("seed")) spec.master_seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("hypothesis"))
      spec.hypothesis = parse_hypothesis(doc.at("hypothesis").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad value: ") + e.what(), 0);
  }
  spec.m_values = as_list<std::size_t>(doc.at("m"), "m");
  spec.n_values = as_list<std::size_t>(doc.at("n"), "n");
  spec.q_values = as_list<double>(doc.at("q"), "q");
  spec.validate();
  return spec;
}

}  // namespace heavytail
