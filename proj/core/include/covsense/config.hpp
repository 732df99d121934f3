#pragma once

// Run configuration: a JSON tree of defaults, overridden by a config file and
// then by dotted `key=value` assignments.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "covsense/protocol.hpp"

namespace covsense {

using ConfigTree = nlohmann::ordered_json;

/// Names accepted by scenario_field / set_scenario_field.
const std::vector<std::string>& scenario_field_names();
double scenario_field(const SensingScenario& s, std::string_view name);
void set_scenario_field(SensingScenario& s, std::string_view name, double value);

class RunConfig {
 public:
  /// All defaults.
  RunConfig();

  static ConfigTree defaults();

  /// Merges a JSON document; every key must already exist with a compatible type.
  void merge(const ConfigTree& overrides);
  void merge_file(const std::string& path);
  /// "a.b.c=value"; value is parsed as JSON when possible, else taken as a string.
  void set(std::string_view assignment);
  void set(std::string_view dotted_key, const ConfigTree& value);

  /// Throws ConfigError describing the first invalid entry.
  void validate() const;

  const ConfigTree& tree() const { return tree_; }
  const ConfigTree& at(std::string_view dotted_key) const;

  SensingScenario scenario() const;
  std::uint64_t shots() const;
  std::uint64_t seed() const;
  unsigned jobs() const;
  std::string format() const;
  std::string out() const;

 private:
  ConfigTree tree_;
};

/// Geometric grid of `count` points from lo to hi inclusive.
std::vector<double> geometric_grid(double lo, double hi, std::size_t count);
/// Uniform grid of `count` points from lo to hi inclusive.
std::vector<double> linear_grid(double lo, double hi, std::size_t count);

}  // namespace covsense
