#include "covsense/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "covsense/errors.hpp"

namespace covsense {

namespace {

struct Field {
  const char* name;
  double SensingScenario::*member;
};

constexpr Field kFields[] = {
    {"N_S", &SensingScenario::N_S},         {"N_B", &SensingScenario::N_B},
    {"kappa_T", &SensingScenario::kappa_T}, {"kappa_E", &SensingScenario::kappa_E},
    {"kappa_I", &SensingScenario::kappa_I}, {"W", &SensingScenario::W},
    {"T", &SensingScenario::T},             {"theta", &SensingScenario::theta},
    {"G_pc", &SensingScenario::G_pc},       {"willie_fraction", &SensingScenario::willie_fraction},
    {"N_R", &SensingScenario::N_R},
};

const Field& find_field(std::string_view name) {
  for (const auto& f : kFields) {
    if (name == f.name) return f;
  }
  throw ConfigError("unknown scenario field '" + std::string(name) + "'");
}

std::vector<std::string> split_key(std::string_view key) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = key.find('.', start);
    parts.emplace_back(key.substr(start, dot - start));
    if (parts.back().empty()) throw ConfigError("malformed key '" + std::string(key) + "'");
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return parts;
}

bool compatible(const ConfigTree& def, const ConfigTree& value) {
  if (def.is_number()) return value.is_number();
  if (def.is_array()) return value.is_array();
  return def.type() == value.type();
}

void merge_into(ConfigTree& target, const ConfigTree& overrides, const std::string& prefix) {
  if (!overrides.is_object()) throw ConfigError("configuration root must be an object");
  for (auto it = overrides.begin(); it != overrides.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!target.contains(it.key())) throw ConfigError("unknown configuration key '" + key + "'");
    ConfigTree& slot = target[it.key()];
    if (slot.is_object()) {
      if (!it.value().is_object()) throw ConfigError("'" + key + "' must be a table");
      merge_into(slot, it.value(), key);
    } else {
      if (!compatible(slot, it.value())) {
        throw ConfigError("'" + key + "' expects a " + std::string(slot.type_name()) +
                          ", got " + it.value().type_name());
      }
      slot = it.value();
    }
  }
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

std::uint64_t non_negative_integer(const ConfigTree& v, const std::string& key) {
  require(v.is_number(), "'" + key + "' must be a number");
  const double d = v.get<double>();
  require(d >= 0.0 && std::floor(d) == d && d < 1.8e19, "'" + key + "' must be a non-negative integer");
  return v.is_number_unsigned() ? v.get<std::uint64_t>() : static_cast<std::uint64_t>(d);
}

void check_numbers(const ConfigTree& arr, const std::string& key, bool positive) {
  for (const auto& v : arr) {
    require(v.is_number(), "'" + key + "' must contain only numbers");
    const double d = v.get<double>();
    require(std::isfinite(d) && (!positive || d > 0.0), "'" + key + "' entries must be " +
                                                            (positive ? "positive" : "finite"));
  }
}

void check_variants(const ConfigTree& arr, const std::string& key) {
  require(!arr.empty(), "'" + key + "' must list at least one variant");
  for (const auto& v : arr) {
    require(v.is_string(), "'" + key + "' must contain variant names");
    try {
      parse_variant(v.get<std::string>());
    } catch (const Error& e) {
      throw ConfigError("'" + key + "': " + e.what());
    }
  }
}

}  // namespace

const std::vector<std::string>& scenario_field_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& f : kFields) out.emplace_back(f.name);
    return out;
  }();
  return names;
}

double scenario_field(const SensingScenario& s, std::string_view name) {
  return s.*(find_field(name).member);
}

void set_scenario_field(SensingScenario& s, std::string_view name, double value) {
  s.*(find_field(name).member) = value;
}

std::vector<double> geometric_grid(double lo, double hi, std::size_t count) {
  if (count == 1) return {lo};
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(count - 1));
  }
  out.back() = hi;
  return out;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t count) {
  if (count == 1) return {lo};
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  out.back() = hi;
  return out;
}

ConfigTree RunConfig::defaults() {
  const SensingScenario s;
  ConfigTree scenario = ConfigTree::object();
  for (const auto& f : kFields) scenario[f.name] = s.*(f.member);

  ConfigTree t = ConfigTree::object();
  t["scenario"] = scenario;
  t["shots"] = 2000;
  t["seed"] = 1;
  t["jobs"] = 1;
  t["format"] = "csv";
  t["out"] = "-";
  t["qfi_step"] = 0.2;
  t["window_count"] = 1;
  t["exact_limit"] = 1e6;
  t["fig3"] = {{"theta_min", 0.1 * std::numbers::pi},
               {"theta_max", 0.9 * std::numbers::pi},
               {"theta_points", 13},
               {"theta_grid", ConfigTree::array()},
               {"noise_free", false},
               {"variants", {"entangled", "classical"}}};
  t["fig4"] = {{"N_B_grid", {40.0, 80.0, 160.0, 320.0, 640.0, 1280.0}},
               {"epsilon", 2e-4},
               {"kappa_E", 0.36},
               {"N_S_fixed", 8e-4},
               {"variants", {"entangled", "classical"}}};
  t["fig5"] = {{"T_grid", geometric_grid(1e-3, 64e-3, 6)},
               {"sqrt_law_constant", 200.0},
               {"violate_ratio", 6.25e-5},
               {"kappa_E", 0.5},
               {"N_B", 1280.0},
               {"variants", {"entangled", "classical"}}};
  t["grid"] = {{"param", "N_B"},
               {"values", ConfigTree::array()},
               {"variants", {"entangled", "classical", "coherent"}}};
  return t;
}

RunConfig::RunConfig() : tree_(defaults()) {}

void RunConfig::merge(const ConfigTree& overrides) { merge_into(tree_, overrides, ""); }

void RunConfig::merge_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  ConfigTree doc;
  try {
    doc = ConfigTree::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
  merge(doc);
}

void RunConfig::set(std::string_view dotted_key, const ConfigTree& value) {
  const auto parts = split_key(dotted_key);
  ConfigTree patch = value;
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
    ConfigTree wrap = ConfigTree::object();
    wrap[*it] = std::move(patch);
    patch = std::move(wrap);
  }
  merge(patch);
}

void RunConfig::set(std::string_view assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("expected KEY=VALUE, got '" + std::string(assignment) + "'");
  }
  const std::string_view key = assignment.substr(0, eq);
  const std::string text(assignment.substr(eq + 1));
  ConfigTree value = ConfigTree::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  set(key, value);
}

const ConfigTree& RunConfig::at(std::string_view dotted_key) const {
  const ConfigTree* node = &tree_;
  for (const auto& part : split_key(dotted_key)) {
    if (!node->is_object() || !node->contains(part)) {
      throw ConfigError("unknown configuration key '" + std::string(dotted_key) + "'");
    }
    node = &(*node)[part];
  }
  return *node;
}

SensingScenario RunConfig::scenario() const {
  SensingScenario s;
  for (const auto& f : kFields) s.*(f.member) = tree_["scenario"][f.name].get<double>();
  return s;
}

std::uint64_t RunConfig::shots() const { return non_negative_integer(tree_["shots"], "shots"); }
std::uint64_t RunConfig::seed() const { return non_negative_integer(tree_["seed"], "seed"); }
unsigned RunConfig::jobs() const {
  return static_cast<unsigned>(non_negative_integer(tree_["jobs"], "jobs"));
}
std::string RunConfig::format() const { return tree_["format"].get<std::string>(); }
std::string RunConfig::out() const { return tree_["out"].get<std::string>(); }

void RunConfig::validate() const {
  try {
    scenario().validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  require(shots() >= 2, "'shots' must be >= 2");
  seed();
  const auto jobs_value = non_negative_integer(tree_["jobs"], "jobs");
  require(jobs_value >= 1 && jobs_value <= 1024, "'jobs' must lie in [1, 1024]");
  require(format() == "csv" || format() == "json", "'format' must be csv or json");
  const double step = tree_["qfi_step"].get<double>();
  require(step > 0.0 && step <= 1.0, "'qfi_step' must lie in (0, 1]");
  require(non_negative_integer(tree_["window_count"], "window_count") >= 1,
          "'window_count' must be >= 1");
  require(tree_["exact_limit"].get<double>() > 0.0, "'exact_limit' must be > 0");

  const auto& f3 = tree_["fig3"];
  check_numbers(f3["theta_grid"], "fig3.theta_grid", false);
  for (const auto& v : f3["theta_grid"]) {
    const double th = v.get<double>();
    require(th >= 0.0 && th <= std::numbers::pi, "'fig3.theta_grid' must lie within [0, pi]");
  }
  const double tmin = f3["theta_min"].get<double>(), tmax = f3["theta_max"].get<double>();
  require(tmin >= 0.0 && tmax <= std::numbers::pi && tmin <= tmax,
          "'fig3.theta_min/theta_max' must satisfy 0 <= min <= max <= pi");
  require(non_negative_integer(f3["theta_points"], "fig3.theta_points") >= 1,
          "'fig3.theta_points' must be >= 1");
  check_variants(f3["variants"], "fig3.variants");

  const auto& f4 = tree_["fig4"];
  require(!f4["N_B_grid"].empty(), "'fig4.N_B_grid' must not be empty");
  check_numbers(f4["N_B_grid"], "fig4.N_B_grid", true);
  require(f4["epsilon"].get<double>() >= 0.0, "'fig4.epsilon' must be >= 0");
  const double k4 = f4["kappa_E"].get<double>();
  require(k4 > 0.0 && k4 <= 1.0, "'fig4.kappa_E' must lie in (0, 1]");
  require(f4["N_S_fixed"].get<double>() >= 0.0, "'fig4.N_S_fixed' must be >= 0");
  check_variants(f4["variants"], "fig4.variants");

  const auto& f5 = tree_["fig5"];
  require(!f5["T_grid"].empty(), "'fig5.T_grid' must not be empty");
  check_numbers(f5["T_grid"], "fig5.T_grid", true);
  require(f5["sqrt_law_constant"].get<double>() > 0.0, "'fig5.sqrt_law_constant' must be > 0");
  require(f5["violate_ratio"].get<double>() > 0.0, "'fig5.violate_ratio' must be > 0");
  const double k5 = f5["kappa_E"].get<double>();
  require(k5 > 0.0 && k5 <= 1.0, "'fig5.kappa_E' must lie in (0, 1]");
  require(f5["N_B"].get<double>() >= 0.0, "'fig5.N_B' must be >= 0");
  check_variants(f5["variants"], "fig5.variants");

  const auto& g = tree_["grid"];
  const std::string param = g["param"].get<std::string>();
  bool known = false;
  for (const auto& f : kFields) known = known || param == f.name;
  require(known, "'grid.param' must name a scenario field, got '" + param + "'");
  check_numbers(g["values"], "grid.values", false);
  check_variants(g["variants"], "grid.variants");
}

}  // namespace covsense
