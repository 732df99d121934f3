#include "covsense/experiments.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>

#include "covsense/adversary.hpp"
#include "covsense/errors.hpp"
#include "covsense/metrology.hpp"
#include "covsense/montecarlo.hpp"

namespace covsense {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<ProtocolVariant> variants_of(const ConfigTree& arr) {
  std::vector<ProtocolVariant> out;
  for (const auto& v : arr) out.push_back(parse_variant(v.get<std::string>()));
  return out;
}

std::vector<double> numbers_of(const ConfigTree& arr) {
  std::vector<double> out;
  for (const auto& v : arr) out.push_back(v.get<double>());
  return out;
}

CountingOptions counting_options(const RunConfig& c) {
  CountingOptions o;
  o.window_count = c.tree()["window_count"].get<std::uint64_t>();
  o.exact_limit = c.tree()["exact_limit"].get<double>();
  return o;
}

struct Task {
  std::string label;
  std::function<std::vector<Cell>()> row;
};

// Evaluates independent row tasks (possibly in parallel) and keeps grid order.
ExperimentOutput evaluate(std::string command, std::vector<std::string> columns,
                          const std::vector<Task>& tasks, unsigned jobs) {
  std::vector<std::optional<std::vector<Cell>>> rows(tasks.size());
  std::vector<std::string> errors(tasks.size());
  parallel_for(tasks.size(), jobs, [&](std::size_t i) {
    try {
      rows[i] = tasks[i].row();
    } catch (const std::exception& e) {
      errors[i] = tasks[i].label + ": " + e.what();
    }
  });
  ExperimentOutput out;
  out.command = std::move(command);
  out.table.columns = std::move(columns);
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (rows[i]) {
      out.table.add_row(std::move(*rows[i]));
    } else {
      out.failures.push_back(errors[i]);
    }
  }
  return out;
}

const std::vector<std::string> kEstimationColumns = {
    "variant", "theta",    "N_S",       "N_B",          "M",              "cos_mean",
    "theta_mean", "mse_cos", "mse_theta", "rms_cos",     "rms_theta",      "stderr_mse_theta",
    "theory_mse_cos", "theory_mse", "qcrb", "epsilon", "pe_exact", "seed"};

std::vector<Cell> estimation_cells(const EstimationResult& r, const CovertnessReport& cov) {
  const auto& s = r.scenario;
  return {std::string(to_string(r.variant)),
          s.theta,
          s.N_S,
          s.N_B,
          s.mode_count(),
          r.cos_mean,
          r.theta_mean,
          r.mse_cos,
          r.mse_theta,
          r.rms_cos,
          r.rms_theta,
          r.stderr_theta,
          r.theory_mse_cos,
          r.theory_mse,
          r.qcrb,
          cov.epsilon,
          cov.pe_exact ? cov.pe_exact->pe : kNaN,
          r.seed};
}

std::vector<std::string> with_prefix(std::vector<std::string> prefix,
                                     const std::vector<std::string>& rest) {
  prefix.insert(prefix.end(), rest.begin(), rest.end());
  return prefix;
}

std::vector<Cell> with_prefix(std::vector<Cell> prefix, std::vector<Cell> rest) {
  prefix.insert(prefix.end(), std::make_move_iterator(rest.begin()),
                std::make_move_iterator(rest.end()));
  return prefix;
}

struct EstimationSettings {
  std::uint64_t shots;
  std::uint64_t seed;
  double qfi_step;
  CountingOptions counting;
  bool noise_free = false;
};

EstimationSettings estimation_settings(const RunConfig& c) {
  return {c.shots(), c.seed(), c.tree()["qfi_step"].get<double>(), counting_options(c)};
}

std::vector<Cell> estimate_row(const SensingScenario& s, ProtocolVariant v, std::uint64_t stream,
                               const EstimationSettings& st) {
  SimulationOptions opts;
  opts.stream = stream;
  opts.noise_free = st.noise_free;
  opts.with_qcrb = false;
  EstimationResult r = simulate(s, v, st.shots, st.seed, opts);
  r.qcrb = qfi_phase(s, v, {.step = st.qfi_step}).qcrb_var;
  return estimation_cells(r, covertness_report(s, v, st.counting));
}

std::string point_label(std::string_view command, ProtocolVariant v, std::string_view name,
                        double value) {
  return std::string(command) + " variant=" + std::string(to_string(v)) + " " +
         std::string(name) + "=" + format_cell(value);
}

// Generic grid over one scenario field; an empty value list means the base scenario.
std::vector<std::pair<double, SensingScenario>> generic_grid(const RunConfig& c) {
  const SensingScenario base = c.scenario();
  const std::string param = c.tree()["grid"]["param"].get<std::string>();
  std::vector<double> values = numbers_of(c.tree()["grid"]["values"]);
  if (values.empty()) values.push_back(scenario_field(base, param));
  std::vector<std::pair<double, SensingScenario>> out;
  for (double v : values) {
    SensingScenario s = base;
    set_scenario_field(s, param, v);
    out.emplace_back(v, s);
  }
  return out;
}

}  // namespace

std::string version_string() { return COVSENSE_VERSION; }

ExperimentOutput run_fig3(const RunConfig& c) {
  const auto& f = c.tree()["fig3"];
  std::vector<double> thetas = numbers_of(f["theta_grid"]);
  if (thetas.empty()) {
    thetas = linear_grid(f["theta_min"].get<double>(), f["theta_max"].get<double>(),
                         f["theta_points"].get<std::size_t>());
  }
  EstimationSettings st = estimation_settings(c);
  st.noise_free = f["noise_free"].get<bool>();
  const SensingScenario base = c.scenario();
  std::vector<Task> tasks;
  std::uint64_t stream = 0;
  for (ProtocolVariant v : variants_of(f["variants"])) {
    for (double th : thetas) {
      SensingScenario s = base;
      s.theta = th;
      const std::uint64_t id = stream++;
      tasks.push_back({point_label("fig3", v, "theta", th),
                       [s, v, id, st] { return estimate_row(s, v, id, st); }});
    }
  }
  return evaluate("fig3", kEstimationColumns, tasks, c.jobs());
}

ExperimentOutput run_fig4(const RunConfig& c) {
  const auto& f = c.tree()["fig4"];
  const EstimationSettings st = estimation_settings(c);
  const double eps = f["epsilon"].get<double>();
  const double ns_fixed = f["N_S_fixed"].get<double>();
  SensingScenario base = c.scenario();
  base.kappa_E = f["kappa_E"].get<double>();
  std::vector<Task> tasks;
  std::uint64_t stream = 0;
  for (const std::string regime : {"fixed_covertness", "fixed_power"}) {
    for (ProtocolVariant v : variants_of(f["variants"])) {
      for (double nb : numbers_of(f["N_B_grid"])) {
        SensingScenario s = base;
        s.N_B = nb;
        const std::uint64_t id = stream++;
        const bool covert = regime == "fixed_covertness";
        tasks.push_back({point_label("fig4 " + regime, v, "N_B", nb), [=] {
                           SensingScenario p = s;
                           p.N_S = covert ? solve_ns_for_epsilon(eps, p, v) : ns_fixed;
                           return with_prefix({regime}, estimate_row(p, v, id, st));
                         }});
      }
    }
  }
  return evaluate("fig4", with_prefix({"regime"}, kEstimationColumns), tasks, c.jobs());
}

ExperimentOutput run_fig5(const RunConfig& c) {
  const auto& f = c.tree()["fig5"];
  const EstimationSettings st = estimation_settings(c);
  SensingScenario base = c.scenario();
  base.kappa_E = f["kappa_E"].get<double>();
  base.N_B = f["N_B"].get<double>();
  const std::vector<double> t_grid = numbers_of(f["T_grid"]);
  const double constant = f["sqrt_law_constant"].get<double>();
  const double ratio = f["violate_ratio"].get<double>();

  ExperimentOutput out;
  std::vector<Task> tasks;
  std::vector<std::string> schedule_errors;
  std::uint64_t stream = 0;
  for (const std::string schedule : {"obey", "violate"}) {
    std::vector<SensingScenario> points;
    try {
      points = schedule == "obey" ? sqrt_law_schedule(constant, t_grid, base)
                                  : fixed_ratio_schedule(ratio, t_grid, base);
    } catch (const std::exception& e) {
      schedule_errors.push_back("fig5 schedule=" + schedule + ": " + e.what());
      continue;
    }
    for (ProtocolVariant v : variants_of(f["variants"])) {
      for (const auto& s : points) {
        const std::uint64_t id = stream++;
        tasks.push_back({point_label("fig5 " + schedule, v, "T", s.T), [=] {
                           SimulationOptions opts;
                           opts.stream = id;
                           opts.with_qcrb = false;
                           const EstimationResult r = simulate(s, v, st.shots, st.seed, opts);
                           const double qcrb = qfi_phase(s, v, {.step = st.qfi_step}).qcrb_var;
                           const CovertnessReport cov = covertness_report(s, v, st.counting);
                           return std::vector<Cell>{
                               schedule,
                               s.T,
                               std::string(to_string(v)),
                               s.N_S,
                               s.N_B,
                               s.mode_count(),
                               cov.epsilon,
                               cov.pe_exact ? cov.pe_exact->pe : kNaN,
                               cov.pe_lower_fidelity,
                               cov.pe_exact ? std::string(to_string(cov.pe_exact->method))
                                            : std::string("none"),
                               r.mse_theta,
                               r.stderr_theta,
                               r.theory_mse,
                               qcrb,
                               r.seed};
                         }});
      }
    }
  }
  out = evaluate("fig5",
                 {"schedule", "T", "variant", "N_S", "N_B", "M", "epsilon", "pe_exact",
                  "pe_lower", "method", "mse_theta", "stderr_mse_theta", "theory_mse", "qcrb",
                  "seed"},
                 tasks, c.jobs());
  out.failures.insert(out.failures.begin(), schedule_errors.begin(), schedule_errors.end());
  return out;
}

ExperimentOutput run_qcrb(const RunConfig& c) {
  const std::string param = c.tree()["grid"]["param"].get<std::string>();
  const double step = c.tree()["qfi_step"].get<double>();
  std::vector<Task> tasks;
  for (ProtocolVariant v : variants_of(c.tree()["grid"]["variants"])) {
    for (const auto& [value, s] : generic_grid(c)) {
      tasks.push_back({point_label("qcrb", v, param, value), [=] {
                         const QfiResult q = qfi_phase(s, v, {.step = step});
                         const ReceiverStats stats = receiver_stats(s, v);
                         const double j_rec = receiver_fisher(stats, s.theta);
                         return std::vector<Cell>{std::string(to_string(v)),
                                                  param,
                                                  value,
                                                  s.N_S,
                                                  s.N_B,
                                                  s.theta,
                                                  s.mode_count(),
                                                  q.J,
                                                  q.qcrb_var,
                                                  q.richardson_error,
                                                  j_rec,
                                                  q.J > 0.0 ? j_rec / q.J : kNaN};
                       }});
    }
  }
  return evaluate("qcrb",
                  {"variant", "param", "value", "N_S", "N_B", "theta", "M", "J", "qcrb_var",
                   "richardson_error", "J_rec", "efficiency"},
                  tasks, c.jobs());
}

ExperimentOutput run_covertness(const RunConfig& c) {
  const std::string param = c.tree()["grid"]["param"].get<std::string>();
  const CountingOptions counting = counting_options(c);
  std::vector<Task> tasks;
  for (ProtocolVariant v : variants_of(c.tree()["grid"]["variants"])) {
    for (const auto& [value, s] : generic_grid(c)) {
      tasks.push_back({point_label("covertness", v, param, value), [=] {
                         const CovertnessReport r = covertness_report(s, v, counting);
                         const bool exact = r.pe_exact.has_value();
                         return std::vector<Cell>{
                             std::string(to_string(v)),
                             param,
                             value,
                             r.n0,
                             r.n1,
                             r.modes,
                             r.epsilon,
                             r.pe_lower_fidelity,
                             exact ? r.pe_exact->pe : kNaN,
                             exact ? std::string(to_string(r.pe_exact->method)) : std::string("none"),
                             exact ? Cell(r.pe_exact->threshold) : Cell(kNaN),
                             r.rel_entropy_per_mode};
                       }});
    }
  }
  return evaluate("covertness",
                  {"variant", "param", "value", "n0", "n1", "M", "epsilon", "pe_lower",
                   "pe_exact", "method", "threshold", "rel_entropy"},
                  tasks, c.jobs());
}

ExperimentOutput run_sweep(const RunConfig& c) {
  const std::string param = c.tree()["grid"]["param"].get<std::string>();
  const EstimationSettings st = estimation_settings(c);
  std::vector<Task> tasks;
  for (ProtocolVariant v : variants_of(c.tree()["grid"]["variants"])) {
    std::uint64_t stream = 0;
    for (const auto& [value, s] : generic_grid(c)) {
      const std::uint64_t id = stream++;
      tasks.push_back({point_label("sweep", v, param, value), [=] {
                         return with_prefix({param, value}, estimate_row(s, v, id, st));
                       }});
    }
  }
  return evaluate("sweep", with_prefix({"param", "value"}, kEstimationColumns), tasks, c.jobs());
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"fig3", "fig4", "fig5",
                                                 "qcrb", "covertness", "sweep"};
  return names;
}

ExperimentOutput run_command(std::string_view command, const RunConfig& config) {
  config.validate();
  if (command == "fig3") return run_fig3(config);
  if (command == "fig4") return run_fig4(config);
  if (command == "fig5") return run_fig5(config);
  if (command == "qcrb") return run_qcrb(config);
  if (command == "covertness") return run_covertness(config);
  if (command == "sweep") return run_sweep(config);
  throw ConfigError("unknown command '" + std::string(command) + "'");
}

void write_output(std::ostream& out, const ExperimentOutput& output, const RunConfig& config) {
  const OutputHeader header{version_string(), output.command, config.seed(), config.tree()};
  if (config.format() == "json") {
    write_json(out, header, output.table);
  } else {
    write_csv(out, header, output.table);
  }
}

}  // namespace covsense
