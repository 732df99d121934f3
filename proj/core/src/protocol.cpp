#include "covsense/protocol.hpp"

#include <array>
#include <cmath>

#include "covsense/errors.hpp"

namespace covsense {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw InvalidArgument(message);
}

void check_photons(double n, const char* what) {
  require(std::isfinite(n) && n >= 0.0, std::string(what) + " must be finite and >= 0");
}

}  // namespace

std::string_view to_string(ProtocolVariant v) {
  switch (v) {
    case ProtocolVariant::Entangled: return "entangled";
    case ProtocolVariant::ClassicalThermal: return "classical";
    case ProtocolVariant::CoherentBaseline: return "coherent";
  }
  return "unknown";
}

ProtocolVariant parse_variant(std::string_view name) {
  if (name == "entangled") return ProtocolVariant::Entangled;
  if (name == "classical" || name == "classical_thermal") return ProtocolVariant::ClassicalThermal;
  if (name == "coherent" || name == "coherent_baseline") return ProtocolVariant::CoherentBaseline;
  throw InvalidArgument("unknown protocol variant '" + std::string(name) + "'");
}

std::uint64_t SensingScenario::mode_count() const {
  const double m = std::round(W * T);
  return m < 1.0 ? 0 : static_cast<std::uint64_t>(m);
}

void SensingScenario::validate() const {
  check_photons(N_S, "N_S");
  check_photons(N_B, "N_B");
  check_photons(N_R, "N_R");
  require(kappa_T > 0.0 && kappa_T <= 1.0, "kappa_T must lie in (0, 1]");
  require(kappa_E > 0.0 && kappa_E <= 1.0, "kappa_E must lie in (0, 1]");
  require(kappa_I > 0.0 && kappa_I <= 1.0, "kappa_I must lie in (0, 1]");
  require(std::isfinite(W) && W > 0.0, "W must be > 0");
  require(std::isfinite(T) && T > 0.0, "T must be > 0");
  require(std::isfinite(theta), "theta must be finite");
  require(std::isfinite(G_pc) && G_pc >= 1.0, "G_pc must be >= 1");
  require(willie_fraction > 0.0 && willie_fraction <= 1.0, "willie_fraction must lie in (0, 1]");
  require(mode_count() >= 1, "W * T must round to at least one mode");
}

GaussianState tmsv(double n_signal) {
  check_photons(n_signal, "N_S");
  const std::array<ModeLabel, 2> modes{ModeLabel(kSignal), ModeLabel(kIdler)};
  return apply_two_mode_squeeze(vacuum({modes[0], modes[1]}), modes[0], modes[1],
                                1.0 + n_signal);
}

GaussianState split_thermal(double n_signal, double n_reference) {
  check_photons(n_signal, "N_S");
  check_photons(n_reference, "N_R");
  const double total = n_signal + n_reference;
  GaussianState source = tensor(thermal_state(total, ModeLabel(kSignal)),
                                vacuum({ModeLabel(kReference)}));
  if (total == 0.0) return source;
  return apply_beamsplitter(source, kSignal, kReference, n_signal / total);
}

GaussianState split_thermal(double n_signal) { return split_thermal(n_signal, n_signal); }

GaussianState coherent_probe(double n_signal) {
  check_photons(n_signal, "N_S");
  return coherent_state({std::sqrt(n_signal), 0.0}, ModeLabel(kSignal));
}

GaussianState source_state(const SensingScenario& scenario, ProtocolVariant variant) {
  switch (variant) {
    case ProtocolVariant::Entangled: return tmsv(scenario.N_S);
    case ProtocolVariant::ClassicalThermal: return split_thermal(scenario.N_S, scenario.N_R);
    case ProtocolVariant::CoherentBaseline: return coherent_probe(scenario.N_S);
  }
  throw InvalidArgument("unhandled protocol variant");
}

GaussianState build_receiver_input(const SensingScenario& scenario, ProtocolVariant variant) {
  scenario.validate();
  GaussianState state = source_state(scenario, variant);
  state = apply_phase(state, kSignal, scenario.theta);
  state = apply_thermal_loss(state, kSignal, scenario.kappa(), scenario.N_B);
  switch (variant) {
    case ProtocolVariant::Entangled:
      return apply_thermal_loss(state, kIdler, scenario.kappa_I, 0.0);
    case ProtocolVariant::ClassicalThermal:
      return apply_thermal_loss(state, kReference, scenario.kappa_I, 0.0);
    case ProtocolVariant::CoherentBaseline:
      return state;
  }
  throw InvalidArgument("unhandled protocol variant");
}

double willie_signal_photons(const SensingScenario& scenario) {
  return scenario.willie_fraction * (1.0 - scenario.kappa_E) * scenario.kappa_T * scenario.N_S;
}

GaussianState willie_marginal(const SensingScenario& scenario, ProtocolVariant variant,
                              bool signal_present) {
  scenario.validate();
  const ModeLabel label(kWillie);
  if (!signal_present) return thermal_state(scenario.N_B, label);
  const double captured = willie_signal_photons(scenario);
  if (variant == ProtocolVariant::CoherentBaseline) {
    GaussianState s = thermal_state(scenario.N_B, label);
    Vector mean(2);
    mean << 2.0 * std::sqrt(captured), 0.0;
    return GaussianState(s.labels(), mean, s.cov());
  }
  return thermal_state(scenario.N_B + captured, label);
}

}  // namespace covsense
