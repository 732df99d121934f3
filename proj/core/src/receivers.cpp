#include "covsense/receivers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "covsense/errors.hpp"

namespace covsense {

namespace {

constexpr std::string_view kConjugate = "C";
constexpr std::string_view kLocalOscillator = "L";

struct Readout {
  DifferenceStats diff;
  double mean_a = 0.0;
  double mean_b = 0.0;
};

Readout pcr_readout(const SensingScenario& s) {
  GaussianState state = build_receiver_input(s, ProtocolVariant::Entangled);
  state = tensor(state, vacuum({ModeLabel(kConjugate)}));
  state = apply_two_mode_squeeze(state, kConjugate, kSignal, s.G_pc);
  state = apply_beamsplitter(state, kConjugate, kIdler, 0.5);
  return {difference_stats(state, kConjugate, kIdler), photon_mean(state, kConjugate),
          photon_mean(state, kIdler)};
}

Readout hr_readout(const SensingScenario& s) {
  GaussianState state = build_receiver_input(s, ProtocolVariant::ClassicalThermal);
  state = apply_beamsplitter(state, kSignal, kReference, 0.5);
  return {difference_stats(state, kSignal, kReference), photon_mean(state, kSignal),
          photon_mean(state, kReference)};
}

Readout homodyne_readout(const SensingScenario& s) {
  GaussianState state = build_receiver_input(s, ProtocolVariant::CoherentBaseline);
  state = tensor(state, coherent_state({std::sqrt(s.kappa_I * s.N_R), 0.0},
                                       ModeLabel(kLocalOscillator)));
  state = apply_beamsplitter(state, kSignal, kLocalOscillator, 0.5);
  return {difference_stats(state, kSignal, kLocalOscillator), photon_mean(state, kSignal),
          photon_mean(state, kLocalOscillator)};
}

Readout readout(const SensingScenario& s, ProtocolVariant v) {
  switch (v) {
    case ProtocolVariant::Entangled: return pcr_readout(s);
    case ProtocolVariant::ClassicalThermal: return hr_readout(s);
    case ProtocolVariant::CoherentBaseline: return homodyne_readout(s);
  }
  throw InvalidArgument("unhandled protocol variant");
}

ReceiverStats calibrated(const SensingScenario& s, ProtocolVariant v) {
  const Readout at_theta = readout(s, v);
  SensingScenario zero = s;
  zero.theta = 0.0;
  const Readout at_zero = readout(zero, v);
  ReceiverStats out;
  out.mean_diff = at_theta.diff.mean;
  out.var_diff = at_theta.diff.variance;
  out.calib_scale = at_zero.diff.mean;
  out.detector_mean_a = at_theta.mean_a;
  out.detector_mean_b = at_theta.mean_b;
  out.variant = v;
  out.scenario = s;
  return out;
}

void require_calibrated(const ReceiverStats& stats) {
  if (!(std::abs(stats.calib_scale) > std::numeric_limits<double>::min()) ||
      !std::isfinite(stats.calib_scale)) {
    throw CalibrationError("receiver calibration scale is zero (no phase-sensitive correlation)");
  }
}

}  // namespace

ReceiverStats pcr_stats(const SensingScenario& scenario) {
  return calibrated(scenario, ProtocolVariant::Entangled);
}

ReceiverStats hr_stats(const SensingScenario& scenario) {
  return calibrated(scenario, ProtocolVariant::ClassicalThermal);
}

ReceiverStats homodyne_stats(const SensingScenario& scenario) {
  return calibrated(scenario, ProtocolVariant::CoherentBaseline);
}

ReceiverStats receiver_stats(const SensingScenario& scenario, ProtocolVariant variant) {
  return calibrated(scenario, variant);
}

DifferenceStats receiver_difference(const SensingScenario& scenario, ProtocolVariant variant) {
  return readout(scenario, variant).diff;
}

EstimatorSample cosine_estimator(const ReceiverStats& stats, std::uint64_t modes,
                                 double total_diff_count) {
  require_calibrated(stats);
  if (modes < 1) throw InvalidArgument("mode count must be >= 1");
  const double cos_hat = total_diff_count / (static_cast<double>(modes) * stats.calib_scale);
  return {cos_hat, std::acos(std::clamp(cos_hat, -1.0, 1.0))};
}

TheoryMse theory_mse(const ReceiverStats& stats, std::uint64_t modes, double theta) {
  require_calibrated(stats);
  if (modes < 1) throw InvalidArgument("mode count must be >= 1");
  const double s = std::sin(theta);
  if (std::abs(s) < 1e-12) {
    throw SingularityError("delta-method phase variance is singular at theta = 0 or pi");
  }
  TheoryMse out;
  out.var_cos = stats.var_diff /
                (static_cast<double>(modes) * stats.calib_scale * stats.calib_scale);
  out.var_theta = out.var_cos / (s * s);
  out.reliable = std::abs(s) >= 0.1;
  return out;
}

}  // namespace covsense
