#pragma once

#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>

#include "covsense/gaussian.hpp"

namespace covsense {

enum class ProtocolVariant { Entangled, ClassicalThermal, CoherentBaseline };

std::string_view to_string(ProtocolVariant v);
/// Accepts "entangled", "classical" / "classical_thermal", "coherent" / "coherent_baseline".
ProtocolVariant parse_variant(std::string_view name);

/// All parameters of one sensing experiment point.
///
/// kappa_T is the transmitter-internal transmissivity, kappa_E the environment
/// transmissivity, and kappa = kappa_T * kappa_E the overall source-to-receiver
/// transmissivity. N_B is referred to the receiver input. N_R is the per-mode
/// brightness of the locally kept reference arm for the classical and coherent
/// variants; it never reaches the adversary.
struct SensingScenario {
  double N_S = 8e-4;
  double N_B = 160.0;
  double kappa_T = 0.0165 / 0.36;
  double kappa_E = 0.36;
  double kappa_I = 0.9;
  double W = 2e12;
  double T = 125e-6;
  double theta = std::numbers::pi / 2;
  double G_pc = 1.1;
  double willie_fraction = 1.0;
  double N_R = 100.0;

  /// M = round(W * T).
  std::uint64_t mode_count() const;
  double kappa() const { return kappa_T * kappa_E; }
  /// Throws InvalidArgument naming the first offending field.
  void validate() const;

  bool operator==(const SensingScenario&) const = default;
};

inline constexpr double kMaxProbePhotons = 10.0;

// Mode labels used by the protocol states.
inline constexpr std::string_view kSignal = "S";
inline constexpr std::string_view kIdler = "I";
inline constexpr std::string_view kReference = "R";
inline constexpr std::string_view kWillie = "W";

/// Two-mode squeezed vacuum over (S, I) with N_S photons per arm.
GaussianState tmsv(double n_signal);

/// Thermal source of mean N_S + N_R split so that the signal arm S carries N_S
/// and the reference arm R carries N_R. With N_R = N_S this is a 50:50 split of
/// a thermal source of mean 2 N_S.
GaussianState split_thermal(double n_signal, double n_reference);
GaussianState split_thermal(double n_signal);

/// Coherent probe on S with |alpha|^2 = N_S (real amplitude).
GaussianState coherent_probe(double n_signal);

/// Probe state for a variant before any propagation.
GaussianState source_state(const SensingScenario& scenario, ProtocolVariant variant);

/// Propagated state at the receiver: the phase object and the thermal-loss
/// channel (kappa_T * kappa_E, N_B) act on S, storage loss kappa_I acts on the
/// idler or reference. The coherent baseline yields the single mode S.
GaussianState build_receiver_input(const SensingScenario& scenario, ProtocolVariant variant);

/// Single-mode state seen by the adversary, labelled W. Thermal with mean N_B
/// when the probe is absent and N_B + f_W (1 - kappa_E) kappa_T N_S when present
/// (displaced rather than thermal for the coherent baseline).
GaussianState willie_marginal(const SensingScenario& scenario, ProtocolVariant variant,
                              bool signal_present);

/// Mean photon number captured by the adversary from the probe alone.
double willie_signal_photons(const SensingScenario& scenario);

}  // namespace covsense
