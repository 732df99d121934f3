#pragma once

// Gaussian-versus-Fock comparison of one desk-scale scenario, shared by the unit
// suite and the acceptance runner.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "covsense/adversary.hpp"
#include "covsense/fock.hpp"
#include "covsense/gaussian.hpp"
#include "covsense/metrology.hpp"
#include "covsense/receivers.hpp"
#include "oracle_pipelines.hpp"

namespace covsense::testing {

struct OracleComparison {
  double stats_error = 0.0;     ///< photon moments of the receiver input
  double matrix_error = 0.0;    ///< elementwise, Fock pipeline vs from_gaussian
  double pcr_error = 0.0;       ///< PCR difference mean / variance
  double hr_error = 0.0;        ///< HR difference mean / variance
  double qfi_rel_error = 0.0;   ///< max over entangled and classical
  double fidelity_error = 0.0;  ///< Gaussian fidelity and thermal fidelity
  double entropy_error = 0.0;   ///< thermal relative entropy
  std::vector<std::string> notes;
};

inline double scaled(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

inline OracleComparison compare_with_oracle(const SensingScenario& s) {
  OracleComparison r;
  const std::vector<ModeLabel> ent_modes = {ModeLabel(kSignal), ModeLabel(kIdler)};
  const std::vector<ModeLabel> cls_modes = {ModeLabel(kSignal), ModeLabel(kReference)};

  // Receiver-input photon statistics and matrix elements.
  for (ProtocolVariant v : {ProtocolVariant::Entangled, ProtocolVariant::ClassicalThermal}) {
    const auto& modes = v == ProtocolVariant::Entangled ? ent_modes : cls_modes;
    const GaussianState g = build_receiver_input(s, v);
    const PhotonStats gs = photon_stats(g, modes);
    const fock::FockState f = fock_receiver_input(s, v);
    for (std::size_t m = 0; m < 2; ++m) {
      r.stats_error = std::max(r.stats_error, scaled(fock::photon_mean(f, m), gs.mean(modes[m])));
      r.stats_error = std::max(
          r.stats_error, scaled(fock::photon_covariance(f, m, m), gs.variance(modes[m])));
    }
    r.stats_error = std::max(r.stats_error, scaled(fock::photon_covariance(f, 0, 1),
                                                   gs.covariance(modes[0], modes[1])));
    const fock::FockState fg = fock::from_gaussian(g, f.cutoffs);
    r.matrix_error = std::max(r.matrix_error, (fg.rho - f.rho).cwiseAbs().maxCoeff());
  }

  // Receivers.
  const DifferenceStats gp = receiver_difference(s, ProtocolVariant::Entangled);
  const fock::Moments fp = fock_pcr_difference(s);
  r.pcr_error = std::max(scaled(fp.mean, gp.mean), scaled(fp.variance, gp.variance));
  const DifferenceStats gh = receiver_difference(s, ProtocolVariant::ClassicalThermal);
  const fock::Moments fh = fock_hr_difference(s);
  r.hr_error = std::max(scaled(fh.mean, gh.mean), scaled(fh.variance, gh.variance));

  // QFI: coarser cutoffs suffice at the 1% level.
  for (ProtocolVariant v : {ProtocolVariant::Entangled, ProtocolVariant::ClassicalThermal}) {
    const double j_gauss = qfi_phase(s, v).J;
    const double j_fock = fock::phase_qfi(fock_receiver_input(s, v, 1e-6), 0);
    r.qfi_rel_error = std::max(r.qfi_rel_error, std::abs(j_gauss - j_fock) / j_fock);
  }

  // Fidelities between receiver inputs at two phases, and adversary marginals.
  SensingScenario shifted = s;
  shifted.theta = s.theta + 0.4;
  const double f_gauss = gaussian_fidelity(build_receiver_input(s, ProtocolVariant::Entangled),
                                           build_receiver_input(shifted, ProtocolVariant::Entangled));
  const double f_fock = fock::fidelity(fock_receiver_input(s, ProtocolVariant::Entangled, 1e-8),
                                       fock_receiver_input(shifted, ProtocolVariant::Entangled, 1e-8));
  r.fidelity_error = std::abs(f_gauss - f_fock);

  const double n0 = s.N_B, n1 = s.N_B + willie_signal_photons(s) + 0.05;
  const int c = cutoff_for(n1, 1e-12);
  const fock::FockState t0 = fock::thermal(n0, c), t1 = fock::thermal(n1, c);
  if (n0 > 0.0) {
    r.fidelity_error = std::max(r.fidelity_error, std::abs(thermal_fidelity(n0, n1) -
                                                           fock::fidelity(t0, t1)));
    r.fidelity_error = std::max(
        r.fidelity_error,
        std::abs(gaussian_fidelity(thermal_state(n0), thermal_state(n1)) - fock::fidelity(t0, t1)));
    r.entropy_error = std::abs(thermal_rel_entropy(n1, n0) - fock::rel_entropy(t1, t0));
  } else {
    r.notes.push_back("N_B = 0: relative entropy against vacuum skipped");
  }
  return r;
}

}  // namespace covsense::testing
