#pragma once

#include <cstdint>

#include "covsense/gaussian.hpp"
#include "covsense/protocol.hpp"
#include "covsense/receivers.hpp"

namespace covsense {

/// Uhlmann root fidelity tr sqrt(sqrt(a) b sqrt(a)) between Gaussian states over
/// the same number of modes. Evaluated in extended precision; symmetric up to
/// rounding and clamped to [0, 1].
double gaussian_fidelity(const GaussianState& a, const GaussianState& b);

struct QfiOptions {
  /// Largest finite-difference step; the two smaller steps are step/2 and step/4.
  double step = 0.2;
  /// Richardson error tolerated relative to J.
  double rel_tolerance = 1e-3;
};

struct QfiResult {
  double J = 0.0;         ///< per mode pair, rad^-2
  double qcrb_var = 0.0;  ///< 1 / (M J); +inf when J = 0
  double step = 0.0;      ///< smallest step used
  double richardson_error = 0.0;
};

/// Phase QFI of the full receiver-input state from J(h) = 8 (1 - F(rho(theta - h/2),
/// rho(theta + h/2))) / h^2, extrapolated over three steps.
/// Throws ConvergenceError when the extrapolations disagree by more than
/// rel_tolerance * J.
QfiResult qfi_phase(const SensingScenario& scenario, ProtocolVariant variant,
                    const QfiOptions& options = {});

/// Classical Fisher information per mode of the Gaussian-approximated
/// difference count: A^2 sin^2(theta) / var_diff. `stats` must be evaluated at theta.
double receiver_fisher(const ReceiverStats& stats, double theta);

}  // namespace covsense
