#pragma once

#include <cstdint>

#include "covsense/gaussian.hpp"
#include "covsense/protocol.hpp"

namespace covsense {

/// Per-mode statistics of a balanced difference count.
struct ReceiverStats {
  double mean_diff = 0.0;    ///< photons per mode at scenario.theta
  double var_diff = 0.0;     ///< photons^2 per mode at scenario.theta
  double calib_scale = 0.0;  ///< mean_diff at theta = 0; mean_diff(theta) = A cos(theta)
  /// Mean photons per mode at the two photodetectors.
  double detector_mean_a = 0.0;
  double detector_mean_b = 0.0;
  ProtocolVariant variant = ProtocolVariant::Entangled;
  SensingScenario scenario;
};

/// Phase-conjugate receiver: the return is conjugated by two-mode squeezing
/// with a vacuum auxiliary (gain G_pc), the conjugate interferes with the idler
/// on a 50:50 beamsplitter, and the output is the difference count.
ReceiverStats pcr_stats(const SensingScenario& scenario);

/// Balanced receiver for the thermal probe: return and reference on a 50:50
/// beamsplitter, difference count.
ReceiverStats hr_stats(const SensingScenario& scenario);

/// Balanced homodyne for the coherent probe against a local oscillator of
/// brightness kappa_I * N_R.
ReceiverStats homodyne_stats(const SensingScenario& scenario);

/// Dispatches to the receiver paired with each variant.
ReceiverStats receiver_stats(const SensingScenario& scenario, ProtocolVariant variant);

/// Raw difference statistics of a variant's receiver at an arbitrary phase.
DifferenceStats receiver_difference(const SensingScenario& scenario, ProtocolVariant variant);

struct EstimatorSample {
  double cos_hat = 0.0;
  double theta_hat = 0.0;  ///< arccos(clamp(cos_hat, -1, 1)), in [0, pi]
};

/// cos_hat = total / (M A); throws CalibrationError when A = 0.
EstimatorSample cosine_estimator(const ReceiverStats& stats, std::uint64_t modes,
                                 double total_diff_count);

struct TheoryMse {
  double var_cos = 0.0;
  double var_theta = 0.0;
  bool reliable = true;  ///< false when |sin theta| < 0.1
};

/// var_cos = var_diff / (M A^2) and the delta-method phase variance
/// var_cos / sin^2(theta). `stats` must be evaluated at `theta`.
TheoryMse theory_mse(const ReceiverStats& stats, std::uint64_t modes, double theta);

}  // namespace covsense
