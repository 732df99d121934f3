#pragma once

// Repeated sensing shots drawn from aggregate receiver statistics.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "covsense/protocol.hpp"
#include "covsense/receivers.hpp"

namespace covsense {

/// Counter-based generator: every draw is a pure function of
/// (seed, stream, counter), so any schedule of parallel work reproduces
/// the same numbers.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  std::uint64_t bits(std::uint64_t counter) const;
  /// Uniform on (0, 1).
  double uniform(std::uint64_t counter) const;
  /// Standard normal via Box-Muller on counters (2k, 2k+1).
  double normal(std::uint64_t index) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
};

struct SimulationOptions {
  std::uint64_t stream = 0;
  /// Draw every shot at its mean (var_diff treated as zero).
  bool noise_free = false;
  /// Compute the QCRB column (one QFI evaluation per run).
  bool with_qcrb = true;
  /// Minimum of M times the smaller detector mean for the aggregate-count model.
  double clt_threshold = 100.0;
};

struct EstimationResult {
  ProtocolVariant variant = ProtocolVariant::Entangled;
  SensingScenario scenario;
  double theta_true = 0.0;  ///< principal value arccos(cos theta)
  std::vector<EstimatorSample> samples;
  double cos_mean = 0.0;
  double theta_mean = 0.0;
  double mse_cos = 0.0;
  double mse_theta = 0.0;
  double rms_cos = 0.0;
  double rms_theta = 0.0;
  double stderr_cos = 0.0;    ///< jackknife standard error of mse_cos
  double stderr_theta = 0.0;  ///< jackknife standard error of mse_theta
  double theory_mse_cos = 0.0;
  double theory_mse = 0.0;  ///< delta-method var_theta; NaN where sin(theta) = 0
  bool theory_reliable = true;
  double qcrb = 0.0;  ///< NaN when not computed
  std::uint64_t seed = 0;
};

/// K shots of the aggregate difference count ~ Normal(M mean_diff, M var_diff),
/// one calibration per run. Throws GuardError when M * min(detector means) is
/// below the CLT threshold and InvalidArgument for K < 2.
EstimationResult simulate(const SensingScenario& scenario, ProtocolVariant variant,
                          std::uint64_t shots, std::uint64_t seed,
                          const SimulationOptions& options = {});

struct SweepPoint {
  std::optional<EstimationResult> result;
  std::string error;  ///< non-empty when the point failed
};

/// One simulate() per grid point with stream = point index. Failures are
/// recorded per point and do not stop the sweep. Output order follows the grid
/// for any job count.
std::vector<SweepPoint> sweep(std::span<const SensingScenario> grid, ProtocolVariant variant,
                              std::uint64_t shots, std::uint64_t seed, unsigned jobs = 1,
                              const SimulationOptions& options = {});

/// Runs f(i) for i in [0, n) on up to `jobs` threads.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& f);

}  // namespace covsense
