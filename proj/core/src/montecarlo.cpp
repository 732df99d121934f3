#include "covsense/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <thread>

#include "covsense/errors.hpp"
#include "covsense/metrology.hpp"

namespace covsense {

namespace {

std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct Moments {
  double mse = 0.0;
  double stderr_ = 0.0;
};

// Mean of squared errors and its jackknife standard error (for a sample mean
// the jackknife reduces to the sample standard deviation over sqrt(K)).
Moments squared_error_moments(const std::vector<double>& errors) {
  const double k = static_cast<double>(errors.size());
  double sum = 0.0;
  for (double e : errors) sum += e * e;
  const double mean = sum / k;
  double ss = 0.0;
  for (double e : errors) ss += (e * e - mean) * (e * e - mean);
  return {mean, std::sqrt(ss / (k - 1.0) / k)};
}

}  // namespace

std::uint64_t CounterRng::bits(std::uint64_t counter) const {
  return mix(mix(mix(seed_) ^ stream_) ^ counter);
}

double CounterRng::uniform(std::uint64_t counter) const {
  return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t index) const {
  const double u1 = uniform(2 * index);
  const double u2 = uniform(2 * index + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

EstimationResult simulate(const SensingScenario& scenario, ProtocolVariant variant,
                          std::uint64_t shots, std::uint64_t seed,
                          const SimulationOptions& options) {
  if (shots < 2) throw InvalidArgument("at least two shots are required");
  const ReceiverStats stats = receiver_stats(scenario, variant);
  if (stats.calib_scale == 0.0) {
    throw CalibrationError("receiver calibration scale is zero (no phase-sensitive correlation)");
  }
  const std::uint64_t modes = scenario.mode_count();
  const double m = static_cast<double>(modes);
  const double min_detector = std::min(stats.detector_mean_a, stats.detector_mean_b);
  if (m * min_detector < options.clt_threshold) {
    throw GuardError("M * min(detector mean) = " + std::to_string(m * min_detector) +
                     " is below the aggregate-sampling threshold");
  }

  EstimationResult r;
  r.variant = variant;
  r.scenario = scenario;
  r.seed = seed;
  const double cos_true = std::cos(scenario.theta);
  r.theta_true = std::acos(std::clamp(cos_true, -1.0, 1.0));

  const CounterRng rng(seed, options.stream);
  const double mean_total = m * stats.mean_diff;
  const double sd_total = options.noise_free ? 0.0 : std::sqrt(m * stats.var_diff);
  r.samples.reserve(shots);
  std::vector<double> cos_err(shots), theta_err(shots);
  double cos_sum = 0.0, theta_sum = 0.0;
  for (std::uint64_t k = 0; k < shots; ++k) {
    const double total = mean_total + sd_total * rng.normal(k);
    const EstimatorSample s = cosine_estimator(stats, modes, total);
    r.samples.push_back(s);
    cos_err[k] = s.cos_hat - cos_true;
    theta_err[k] = s.theta_hat - r.theta_true;
    cos_sum += s.cos_hat;
    theta_sum += s.theta_hat;
  }
  const double k = static_cast<double>(shots);
  r.cos_mean = cos_sum / k;
  r.theta_mean = theta_sum / k;
  const Moments mc = squared_error_moments(cos_err);
  const Moments mt = squared_error_moments(theta_err);
  r.mse_cos = mc.mse;
  r.stderr_cos = mc.stderr_;
  r.mse_theta = mt.mse;
  r.stderr_theta = mt.stderr_;
  r.rms_cos = std::sqrt(r.mse_cos);
  r.rms_theta = std::sqrt(r.mse_theta);

  r.theory_mse_cos = stats.var_diff / (m * stats.calib_scale * stats.calib_scale);
  if (std::abs(std::sin(scenario.theta)) >= 1e-12) {
    const TheoryMse t = theory_mse(stats, modes, scenario.theta);
    r.theory_mse = t.var_theta;
    r.theory_reliable = t.reliable;
  } else {
    r.theory_mse = std::numeric_limits<double>::quiet_NaN();
    r.theory_reliable = false;
  }
  r.qcrb = options.with_qcrb ? qfi_phase(scenario, variant).qcrb_var
                             : std::numeric_limits<double>::quiet_NaN();
  return r;
}

void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& f) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, jobs), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          f(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<SweepPoint> sweep(std::span<const SensingScenario> grid, ProtocolVariant variant,
                              std::uint64_t shots, std::uint64_t seed, unsigned jobs,
                              const SimulationOptions& options) {
  if (grid.empty()) throw InvalidArgument("sweep grid is empty");
  std::vector<SweepPoint> out(grid.size());
  parallel_for(grid.size(), jobs, [&](std::size_t i) {
    SimulationOptions opts = options;
    opts.stream = i;
    try {
      out[i].result = simulate(grid[i], variant, shots, seed, opts);
    } catch (const std::exception& e) {
      out[i].error = e.what();
    }
  });
  return out;
}

}  // namespace covsense
