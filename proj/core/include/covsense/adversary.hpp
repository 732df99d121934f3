#pragma once

// The adversary's side: distinguishing background-only from probe-present
// thermal light on the light lost to the environment.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "covsense/protocol.hpp"

namespace covsense {

/// Relative entropy D(tau(n_a) || tau(n_b)) between thermal states, in nats.
/// Evaluated without cancellation for n_a close to n_b.
double thermal_rel_entropy(double n_a, double n_b);

/// Uhlmann (root) fidelity 1 / (sqrt((n0+1)(n1+1)) - sqrt(n0 n1)).
double thermal_fidelity(double n0, double n1);
/// log of thermal_fidelity, accurate when n0 ~ n1.
double thermal_log_fidelity(double n0, double n1);

/// D(rho_1 || rho_0) for one mode of the adversary's marginal.
double willie_rel_entropy(const SensingScenario& scenario, ProtocolVariant variant);

/// Covertness parameter eps = sqrt(M D / 8), so that P_e >= 1/2 - eps.
double epsilon_of(const SensingScenario& scenario, ProtocolVariant variant);

/// Fuchs-van de Graaf lower bound on the error of any test between M copies:
/// (1 - sqrt(1 - F^(2M))) / 2 with F the single-mode root fidelity.
double pe_lower_bound(double n0, double n1, std::uint64_t modes);

enum class CountingMethod { ExactThreshold, GaussianApprox };
std::string_view to_string(CountingMethod m);

struct DetectionTest {
  std::uint64_t threshold = 0;  ///< decide "probe present" when total count >= threshold
  double pe = 0.5;
  CountingMethod method = CountingMethod::ExactThreshold;
};

struct CountingOptions {
  std::uint64_t window_count = 1;
  /// Exact negative-binomial summation up to this many expected counts.
  double exact_limit = 1e6;
  bool allow_approximation = true;
  /// Forces one evaluation route regardless of exact_limit.
  std::optional<CountingMethod> force;
};

/// Minimum equal-prior error of the photon-counting test between M * window_count
/// thermal modes of mean n0 (absent) and n1 (present). The likelihood ratio is
/// monotone in the total count, so the optimum is a threshold test.
DetectionTest pe_optimal_counting(double n0, double n1, std::uint64_t modes,
                                  const CountingOptions& options = {});

/// N_S in [0, 10] with epsilon_of(scenario with N_S) = eps_target.
/// Throws BracketError when the target is unreachable below the cap.
double solve_ns_for_epsilon(double eps_target, const SensingScenario& scenario,
                            ProtocolVariant variant = ProtocolVariant::Entangled);

/// Square-root-law schedule: for each T, N_S = c / (kappa sqrt(M)).
std::vector<SensingScenario> sqrt_law_schedule(double constant, std::span<const double> t_grid,
                                               const SensingScenario& scenario);

/// Fixed-power schedule violating the square-root law: kappa N_S / N_B = ratio.
std::vector<SensingScenario> fixed_ratio_schedule(double ratio, std::span<const double> t_grid,
                                                  const SensingScenario& scenario);

struct CovertnessReport {
  double n0 = 0.0;
  double n1 = 0.0;
  std::uint64_t modes = 0;
  double epsilon = 0.0;
  double pe_lower_fidelity = 0.0;
  std::optional<DetectionTest> pe_exact;  ///< absent for the coherent baseline
  double rel_entropy_per_mode = 0.0;
};

CovertnessReport covertness_report(const SensingScenario& scenario, ProtocolVariant variant,
                                   const CountingOptions& options = {});

}  // namespace covsense
