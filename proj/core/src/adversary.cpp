#include "covsense/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "covsense/errors.hpp"

namespace covsense {

namespace {

// log(1 + x) - x without cancellation for small x.
double log1p_minus_x(double x) {
  if (std::abs(x) < 1e-2) {
    double term = x * x;
    double sum = 0.0;
    for (int k = 2; k < 14; ++k) {
      sum += ((k % 2 == 0) ? -term : term) / k;
      term *= x;
    }
    return sum;
  }
  return std::log1p(x) - x;
}

void check_photons(double n, const char* what) {
  if (!std::isfinite(n) || n < 0.0) {
    throw InvalidArgument(std::string(what) + " must be finite and >= 0");
  }
}

double upper_tail(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }
double lower_tail(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

DetectionTest exact_counting(double n0, double n1, double total_modes) {
  const double mean1 = total_modes * n1;
  const double sd1 = std::sqrt(total_modes * n1 * (n1 + 1.0));
  const auto kmax = static_cast<std::size_t>(std::ceil(mean1 + 40.0 * sd1 + 50.0));

  // log pmf of a sum of `total_modes` geometric counts with mean n.
  auto log_pmf = [total_modes](double n, std::size_t k) {
    if (n == 0.0) {
      return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    }
    const double kd = static_cast<double>(k);
    return std::lgamma(total_modes + kd) - std::lgamma(kd + 1.0) - std::lgamma(total_modes) -
           total_modes * std::log1p(n) + kd * std::log(n / (n + 1.0));
  };

  std::vector<double> p0(kmax + 1), p1(kmax + 1);
  for (std::size_t k = 0; k <= kmax; ++k) {
    p0[k] = std::exp(log_pmf(n0, k));
    p1[k] = std::exp(log_pmf(n1, k));
  }
  // tail0[t] = P(count >= t | H0)
  std::vector<double> tail0(kmax + 2, 0.0);
  for (std::size_t k = kmax + 1; k-- > 0;) tail0[k] = tail0[k + 1] + p0[k];

  DetectionTest best{0, 0.5 * tail0[0], CountingMethod::ExactThreshold};
  double head1 = 0.0;  // P(count < t | H1)
  for (std::size_t t = 1; t <= kmax + 1; ++t) {
    head1 += p1[t - 1];
    const double pe = 0.5 * (tail0[t] + head1);
    if (pe < best.pe) best = {t, pe, CountingMethod::ExactThreshold};
  }
  best.pe = std::clamp(best.pe, 0.0, 0.5);
  return best;
}

DetectionTest gaussian_counting(double n0, double n1, double total_modes) {
  const double mu0 = total_modes * n0, mu1 = total_modes * n1;
  const double sd0 = std::sqrt(total_modes * n0 * (n0 + 1.0));
  const double sd1 = std::sqrt(total_modes * n1 * (n1 + 1.0));
  // Continuity-corrected error of the rule "count >= t".
  auto pe_at = [&](double t) {
    const double false_alarm =
        sd0 > 0.0 ? upper_tail((t - 0.5 - mu0) / sd0) : (t - 0.5 < mu0 ? 1.0 : 0.0);
    return 0.5 * (false_alarm + lower_tail((t - 0.5 - mu1) / sd1));
  };
  // The error is unimodal in t between the two means.
  double lo = mu0, hi = mu1 + 1.0;
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - golden * (hi - lo), b = lo + golden * (hi - lo);
  double fa = pe_at(a), fb = pe_at(b);
  for (int it = 0; it < 200 && hi - lo > 0.5; ++it) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - golden * (hi - lo);
      fa = pe_at(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + golden * (hi - lo);
      fb = pe_at(b);
    }
  }
  DetectionTest best{0, pe_at(0.0), CountingMethod::GaussianApprox};
  for (double t : {std::floor(lo) - 1.0, std::floor(lo), std::ceil(lo), std::ceil(hi),
                   std::ceil(hi) + 1.0}) {
    if (t < 0.0) continue;
    const double pe = pe_at(t);
    if (pe < best.pe) best = {static_cast<std::uint64_t>(t), pe, CountingMethod::GaussianApprox};
  }
  best.pe = std::clamp(best.pe, 0.0, 0.5);
  return best;
}

}  // namespace

double thermal_rel_entropy(double n_a, double n_b) {
  check_photons(n_a, "n_a");
  check_photons(n_b, "n_b");
  if (n_b == 0.0) {
    if (n_a == 0.0) return 0.0;
    throw InvalidArgument("relative entropy against vacuum diverges for n_a > 0");
  }
  if (n_a == 0.0) return std::log1p(n_b);
  // D = a ln(a/b) - (a+1) ln((a+1)/(b+1)); the leading term of the expansion in
  // delta = a - b is exact, the remainder uses log1p(x) - x.
  const double delta = n_a - n_b;
  const double u = delta / n_b, v = delta / (n_b + 1.0);
  const double d = delta * delta / (n_b * (n_b + 1.0)) + n_a * log1p_minus_x(u) -
                   (n_a + 1.0) * log1p_minus_x(v);
  return std::max(0.0, d);
}

double thermal_log_fidelity(double n0, double n1) {
  check_photons(n0, "n0");
  check_photons(n1, "n1");
  // 1/F - 1 = [(sqrt(n0+1) - sqrt(n1+1))^2 + (sqrt(n0) - sqrt(n1))^2] / (2 S)
  const double delta = n1 - n0;
  const double s = std::sqrt((n0 + 1.0) * (n1 + 1.0)) + std::sqrt(n0 * n1);
  const double a = delta / (std::sqrt(n0 + 1.0) + std::sqrt(n1 + 1.0));
  const double root_sum = std::sqrt(n0) + std::sqrt(n1);
  const double b = root_sum > 0.0 ? delta / root_sum : 0.0;
  return -std::log1p((a * a + b * b) / (2.0 * s));
}

double thermal_fidelity(double n0, double n1) { return std::exp(thermal_log_fidelity(n0, n1)); }

double willie_rel_entropy(const SensingScenario& scenario, ProtocolVariant variant) {
  scenario.validate();
  const double captured = willie_signal_photons(scenario);
  if (variant == ProtocolVariant::CoherentBaseline) {
    // Displaced thermal against thermal with equal covariance.
    if (captured == 0.0) return 0.0;
    if (scenario.N_B == 0.0) {
      throw InvalidArgument("relative entropy against vacuum diverges for a displaced probe");
    }
    return captured * std::log1p(1.0 / scenario.N_B);
  }
  return thermal_rel_entropy(scenario.N_B + captured, scenario.N_B);
}

double epsilon_of(const SensingScenario& scenario, ProtocolVariant variant) {
  const double d = willie_rel_entropy(scenario, variant);
  return std::sqrt(static_cast<double>(scenario.mode_count()) * d / 8.0);
}

double pe_lower_bound(double n0, double n1, std::uint64_t modes) {
  const double log_f2m = 2.0 * static_cast<double>(modes) * thermal_log_fidelity(n0, n1);
  const double one_minus = -std::expm1(log_f2m);
  return 0.5 * (1.0 - std::sqrt(std::max(0.0, one_minus)));
}

std::string_view to_string(CountingMethod m) {
  return m == CountingMethod::ExactThreshold ? "exact_threshold" : "gaussian_approx";
}

DetectionTest pe_optimal_counting(double n0, double n1, std::uint64_t modes,
                                  const CountingOptions& options) {
  check_photons(n0, "n0");
  check_photons(n1, "n1");
  if (n1 < n0) throw InvalidArgument("pe_optimal_counting requires n1 >= n0");
  if (modes < 1 || options.window_count < 1) {
    throw InvalidArgument("mode and window counts must be >= 1");
  }
  const double total_modes =
      static_cast<double>(modes) * static_cast<double>(options.window_count);
  if (n1 == n0) return {0, 0.5, CountingMethod::ExactThreshold};

  const bool exact_ok = total_modes * n1 <= options.exact_limit;
  CountingMethod method = exact_ok ? CountingMethod::ExactThreshold : CountingMethod::GaussianApprox;
  if (options.force) method = *options.force;
  if (method == CountingMethod::GaussianApprox && !exact_ok && !options.allow_approximation &&
      !options.force) {
    throw InvalidArgument("expected counts exceed the exact-summation limit and approximation is disabled");
  }
  if (method == CountingMethod::ExactThreshold && total_modes * n1 > 1e8) {
    throw InvalidArgument("exact threshold summation is limited to 1e8 expected counts");
  }
  return method == CountingMethod::ExactThreshold ? exact_counting(n0, n1, total_modes)
                                                  : gaussian_counting(n0, n1, total_modes);
}

double solve_ns_for_epsilon(double eps_target, const SensingScenario& scenario,
                            ProtocolVariant variant) {
  if (!std::isfinite(eps_target) || eps_target < 0.0) {
    throw InvalidArgument("target epsilon must be >= 0");
  }
  if (eps_target == 0.0) return 0.0;
  SensingScenario s = scenario;
  auto eps_at = [&](double ns) {
    s.N_S = ns;
    return epsilon_of(s, variant);
  };
  double lo = 0.0, hi = kMaxProbePhotons;
  if (eps_at(hi) < eps_target) {
    throw BracketError("target epsilon is unreachable with N_S <= 10");
  }
  for (int it = 0; it < 400 && hi - lo > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (eps_at(mid) < eps_target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

std::vector<SensingScenario> schedule(std::span<const double> t_grid, const SensingScenario& base,
                                      auto&& probe_photons) {
  std::vector<SensingScenario> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    SensingScenario s = base;
    s.T = t;
    if (!(t > 0.0) || s.mode_count() < 1) throw InvalidArgument("schedule times must give M >= 1");
    s.N_S = probe_photons(s);
    if (!(s.N_S <= kMaxProbePhotons)) {
      throw InvalidArgument("schedule requires N_S above the physical cap of 10 photons per mode");
    }
    s.validate();
    out.push_back(s);
  }
  return out;
}

}  // namespace

std::vector<SensingScenario> sqrt_law_schedule(double constant, std::span<const double> t_grid,
                                               const SensingScenario& scenario) {
  if (!(constant > 0.0)) throw InvalidArgument("square-root-law constant must be > 0");
  return schedule(t_grid, scenario, [constant](const SensingScenario& s) {
    return constant / (s.kappa() * std::sqrt(static_cast<double>(s.mode_count())));
  });
}

std::vector<SensingScenario> fixed_ratio_schedule(double ratio, std::span<const double> t_grid,
                                                  const SensingScenario& scenario) {
  if (!(ratio > 0.0)) throw InvalidArgument("fixed-power ratio must be > 0");
  return schedule(t_grid, scenario,
                  [ratio](const SensingScenario& s) { return ratio * s.N_B / s.kappa(); });
}

CovertnessReport covertness_report(const SensingScenario& scenario, ProtocolVariant variant,
                                   const CountingOptions& options) {
  CovertnessReport r;
  r.n0 = scenario.N_B;
  r.n1 = scenario.N_B + willie_signal_photons(scenario);
  r.modes = scenario.mode_count();
  r.rel_entropy_per_mode = willie_rel_entropy(scenario, variant);
  r.epsilon = std::sqrt(static_cast<double>(r.modes) * r.rel_entropy_per_mode / 8.0);
  if (variant == ProtocolVariant::CoherentBaseline) {
    // Root fidelity of displaced thermal vs thermal with equal covariance.
    const double log_f = -(r.n1 - r.n0) / (2.0 * (2.0 * r.n0 + 1.0));
    const double one_minus = -std::expm1(2.0 * static_cast<double>(r.modes) * log_f);
    r.pe_lower_fidelity = 0.5 * (1.0 - std::sqrt(std::max(0.0, one_minus)));
  } else {
    r.pe_lower_fidelity = pe_lower_bound(r.n0, r.n1, r.modes);
    r.pe_exact = pe_optimal_counting(r.n0, r.n1, r.modes, options);
  }
  return r;
}

}  // namespace covsense
