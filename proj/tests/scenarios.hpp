#pragma once

// Desk-scale scenarios small enough for Fock-space comparisons.

#include <random>

#include "covsense/protocol.hpp"

namespace covsense::testing {

/// Small-photon-number scenario for Fock-space comparisons.
inline SensingScenario desk_scenario(double n_s, double n_b, double kappa, double kappa_i,
                                     double g_pc, double theta) {
  SensingScenario s;
  s.N_S = n_s;
  s.N_B = n_b;
  s.kappa_E = 1.0;
  s.kappa_T = kappa;
  s.kappa_I = kappa_i;
  s.G_pc = g_pc;
  s.theta = theta;
  s.W = 1e6;
  s.T = 1e-3;
  return s;
}

inline SensingScenario random_desk_scenario(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SensingScenario s = desk_scenario(0.02 + 0.48 * u(rng), 2.0 * u(rng), 0.05 + 0.9 * u(rng),
                                    0.5 + 0.5 * u(rng), 1.01 + 0.29 * u(rng), 3.14159 * u(rng));
  s.N_R = 0.05 + 0.45 * u(rng);
  return s;
}

}  // namespace covsense::testing
