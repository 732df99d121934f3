#pragma once

#include <cmath>
#include <cstdint>

#include <gtest/gtest.h>

#include "covsense/protocol.hpp"
#include "scenarios.hpp"

namespace covsense::testing {

/// Relative comparison with an absolute floor.
inline ::testing::AssertionResult near_rel(double actual, double expected, double rel,
                                           double abs_floor = 0.0) {
  const double tol = rel * std::abs(expected) + abs_floor;
  if (std::abs(actual - expected) <= tol) return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure() << "actual " << actual << " vs expected " << expected
                                       << " (tolerance " << tol << ")";
}

}  // namespace covsense::testing
