#pragma once

#include <cmath>
#include <numbers>

#include "nehari/grid.hpp"

namespace nehari::testing {

inline constexpr double kPi = std::numbers::pi;

inline Field sine_1d(int n) {
  const Grid g = build_grid(1, {1.0}, {n});
  return sample(g, [](const auto& x) { return std::sin(kPi * x[0]); });
}

inline Field bubble_2d(int n) {
  const Grid g = build_grid(2, {1.0, 1.0}, {n, n});
  return sample(g, [](const auto& x) { return x[0] * (1 - x[0]) * x[1] * (1 - x[1]); });
}

/// Observed order from errors at h and h/2.
inline double observed_order(double e_coarse, double e_fine) { return std::log2(std::abs(e_coarse / e_fine)); }

}  // namespace nehari::testing
