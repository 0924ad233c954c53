#pragma once

#include <cmath>
#include <numbers>

namespace mtinsar {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Principal value of a phase: result == phi (mod 2*pi), result in [-pi, pi).
inline double wrap(double phi) {
  double w = phi - kTwoPi * std::floor((phi + kPi) / kTwoPi);
  // floor rounding can leave w marginally outside the half-open interval
  if (w >= kPi) w -= kTwoPi;
  if (w < -kPi) w += kTwoPi;
  return w;
}

}  // namespace mtinsar
