#pragma once

// Ratios of Gamma functions evaluated in log space.
//
// Gamma(n + a) overflows a double once n exceeds ~171, while the ratios the
// Laguerre weight formulas need stay of modest size. We form
// log Gamma(a) - log Gamma(b) directly from the Stirling series so the
// large leading terms cancel analytically instead of numerically.

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lagspec {

namespace detail {

// Stirling remainder: log Gamma(z) - [(z - 1/2) log z - z + log(2 pi)/2], z >= 10.
inline double stirling_remainder(double z) {
  const double w = 1.0 / (z * z);
  // B_{2k} / (2k (2k-1)), k = 1..7
  double s = 1.0 / 156.0;
  s = s * w - 691.0 / 360360.0;
  s = s * w + 1.0 / 1188.0;
  s = s * w - 1.0 / 1680.0;
  s = s * w + 1.0 / 1260.0;
  s = s * w - 1.0 / 360.0;
  s = s * w + 1.0 / 12.0;
  return s / z;
}

inline constexpr double kShiftThreshold = 10.0;
inline constexpr double kDirectLimit = 170.0;

}  // namespace detail

/// log(Gamma(a) / Gamma(b)) for a, b > 0.
inline double log_gamma_ratio(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::domain_error("log_gamma_ratio: arguments must be positive");
  }
  if (a == b) return 0.0;
  if (a <= detail::kDirectLimit && b <= detail::kDirectLimit) {
    return std::log(std::tgamma(a) / std::tgamma(b));
  }
  // Shift both arguments into the range where the Stirling series converges:
  // Gamma(z) = Gamma(z + 1) / z.
  double shift = 0.0;
  while (a < detail::kShiftThreshold) {
    shift -= std::log(a);
    a += 1.0;
  }
  while (b < detail::kShiftThreshold) {
    shift += std::log(b);
    b += 1.0;
  }
  const double d = a - b;
  // (a - 1/2) log a - a - (b - 1/2) log b + b
  //   = (b - 1/2) log1p(d / b) + d log a - d
  const double lead = (b - 0.5) * std::log1p(d / b) + d * std::log(a) - d;
  return shift + lead + (detail::stirling_remainder(a) - detail::stirling_remainder(b));
}

/// Gamma(a) / Gamma(b) for a, b > 0, exponentiated once from log space.
inline double gamma_ratio(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::domain_error("gamma_ratio: arguments must be positive");
  }
  if (a <= detail::kDirectLimit && b <= detail::kDirectLimit) {
    return std::tgamma(a) / std::tgamma(b);
  }
  return std::exp(log_gamma_ratio(a, b));
}

}  // namespace lagspec
