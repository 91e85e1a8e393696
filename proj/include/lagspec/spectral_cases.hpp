#pragma once

// Manufactured problems with known solutions for the half-line model
// equation -u'' + gamma u = f.

#include <cmath>
#include <stdexcept>
#include <string>

#include "lagspec/spectral.hpp"

namespace lagspec {

/// u = sin(k x) e^{-x}; f = e^{-x} ((k^2 - 1 + gamma) sin(k x) + 2k cos(k x)).
/// The data decay like e^{z x} with z = -1 + ik.
inline ModelProblem exp_sine_case(double k, double gamma) {
  ModelProblem p;
  p.gamma = gamma;
  p.u_exact = [k](double x) { return std::sin(k * x) * std::exp(-x); };
  p.du_exact = [k](double x) { return (k * std::cos(k * x) - std::sin(k * x)) * std::exp(-x); };
  p.f = [k, gamma](double x) {
    return std::exp(-x) * ((k * k - 1.0 + gamma) * std::sin(k * x) + 2.0 * k * std::cos(k * x));
  };
  validate(p);
  return p;
}

/// u = (1 + x)^{-r}, which is 1 at the origin. The solver sees the lifted
/// w = u - e^{-rho x}, which vanishes there; -w'' + gamma w =
/// f_u - (gamma - rho^2) e^{-rho x}. The returned exact solution is w, so
/// error norms of w equal those of u.
inline ModelProblem algebraic_case(double r, double gamma, double lift_rate = 1.0) {
  if (!(r > 0.5)) throw std::domain_error("algebraic_case: r must exceed 1/2 for a square-integrable solution");
  if (!(lift_rate > 0.0)) throw std::domain_error("algebraic_case: lift rate must be positive");
  const double rho = lift_rate;
  ModelProblem p;
  p.gamma = gamma;
  p.u_exact = [r, rho](double x) { return std::pow(1.0 + x, -r) - std::exp(-rho * x); };
  p.du_exact = [r, rho](double x) { return -r * std::pow(1.0 + x, -r - 1.0) + rho * std::exp(-rho * x); };
  p.f = [r, rho, gamma](double x) {
    const double s = 1.0 + x;
    return -r * (r + 1.0) * std::pow(s, -r - 2.0) + gamma * std::pow(s, -r) - (gamma - rho * rho) * std::exp(-rho * x);
  };
  validate(p);
  return p;
}

/// u = sin(k x) (1 + x)^{-r}.
inline ModelProblem oscillatory_algebraic_case(double k, double r, double gamma) {
  if (!(r > 0.5)) {
    throw std::domain_error("oscillatory_algebraic_case: r must exceed 1/2 for a square-integrable solution");
  }
  ModelProblem p;
  p.gamma = gamma;
  p.u_exact = [k, r](double x) { return std::sin(k * x) * std::pow(1.0 + x, -r); };
  p.du_exact = [k, r](double x) {
    const double s = 1.0 + x;
    return k * std::cos(k * x) * std::pow(s, -r) - r * std::sin(k * x) * std::pow(s, -r - 1.0);
  };
  p.f = [k, r, gamma](double x) {
    const double s = 1.0 + x;
    const double sn = std::sin(k * x), cs = std::cos(k * x);
    return (k * k + gamma) * sn * std::pow(s, -r) + 2.0 * k * r * cs * std::pow(s, -r - 1.0) -
           r * (r + 1.0) * sn * std::pow(s, -r - 2.0);
  };
  validate(p);
  return p;
}

}  // namespace lagspec
