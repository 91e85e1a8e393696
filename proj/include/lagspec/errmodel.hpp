#pragma once

// Round-off propagation in the Laguerre recurrences.
//
// An error e_n = (computed - exact) L_n obeys the same three-term recurrence
// as L_n plus a local perturbation zeta_n:
//   standard:  e_{n+1} = ((2n + a + 1 - x) e_n - (n + a) e_{n-1}) / (n + 1) + zeta_n
//   delta:     d_{n+1} = ((n + a) d_n - x e_n) / (n + 1) + zeta_n,  e_{n+1} = e_n + d_{n+1}
// with e_0 = 0 and d_1 = e_1. This header estimates the size of zeta_n,
// bounds the energy E_n = x e_n^2 + (n + a)(e_n - e_{n-1})^2 and |e_n|,
// simulates the error recurrences with random perturbations, and measures
// the actual error of the double evaluators against the extended-precision
// oracle.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "lagspec/errors.hpp"
#include "lagspec/gamma_ratio.hpp"
#include "lagspec/hp_scalar.hpp"
#include "lagspec/oracle.hpp"
#include "lagspec/recurrence.hpp"

namespace lagspec {

/// Relative round-off bound of IEEE double arithmetic as used by the model.
inline constexpr double kRoundoff = 2.22e-16;

enum class ErrorMode { standard, delta };

inline const char* to_string(ErrorMode m) { return m == ErrorMode::standard ? "standard" : "delta"; }

namespace detail {

template <std::floating_point Real>
void check_series_degree(const LagSeries<Real>& s, int n) {
  if (n < 0 || static_cast<std::size_t>(n) >= s.values.size()) {
    throw std::out_of_range("series does not hold degree " + std::to_string(n));
  }
}

}  // namespace detail

/// Envelope of zeta_n for the standard recurrence:
/// (2 + x/(n+1)) |L_n| eps + |L_{n-1}| eps.
template <std::floating_point Real>
Real zeta_estimate(const LagSeries<Real>& s, int n, Real eps = Real(kRoundoff)) {
  detail::check_series_degree(s, n);
  const auto i = static_cast<std::size_t>(n);
  const Real prev = n > 0 ? std::abs(s.values[i - 1]) : Real(0);
  return (Real(2) + s.x / Real(n + 1)) * std::abs(s.values[i]) * eps + prev * eps;
}

/// Envelope of zeta_n for the delta recurrence: (|dL_n| + x/(n+1) |L_n|) eps.
template <std::floating_point Real>
Real zeta_delta_estimate(const LagSeries<Real>& s, int n, Real eps = Real(kRoundoff)) {
  detail::check_series_degree(s, n);
  const auto i = static_cast<std::size_t>(n);
  Real d = Real(0);
  if (n > 0) d = s.deltas.size() >= i ? s.deltas[i - 1] : s.values[i] - s.values[i - 1];
  return (std::abs(d) + s.x / Real(n + 1) * std::abs(s.values[i])) * eps;
}

struct ErrorBoundInput {
  int n{1};
  double alpha{0.0};
  double x{0.0};
  double eta{0.25};
  double e1{0.0};        // |e_1|
  double zeta_max{0.0};  // max_s |zeta_s| over s <= n
  double eps{kRoundoff};
};

enum class Regime { nonexpansive, expansive };

inline const char* to_string(Regime r) { return r == Regime::nonexpansive ? "nonexpansive" : "expansive"; }

struct ErrorBoundResult {
  Regime regime{Regime::nonexpansive};
  double energy_bound{0.0};  // bound on E_{n+1}
  double abs_bound{0.0};     // sqrt(energy_bound / x), bound on |e_{n+1}|
  double beta_n{1.0};        // growth factor, 1 in the nonexpansive regime
};

/// beta_n = [Gamma(n+2+a) / Gamma(2+a)] / [Gamma(n+3-a-x-eta) / Gamma(3-a-x-eta)].
inline double growth_factor(int n, double alpha, double x, double eta) {
  const double c = 3.0 - alpha - x - eta;
  if (!(c > 0.0)) throw std::domain_error("growth_factor: requires 3 - alpha - x - eta > 0");
  const double nn = static_cast<double>(n);
  return std::exp(log_gamma_ratio(nn + 2.0 + alpha, 2.0 + alpha) - log_gamma_ratio(nn + c, c));
}

namespace detail {

inline void check_bound_input(const ErrorBoundInput& in) {
  if (in.n < 0) throw std::domain_error("error bound: n must be nonnegative");
  if (!(in.alpha > -1.0)) throw std::domain_error("error bound: requires alpha > -1");
  if (!(in.x >= 0.0)) throw std::domain_error("error bound: requires x >= 0");
  if (!(in.eta > 0.0)) throw std::domain_error("error bound: requires eta > 0");
  if (!(3.0 - in.alpha - in.x - in.eta > 0.0)) {
    throw std::domain_error("error bound: requires 3 - alpha - x - eta > 0");
  }
  if (!(in.e1 >= 0.0) || !(in.zeta_max >= 0.0)) {
    throw std::domain_error("error bound: e1 and zeta_max must be nonnegative magnitudes");
  }
}

}  // namespace detail

/// Bound on E_{n+1}. The regime is chosen by the sign of 1 - 2a - x - eta;
/// zero counts as nonexpansive.
inline ErrorBoundResult energy_bound(const ErrorBoundInput& in) {
  detail::check_bound_input(in);
  const double disc = 1.0 - 2.0 * in.alpha - in.x - in.eta;
  const double n = static_cast<double>(in.n);
  const double e1_energy = (in.x + 1.0 + in.alpha) * in.e1 * in.e1;
  const double z2 = in.zeta_max * in.zeta_max;
  ErrorBoundResult r;
  if (disc >= 0.0) {
    r.regime = Regime::nonexpansive;
    r.energy_bound = e1_energy + (n + 1.0) * (n + 2.0) * (2.0 * n + 3.0) / (6.0 * in.eta) * z2;
  } else if (disc > -1.5) {
    if (!(in.alpha >= 0.0)) {
      throw std::domain_error("energy_bound: expansive regime requires alpha >= 0");
    }
    r.regime = Regime::expansive;
    r.beta_n = growth_factor(in.n, in.alpha, in.x, in.eta);
    r.energy_bound = r.beta_n * e1_energy + ((n - 3.0) * (n + 1.0) * (n + 1.0) + 29.0 * r.beta_n) / in.eta * z2;
  } else {
    throw std::domain_error("energy_bound: requires 1 - 2 alpha - x - eta > -1.5");
  }
  r.energy_bound = std::max(r.energy_bound, 0.0);
  r.abs_bound = in.x > 0.0 ? std::sqrt(r.energy_bound / in.x) : std::numeric_limits<double>::infinity();
  return r;
}

/// Explicit bound on |e_{n+1}| in terms of m = max(|e_1|, zeta_max).
///   -1 < a <= 1/4, 0 < x < 1/4, eta = 1/4:
///       (2 + 2 (n+2)^{3/2} / sqrt(3)) m / sqrt(x)
///   a >= 0, 3 - a - x - eta > 0, -1.5 <= 1 - 2a - x - eta < 0:
///       (2 sqrt(beta_n) + (5.5 sqrt(beta_n) + sqrt(n) (n+1)) / sqrt(eta)) m / sqrt(x)
inline double abs_error_bound(const ErrorBoundInput& in) {
  detail::check_bound_input(in);
  if (!(in.x > 0.0)) throw std::domain_error("abs_error_bound: requires x > 0");
  const double m = std::max(in.e1, in.zeta_max);
  const double n = static_cast<double>(in.n);
  const double disc = 1.0 - 2.0 * in.alpha - in.x - in.eta;
  if (in.alpha <= 0.25 && in.x < 0.25 && in.eta == 0.25) {
    return (2.0 + 2.0 * std::pow(n + 2.0, 1.5) / std::sqrt(3.0)) * m / std::sqrt(in.x);
  }
  if (in.alpha >= 0.0 && disc >= -1.5 && disc < 0.0) {
    const double sb = std::sqrt(growth_factor(in.n, in.alpha, in.x, in.eta));
    return (2.0 * sb + (5.5 * sb + std::sqrt(n) * (n + 1.0)) / std::sqrt(in.eta)) * m / std::sqrt(in.x);
  }
  throw std::domain_error(
      "abs_error_bound: parameters outside both ranges (a <= 1/4, x < 1/4, eta = 1/4) and "
      "(a >= 0, -1.5 <= 1 - 2a - x - eta < 0)");
}

struct SimulationOptions {
  double eps{kRoundoff};
  double zeta_scale{1.0};    // scales every perturbation, e_1 included; 0 switches them off
  std::optional<double> e1;  // fixed e_1; default zeta_scale L_1 times a uniform draw in [-eps, eps]
};

struct ErrorTrajectory {
  ErrorMode mode{ErrorMode::standard};
  std::vector<double> e;          // e_0..e_{n_max}
  std::vector<double> zeta_hat;   // envelope used for zeta_n, n = 0..n_max (entry 0 unused)
  double e1{0.0};

  /// max_s zeta_hat[s] for 1 <= s <= n.
  double zeta_max(int n) const {
    double m = 0.0;
    for (int s = 1; s <= n && static_cast<std::size_t>(s) < zeta_hat.size(); ++s) m = std::max(m, zeta_hat[s]);
    return m;
  }

  /// E_n = x e_n^2 + (n + a)(e_n - e_{n-1})^2.
  double energy(int n, double alpha, double x) const {
    const auto i = static_cast<std::size_t>(n);
    const double d = e[i] - (n > 0 ? e[i - 1] : 0.0);
    return x * e[i] * e[i] + (n + alpha) * d * d;
  }
};

namespace detail {

// Uniform in [-1, 1) from 53 random bits; avoids implementation-defined
// distributions so trajectories agree across standard libraries.
inline double symmetric_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1p-52 - 1.0;
}

}  // namespace detail

/// Iterates the error recurrence of `mode` with zeta_n drawn uniformly from
/// [-zeta_hat_n, zeta_hat_n]. Envelopes come from the double difference
/// recurrence; deterministic for a given seed.
inline ErrorTrajectory simulate_error_propagation(double alpha, int n_max, double x, ErrorMode mode,
                                                  std::uint64_t seed, const SimulationOptions& opt = {}) {
  if (n_max < 1) throw std::domain_error("simulate_error_propagation: n_max must be at least 1");
  if (!(opt.eps >= 0.0) || !(opt.zeta_scale >= 0.0)) {
    throw std::domain_error("simulate_error_propagation: eps and zeta_scale must be nonnegative");
  }
  const auto series = eval_poly_modified(LagParams<double>{alpha, n_max}, x);
  std::mt19937_64 rng(seed);
  ErrorTrajectory t;
  t.mode = mode;
  const auto size = static_cast<std::size_t>(n_max) + 1;
  t.e.assign(size, 0.0);
  t.zeta_hat.assign(size, 0.0);
  for (int n = 1; n <= n_max; ++n) {
    const double z = mode == ErrorMode::standard ? zeta_estimate(series, n, opt.eps)
                                                 : zeta_delta_estimate(series, n, opt.eps);
    if (!std::isfinite(z)) throw numeric_error("simulate_error_propagation: envelope overflow", static_cast<std::size_t>(n));
    t.zeta_hat[static_cast<std::size_t>(n)] = opt.zeta_scale * z;
  }
  t.e1 = opt.e1 ? *opt.e1 : opt.zeta_scale * series.values[1] * opt.eps * detail::symmetric_unit(rng);
  t.e[1] = t.e1;
  double d = t.e1;
  for (int n = 1; n < n_max; ++n) {
    const auto i = static_cast<std::size_t>(n);
    const double nn = static_cast<double>(n);
    const double zeta = t.zeta_hat[i] * detail::symmetric_unit(rng);
    if (mode == ErrorMode::standard) {
      t.e[i + 1] = ((2.0 * nn + alpha + 1.0 - x) * t.e[i] - (nn + alpha) * t.e[i - 1]) / (nn + 1.0) + zeta;
    } else {
      d = ((nn + alpha) * d - x * t.e[i]) / (nn + 1.0) + zeta;
      t.e[i + 1] = t.e[i] + d;
    }
  }
  return t;
}

/// Signed errors computed - exact of L_0..L_{n_max}(x) for the double
/// recurrence of `mode`, together with the oracle values.
struct MeasuredTrajectory {
  std::vector<double> error;
  std::vector<double> exact;
};

inline MeasuredTrajectory measure_error_trajectory(double alpha, int n_max, double x, ErrorMode mode,
                                                   const HpContext& ctx = {}) {
  validate(ctx);
  const LagParams<double> p{alpha, n_max};
  const auto computed = mode == ErrorMode::standard ? eval_poly_standard(p, x) : eval_poly_modified(p, x);
  const auto ref = hp::poly_series(ctx, HpScalar(ctx, exact_repr(alpha)), n_max, HpScalar(ctx, exact_repr(x)));
  MeasuredTrajectory m;
  m.error.reserve(ref.size());
  m.exact.reserve(ref.size());
  for (std::size_t k = 0; k < ref.size(); ++k) {
    m.error.push_back((HpScalar(ctx, computed.values[k]) - ref[k]).to_double());
    m.exact.push_back(ref[k].to_double());
  }
  return m;
}

struct ActualError {
  double standard{0.0};
  double delta{0.0};
};

/// |double value - oracle value| of L_n(x) for both recurrences.
inline ActualError measure_actual_error(double alpha, int n, double x, const HpContext& ctx = {}) {
  validate(ctx);
  const LagParams<double> p{alpha, n};
  const HpScalar ref = hp::poly(ctx, HpScalar(ctx, exact_repr(alpha)), n, HpScalar(ctx, exact_repr(x))).value;
  const auto err = [&](double v) { return abs(HpScalar(ctx, v) - ref).to_double(); };
  return {err(eval_poly_standard(p, x).back()), err(eval_poly_modified(p, x).back())};
}

}  // namespace lagspec
