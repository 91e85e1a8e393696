#pragma once

// Generalized Laguerre polynomials L_n^(a)(x) and Laguerre functions
// e^{-x/2} L_n^(a)(x).
//
// Three families of evaluators are provided:
//   * the classical three-term recurrence (`*_standard`),
//   * the difference form that propagates dL_n = L_n - L_{n-1}
//     (`*_modified`), which avoids the cancellation in (2n + a + 1 - x)
//     for small x,
//   * an adaptively weighted difference recurrence for Laguerre functions
//     (`eval_fun_stable`) that applies e^{-x/2} piecewise while iterating
//     and so neither overflows nor underflows for degrees in the thousands.
//
// All functions are pure and may be called concurrently.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lagspec/errors.hpp"
#include "lagspec/gamma_ratio.hpp"

namespace lagspec {

template <std::floating_point Real = double>
struct LagParams {
  Real alpha{0};
  int n{0};
};

template <std::floating_point Real>
LagParams(Real, int) -> LagParams<Real>;

enum class SeriesKind { polynomial, function };

/// Values of degrees 0..n at a single abscissa.
///
/// `deltas[k - 1]` holds values[k] - values[k - 1] when the difference
/// recurrence produced the series; it is empty otherwise. `derivs` is filled
/// on request by the derivative routines.
template <std::floating_point Real = double>
struct LagSeries {
  LagParams<Real> params;
  Real x{0};
  SeriesKind kind{SeriesKind::polynomial};
  std::vector<Real> values;
  std::vector<Real> deltas;
  std::vector<Real> derivs;

  Real back() const { return values.back(); }
};

/// Tuning of the adaptive weighting. A running value whose magnitude exceeds
/// exp(k1) is pulled down to about exp(-k2); k1 + k2 < 80 keeps every
/// intermediate well inside the double range.
///
/// With `binary_rescale` the portion of the weight released at each rescale
/// is rounded down to a multiple of ln 2, so the rescale is an exact
/// power-of-two shift and the result does not depend on (k1, k2) beyond the
/// final multiplication. Without it, exp(-x_c) is applied as is.
struct StableEvalConfig {
  double k1{32.0};
  double k2{32.0};
  bool binary_rescale{true};
};

inline void validate(const StableEvalConfig& cfg) {
  if (!(cfg.k1 > 0.0) || !(cfg.k2 > 0.0)) {
    throw std::domain_error("StableEvalConfig: k1 and k2 must be positive");
  }
  if (!(cfg.k1 + cfg.k2 < 80.0)) {
    throw std::domain_error("StableEvalConfig: k1 + k2 must be below 80");
  }
}

template <std::floating_point Real>
void validate(const LagParams<Real>& p) {
  if (!(p.alpha > Real(-1))) {
    throw std::domain_error("Laguerre parameter alpha must exceed -1");
  }
  if (p.n < 0) {
    throw std::domain_error("Laguerre degree must be nonnegative");
  }
}

namespace detail {

template <std::floating_point Real>
void check_args(const LagParams<Real>& p, Real x) {
  validate(p);
  if (!(x >= Real(0))) {
    throw std::domain_error("Laguerre abscissa must be nonnegative, got " + std::to_string(double(x)));
  }
}

/// v * exp(-e) for e >= 0, splitting the exponential so the factor itself
/// never underflows while the product is still representable.
template <std::floating_point Real>
Real mul_exp_neg(Real v, Real e) {
  constexpr Real chunk = Real(600);
  if (e <= chunk) return v * std::exp(-e);
  const auto pieces = static_cast<int>(std::ceil(e / chunk));
  const Real part = e / Real(pieces);
  const Real factor = std::exp(-part);
  for (int i = 0; i < pieces && v != Real(0); ++i) v *= factor;
  return v;
}

}  // namespace detail

/// (k+1) L_{k+1} = (2k + a + 1 - x) L_k - (k + a) L_{k-1}.
/// Overflow is not trapped: infinities and NaNs propagate to the caller.
template <std::floating_point Real>
LagSeries<Real> eval_poly_standard(const LagParams<Real>& p, Real x) {
  detail::check_args(p, x);
  LagSeries<Real> s{p, x, SeriesKind::polynomial, {}, {}, {}};
  s.values.resize(static_cast<std::size_t>(p.n) + 1);
  s.values[0] = Real(1);
  if (p.n == 0) return s;
  const Real a = p.alpha;
  s.values[1] = a + Real(1) - x;
  for (int k = 1; k < p.n; ++k) {
    const auto kk = static_cast<Real>(k);
    s.values[k + 1] =
        ((Real(2) * kk + a + Real(1) - x) * s.values[k] - (kk + a) * s.values[k - 1]) / (kk + Real(1));
  }
  return s;
}

/// Difference recurrence
///   dL_{k+1} = ((k + a) dL_k - x L_k) / (k + 1),  L_{k+1} = L_k + dL_{k+1},
/// started from L_1 = 1 + a - x, dL_1 = a - x.
template <std::floating_point Real>
LagSeries<Real> eval_poly_modified(const LagParams<Real>& p, Real x) {
  detail::check_args(p, x);
  LagSeries<Real> s{p, x, SeriesKind::polynomial, {}, {}, {}};
  const auto n = static_cast<std::size_t>(p.n);
  s.values.resize(n + 1);
  s.deltas.resize(n);
  s.values[0] = Real(1);
  if (n == 0) return s;
  const Real a = p.alpha;
  Real L = Real(1) + a - x;
  Real dL = a - x;
  s.values[1] = L;
  s.deltas[0] = dL;
  for (std::size_t k = 1; k < n; ++k) {
    const auto kk = static_cast<Real>(k);
    dL = ((kk + a) * dL - x * L) / (kk + Real(1));
    L = L + dL;
    s.values[k + 1] = L;
    s.deltas[k] = dL;
  }
  return s;
}

/// d/dx L_{k+1} = d/dx L_k - L_k, starting from d/dx L_0 = 0.
template <std::floating_point Real>
std::vector<Real> eval_poly_derivative(const LagSeries<Real>& series) {
  if (series.kind != SeriesKind::polynomial) {
    throw std::invalid_argument("eval_poly_derivative expects polynomial values");
  }
  std::vector<Real> d(series.values.size());
  if (d.empty()) return d;
  d[0] = Real(0);
  for (std::size_t k = 0; k + 1 < d.size(); ++k) d[k + 1] = d[k] - series.values[k];
  return d;
}

/// Three-term recurrence on Laguerre functions started from e^{-x/2}.
/// For x beyond ~1490 the starting values underflow to zero and so does
/// everything that follows.
template <std::floating_point Real>
LagSeries<Real> eval_fun_standard(const LagParams<Real>& p, Real x) {
  detail::check_args(p, x);
  LagSeries<Real> s{p, x, SeriesKind::function, {}, {}, {}};
  s.values.resize(static_cast<std::size_t>(p.n) + 1);
  const Real w = std::exp(-x / Real(2));
  s.values[0] = w;
  if (p.n == 0) return s;
  const Real a = p.alpha;
  s.values[1] = (a + Real(1) - x) * w;
  for (int k = 1; k < p.n; ++k) {
    const auto kk = static_cast<Real>(k);
    s.values[k + 1] =
        ((Real(2) * kk + a + Real(1) - x) * s.values[k] - (kk + a) * s.values[k - 1]) / (kk + Real(1));
  }
  return s;
}

/// Difference recurrence on Laguerre functions started from e^{-x/2}.
template <std::floating_point Real>
LagSeries<Real> eval_fun_modified(const LagParams<Real>& p, Real x) {
  detail::check_args(p, x);
  LagSeries<Real> s{p, x, SeriesKind::function, {}, {}, {}};
  const auto n = static_cast<std::size_t>(p.n);
  s.values.resize(n + 1);
  s.deltas.resize(n);
  const Real w = std::exp(-x / Real(2));
  s.values[0] = w;
  if (n == 0) return s;
  const Real a = p.alpha;
  Real L = (Real(1) + a - x) * w;
  Real dL = (a - x) * w;
  s.values[1] = L;
  s.deltas[0] = dL;
  for (std::size_t k = 1; k < n; ++k) {
    const auto kk = static_cast<Real>(k);
    dL = ((kk + a) * dL - x * L) / (kk + Real(1));
    L = L + dL;
    s.values[k + 1] = L;
    s.deltas[k] = dL;
  }
  return s;
}

namespace detail {

/// Remaining part of the weight e^{-x/2} during the stable recurrence.
///
/// In binary mode only powers of two are taken out of L, and the weight is
/// finished as 2^(shifts - T) exp(-f) with x/2 = T ln 2 + f, 0 <= f < ln 2.
/// Both T and f depend on x alone, so the result is independent of where
/// the shifts happened.
template <std::floating_point Real>
class WeightBudget {
 public:
  WeightBudget(Real x, bool binary) : half_(x / Real(2)), left_(half_), binary_(binary) {
    if (!binary_) return;
    // Cody-Waite split of ln 2; T * ln2_hi is exact and, by Sterbenz, so is
    // the subtraction from x/2.
    constexpr Real ln2_hi = Real(6.93147180369123816490e-01);
    constexpr Real ln2_lo = Real(1.90821492927058770002e-10);
    total_ = static_cast<long>(std::floor(half_ / std::numbers::ln2_v<Real>));
    const auto t = static_cast<Real>(total_);
    Real f = (half_ - t * ln2_hi) - t * ln2_lo;
    if (f < Real(0)) {
      --total_;
      f += std::numbers::ln2_v<Real>;
    }
    frac_ = std::exp(-f);
  }

  Real left() const { return left_; }

  /// Releases min(max(log|L| + headroom, 0), left) of the budget onto L and dL.
  void release(Real& L, Real& dL, Real headroom) {
    const Real xc = std::min(std::max(std::log(std::abs(L)) + headroom, Real(0)), left_);
    if (!binary_) {
      const Real f = std::exp(-xc);
      dL *= f;
      L *= f;
      left_ -= xc;
      return;
    }
    const auto m = static_cast<long>(std::floor(xc / std::numbers::ln2_v<Real>));
    if (m <= 0) return;
    L = std::ldexp(L, static_cast<int>(-m));
    dL = std::ldexp(dL, static_cast<int>(-m));
    shifts_ += m;
    left_ = half_ - static_cast<Real>(shifts_) * std::numbers::ln2_v<Real>;
  }

  /// v * (weight still held back).
  Real apply(Real v) const {
    if (!binary_) return mul_exp_neg(v, left_);
    return std::ldexp(v * frac_, static_cast<int>(shifts_ - total_));
  }

 private:
  Real half_;
  Real left_;
  bool binary_;
  long shifts_{0};
  long total_{0};
  Real frac_{1};
};

/// Runs the weighted difference recurrence from degree 1 up to n >= 2 and
/// calls on_step(k, L, dL, budget) after degree k has been formed; the
/// weighted values are budget.apply(L), budget.apply(dL).
template <std::floating_point Real, class OnStep>
void stable_recurrence(Real alpha, int n, Real x, const StableEvalConfig& cfg, OnStep&& on_step) {
  const Real threshold = std::exp(Real(cfg.k1));
  const Real headroom = Real(cfg.k2);
  Real L = Real(1) + alpha - x;
  Real dL = alpha - x;
  WeightBudget<Real> budget(x, cfg.binary_rescale);
  for (int k = 1; k < n; ++k) {
    const auto kk = static_cast<Real>(k);
    dL = ((kk + alpha) * dL - x * L) / (kk + Real(1));
    L = L + dL;
    if (k == 1 || std::abs(L) > threshold) budget.release(L, dL, headroom);
    on_step(k + 1, L, dL, std::as_const(budget));
  }
  if (!std::isfinite(L)) {
    throw numeric_error("stable Laguerre recurrence: non-finite intermediate despite rescaling");
  }
}

}  // namespace detail

/// e^{-x/2} L_n^(a)(x) by the adaptively weighted difference recurrence.
///
/// The weight e^{-x/2} is held back as a budget and released in portions:
/// after the first step, and whenever |L| exceeds exp(k1), L and dL are
/// multiplied by exp(-x_c) with x_c = min(max(log|L| + k2, 0), budget).
/// Whatever is left of the budget is applied at the end.
template <std::floating_point Real>
Real eval_fun_stable(const LagParams<Real>& p, Real x, const StableEvalConfig& cfg = {}) {
  detail::check_args(p, x);
  validate(cfg);
  const Real a = p.alpha;
  if (p.n == 0) return std::exp(-x / Real(2));
  if (p.n == 1) return (Real(1) + a - x) * std::exp(-x / Real(2));
  Real out{};
  detail::stable_recurrence(a, p.n, x, cfg, [&](int k, Real L, Real, const auto& budget) {
    if (k == p.n) out = budget.apply(L);
  });
  return out;
}

/// Series form of eval_fun_stable: all degrees 0..n together with their
/// differences, each entry weighted by what is left of the budget at the
/// step that produced it. Entry n agrees with eval_fun_stable bit for bit.
template <std::floating_point Real>
LagSeries<Real> eval_fun_stable_series(const LagParams<Real>& p, Real x, const StableEvalConfig& cfg = {}) {
  detail::check_args(p, x);
  validate(cfg);
  LagSeries<Real> s{p, x, SeriesKind::function, {}, {}, {}};
  const auto n = static_cast<std::size_t>(p.n);
  s.values.resize(n + 1);
  s.deltas.resize(n);
  const Real a = p.alpha;
  const Real half = x / Real(2);
  s.values[0] = std::exp(-half);
  if (n == 0) return s;
  if (n == 1) {
    s.values[1] = (Real(1) + a - x) * std::exp(-half);
    s.deltas[0] = (a - x) * std::exp(-half);
    return s;
  }
  s.values[1] = detail::mul_exp_neg(Real(1) + a - x, half);
  s.deltas[0] = detail::mul_exp_neg(a - x, half);
  detail::stable_recurrence(a, p.n, x, cfg, [&](int k, Real L, Real dL, const auto& budget) {
    s.values[k] = budget.apply(L);
    s.deltas[k - 1] = budget.apply(dL);
  });
  return s;
}

/// Derivatives of the Laguerre functions held in `series`:
///   d L^_0 = -L^_0 / 2,  d L^_1 = -(a + 3 - x)/2 L^_0,
///   d L^_{k+1} = d L^_k - (L^_k + L^_{k+1}) / 2.
template <std::floating_point Real>
std::vector<Real> fun_derivative_from_values(const LagSeries<Real>& series) {
  if (series.kind != SeriesKind::function) {
    throw std::invalid_argument("fun_derivative_from_values expects Laguerre function values");
  }
  const auto& v = series.values;
  std::vector<Real> d(v.size());
  if (d.empty()) return d;
  d[0] = -v[0] / Real(2);
  if (d.size() == 1) return d;
  d[1] = -((series.params.alpha + Real(3) - series.x) / Real(2)) * v[0];
  for (std::size_t k = 1; k + 1 < d.size(); ++k) d[k + 1] = d[k] - (v[k] + v[k + 1]) / Real(2);
  return d;
}

/// Derivatives of the Laguerre functions of degrees 0..n, from the stable
/// series, so large x is safe.
template <std::floating_point Real>
std::vector<Real> eval_fun_derivative(const LagParams<Real>& p, Real x, const StableEvalConfig& cfg = {}) {
  return fun_derivative_from_values(eval_fun_stable_series(p, x, cfg));
}

/// gamma_n^(a) = Gamma(n + a + 1) / n!, the squared L^2 norm under x^a e^{-x}.
inline double norm_const(const LagParams<double>& p) {
  validate(p);
  return gamma_ratio(static_cast<double>(p.n) + p.alpha + 1.0, static_cast<double>(p.n) + 1.0);
}

}  // namespace lagspec
