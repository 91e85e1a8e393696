#pragma once

// Extended-precision reference values for Laguerre polynomials, functions
// and Gauss nodes.
//
// Everything here is computed with HpScalar at a configurable number of
// decimal digits (24 by default), independently of the double-precision
// evaluators. Results leave this module as decimal strings.

#include <cmath>
#include <cstdio>
#include <cstddef>
#include <string>
#include <vector>

#include "lagspec/errors.hpp"
#include "lagspec/hp_scalar.hpp"
#include "lagspec/quadrature.hpp"

namespace lagspec {

namespace hp {

struct PolyValue {
  HpScalar value;
  HpScalar derivative;
};

/// L_0..L_n by the three-term recurrence in extended precision.
inline std::vector<HpScalar> poly_series(const HpContext& ctx, const HpScalar& alpha, int n, const HpScalar& x) {
  std::vector<HpScalar> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  const HpScalar one(ctx, 1L);
  out.push_back(one);
  if (n == 0) return out;
  out.push_back(alpha + one - x);
  for (int k = 1; k < n; ++k) {
    const HpScalar kk(ctx, static_cast<long>(k));
    const HpScalar c1 = HpScalar(ctx, static_cast<long>(2 * k + 1)) + alpha - x;
    const HpScalar c2 = kk + alpha;
    out.push_back((c1 * out[k] - c2 * out[k - 1]) / HpScalar(ctx, static_cast<long>(k + 1)));
  }
  return out;
}

/// L_n and L_n' (derivative via L_{k+1}' = L_k' - L_k).
inline PolyValue poly(const HpContext& ctx, const HpScalar& alpha, int n, const HpScalar& x) {
  const HpScalar one(ctx, 1L);
  HpScalar L(ctx, 1L), Lm(ctx, 0L), D(ctx, 0L);
  if (n == 0) return {L, D};
  Lm = L;
  L = alpha + one - x;
  D = -one;
  for (int k = 1; k < n; ++k) {
    const HpScalar c1 = HpScalar(ctx, static_cast<long>(2 * k + 1)) + alpha - x;
    const HpScalar c2 = HpScalar(ctx, static_cast<long>(k)) + alpha;
    HpScalar next = (c1 * L - c2 * Lm) / HpScalar(ctx, static_cast<long>(k + 1));
    D -= L;
    Lm = L;
    L = next;
  }
  return {L, D};
}

/// Zeros of L_{N+1}^(a): double eigenvalue seeds refined by Newton until
/// |step| < 10^(2 - digits) x. The iteration runs with guard digits that grow
/// with log10 N, since the recurrence loses about that much to rounding.
inline std::vector<HpScalar> gauss_nodes(const HpContext& ctx, double alpha, int N, int max_iters = 60) {
  validate(ctx);
  const auto seeds = nodes_eigen_seed(alpha, N);
  const HpContext work{ctx.digits + 6 + static_cast<int>(std::ceil(std::log10(N + 2.0)))};
  const HpScalar a(work, alpha);
  const HpScalar tol(work, "1e" + std::to_string(2 - ctx.digits));
  std::vector<HpScalar> nodes;
  nodes.reserve(seeds.size());
  for (std::size_t j = 0; j < seeds.size(); ++j) {
    HpScalar x(work, seeds[j]);
    bool converged = false;
    for (int it = 0; it < max_iters; ++it) {
      const auto v = poly(work, a, N + 1, x);
      const HpScalar step = v.value / v.derivative;
      x -= step;
      if (!x.is_finite()) break;
      if (abs(step) < tol * abs(x)) {
        converged = true;
        break;
      }
    }
    if (!converged) throw numeric_error("hp gauss_nodes: Newton iteration did not converge", j);
    nodes.push_back(x);
  }
  return nodes;
}

}  // namespace hp

/// L_n^(a)(x) at ctx.digits, with alpha and x given as decimal strings.
inline std::string hp_eval_poly(const HpContext& ctx, const std::string& alpha, int n, const std::string& x) {
  validate(ctx);
  if (n < 0) throw std::domain_error("hp_eval_poly: degree must be nonnegative");
  return hp::poly(ctx, HpScalar(ctx, alpha), n, HpScalar(ctx, x)).value.to_string(ctx.digits);
}

/// d/dx L_n^(a)(x) at ctx.digits.
inline std::string hp_eval_poly_derivative(const HpContext& ctx, const std::string& alpha, int n,
                                           const std::string& x) {
  validate(ctx);
  if (n < 0) throw std::domain_error("hp_eval_poly_derivative: degree must be nonnegative");
  return hp::poly(ctx, HpScalar(ctx, alpha), n, HpScalar(ctx, x)).derivative.to_string(ctx.digits);
}

/// L_0..L_n at ctx.digits.
inline std::vector<std::string> hp_eval_poly_series(const HpContext& ctx, const std::string& alpha, int n,
                                                    const std::string& x) {
  validate(ctx);
  if (n < 0) throw std::domain_error("hp_eval_poly_series: degree must be nonnegative");
  const auto s = hp::poly_series(ctx, HpScalar(ctx, alpha), n, HpScalar(ctx, x));
  std::vector<std::string> out;
  out.reserve(s.size());
  for (const auto& v : s) out.push_back(v.to_string(ctx.digits));
  return out;
}

/// e^{-x/2} L_n^(a)(x) at ctx.digits; the extended exponent range keeps
/// both factors representable.
inline std::string hp_eval_fun(const HpContext& ctx, const std::string& alpha, int n, const std::string& x) {
  validate(ctx);
  if (n < 0) throw std::domain_error("hp_eval_fun: degree must be nonnegative");
  const HpScalar xs(ctx, x);
  const auto v = hp::poly(ctx, HpScalar(ctx, alpha), n, xs);
  return (v.value * exp(-(xs / HpScalar(ctx, 2L)))).to_string(ctx.digits);
}

/// Reference Gauss nodes (zeros of L_{N+1}^(a)) as decimal strings.
inline std::vector<std::string> hp_gauss_nodes(const HpContext& ctx, double alpha, int N) {
  const auto nodes = hp::gauss_nodes(ctx, alpha, N);
  std::vector<std::string> out;
  out.reserve(nodes.size());
  for (const auto& v : nodes) out.push_back(v.to_string(ctx.digits));
  return out;
}

/// Exact (hexadecimal floating-point) rendering of a double, for passing
/// double abscissae to the oracle without rounding.
inline std::string exact_repr(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

}  // namespace lagspec
