#pragma once

// Laguerre-Gauss and Laguerre-Gauss-Radau rules.
//
// Nodes are seeded by the eigenvalues of the Jacobi matrix and polished by
// Newton's method on L_{N+1}^(a), evaluated through the difference
// recurrence. Weights use the closed forms in terms of L_N^(a)(x_j),
// rewritten through the Laguerre function e^{-x/2} L_N^(a) so that the
// function-form weights e^{x_j} w_j never require e^{x_j} itself.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "lagspec/errors.hpp"
#include "lagspec/gamma_ratio.hpp"
#include "lagspec/recurrence.hpp"
#include "lagspec/tridiagonal.hpp"

namespace lagspec {

enum class RuleKind { gauss, gauss_radau };

inline const char* to_string(RuleKind k) { return k == RuleKind::gauss ? "gauss" : "radau"; }

/// An (N+1)-point rule for the weight x^a e^{-x} on (0, inf).
struct GaussRule {
  double alpha{0};
  RuleKind kind{RuleKind::gauss};
  std::vector<double> nodes;        ///< ascending
  std::vector<double> weights;      ///< w_j, exact against x^a e^{-x}
  std::vector<double> fun_weights;  ///< e^{x_j} w_j, exact against x^a

  std::size_t size() const { return nodes.size(); }
  int order() const { return static_cast<int>(nodes.size()) - 1; }
};

enum class RecurrenceKind { standard, modified };

struct NewtonConfig {
  int max_iters{10};
  double rel_step_tol{4.0 * std::numeric_limits<double>::epsilon()};
  RecurrenceKind recurrence{RecurrenceKind::modified};
};

inline void validate(const NewtonConfig& cfg) {
  if (cfg.max_iters < 1) throw std::domain_error("NewtonConfig: max_iters must be at least 1");
  if (!(cfg.rel_step_tol > 0.0 && cfg.rel_step_tol < 1e-8)) {
    throw std::domain_error("NewtonConfig: rel_step_tol must lie in (0, 1e-8)");
  }
}

struct RefinedNodes {
  std::vector<double> nodes;
  /// Indices whose iteration left its bracket and were reset to the seed.
  std::vector<std::size_t> fallback;
};

namespace detail {

inline void check_family(double alpha, int N) {
  if (!(alpha > -1.0)) throw std::domain_error("Laguerre rule: alpha must exceed -1");
  if (N < 0) throw std::domain_error("Laguerre rule: N must be nonnegative");
}

/// L_n(x) / L_n'(x). Both are carried with a common power-of-two scale so
/// the ratio survives degrees whose values exceed the double range.
inline double newton_ratio(double alpha, int n, double x, RecurrenceKind kind) {
  if (n == 0) return 0.0;
  double L = 1.0 + alpha - x;  // L_1
  double D = -1.0;             // L_1'
  if (kind == RecurrenceKind::modified) {
    double dL = alpha - x;
    for (int k = 1; k < n; ++k) {
      dL = ((k + alpha) * dL - x * L) / (k + 1.0);
      D -= L;
      L += dL;
      if (std::abs(L) > 0x1p600 || std::abs(D) > 0x1p600) {
        L = std::ldexp(L, -600);
        dL = std::ldexp(dL, -600);
        D = std::ldexp(D, -600);
      }
    }
  } else {
    double Lm = 1.0;
    for (int k = 1; k < n; ++k) {
      const double next = ((2.0 * k + alpha + 1.0 - x) * L - (k + alpha) * Lm) / (k + 1.0);
      D -= L;
      Lm = L;
      L = next;
      if (std::abs(L) > 0x1p600 || std::abs(D) > 0x1p600) {
        L = std::ldexp(L, -600);
        Lm = std::ldexp(Lm, -600);
        D = std::ldexp(D, -600);
      }
    }
  }
  return L / D;
}

}  // namespace detail

/// Eigenvalues of the (N+1)x(N+1) Jacobi matrix with diagonal 2j + a + 1 and
/// off-diagonal -sqrt(j (j + a)): the zeros of L_{N+1}^(a), to the accuracy
/// a double-precision eigensolver delivers.
inline std::vector<double> nodes_eigen_seed(double alpha, int N) {
  detail::check_family(alpha, N);
  const auto n = static_cast<std::size_t>(N) + 1;
  std::vector<double> diag(n), off(n - 1);
  for (std::size_t j = 0; j < n; ++j) diag[j] = 2.0 * static_cast<double>(j) + alpha + 1.0;
  for (std::size_t j = 1; j < n; ++j) {
    const auto jj = static_cast<double>(j);
    off[j - 1] = -std::sqrt(jj * (jj + alpha));
  }
  auto x = tridiagonal_eigenvalues(diag, off);
  for (std::size_t j = 1; j < x.size(); ++j) {
    if (!(x[j] > x[j - 1])) throw numeric_error("nodes_eigen_seed: eigenvalues not simple", j);
  }
  return x;
}

/// Newton iteration x <- x - L_{N+1}(x) / L_{N+1}'(x) from each seed.
/// A node that leaves the interval between its neighbouring seeds is reset
/// to its seed and reported in `fallback`.
inline RefinedNodes refine_newton(double alpha, int N, const std::vector<double>& seeds, const NewtonConfig& cfg = {}) {
  detail::check_family(alpha, N);
  validate(cfg);
  if (seeds.size() != static_cast<std::size_t>(N) + 1) {
    throw std::invalid_argument("refine_newton: expected N + 1 seeds");
  }
  for (std::size_t j = 0; j < seeds.size(); ++j) {
    if (!(seeds[j] > 0.0) || (j > 0 && !(seeds[j] > seeds[j - 1]))) {
      throw std::invalid_argument("refine_newton: seeds must be positive and strictly increasing");
    }
  }
  RefinedNodes out{seeds, {}};
  const int degree = N + 1;
  for (std::size_t j = 0; j < seeds.size(); ++j) {
    const double lo = j == 0 ? 0.0 : seeds[j - 1];
    const double hi = j + 1 < seeds.size() ? seeds[j + 1] : std::numeric_limits<double>::infinity();
    double x = seeds[j];
    bool escaped = false;
    for (int it = 0; it < cfg.max_iters; ++it) {
      const double step = detail::newton_ratio(alpha, degree, x, cfg.recurrence);
      if (!std::isfinite(step)) {
        escaped = true;
        break;
      }
      x -= step;
      if (!(x > lo && x < hi)) {
        escaped = true;
        break;
      }
      if (std::abs(step) <= cfg.rel_step_tol * x) break;
    }
    if (escaped) {
      out.fallback.push_back(j);
      x = seeds[j];
    }
    out.nodes[j] = x;
  }
  for (std::size_t j = 1; j < out.nodes.size(); ++j) {
    if (!(out.nodes[j] > out.nodes[j - 1])) throw numeric_error("refine_newton: refined nodes lost their order", j);
  }
  return out;
}

/// Function-form weights e^{x_j} w_j recomputed from a rule's nodes.
///
/// Gauss:  G x_j / [L^_N(x_j)]^2,   G = Gamma(N+a+1) / ((N+a+1) (N+1)!)
/// Radau:  G' / [L^_N(x_j)]^2 (j >= 1),  G' = Gamma(N+a+1) / (N! (N+a+1)),
///         and w_0 at the fixed node x_0 = 0.
/// L^_N = e^{-x/2} L_N is evaluated by the stable recurrence, so the
/// products are formed without any e^{x_j} and stay finite for large N.
inline std::vector<double> function_weights(const GaussRule& rule) {
  const int N = rule.order();
  const double a = rule.alpha;
  detail::check_family(a, N);
  std::vector<double> w(rule.size());
  if (rule.kind == RuleKind::gauss) {
    const double G = std::exp(log_gamma_ratio(N + a + 1.0, N + 2.0) - std::log(N + a + 1.0));
    for (std::size_t j = 0; j < w.size(); ++j) {
      const double Lhat = eval_fun_stable(LagParams<double>{a, N}, rule.nodes[j]);
      w[j] = G * rule.nodes[j] / (Lhat * Lhat);
    }
  } else {
    if (N < 1) throw std::domain_error("Gauss-Radau rule needs N >= 1");
    w[0] = (a + 1.0) * std::tgamma(a + 1.0) * std::tgamma(a + 1.0) * gamma_ratio(N + 1.0, N + a + 2.0);
    const double G = std::exp(log_gamma_ratio(N + a + 1.0, N + 1.0) - std::log(N + a + 1.0));
    for (std::size_t j = 1; j < w.size(); ++j) {
      const double Lhat = eval_fun_stable(LagParams<double>{a, N}, rule.nodes[j]);
      w[j] = G / (Lhat * Lhat);
    }
  }
  return w;
}

namespace detail {

inline void fill_weights(GaussRule& rule) {
  rule.fun_weights = function_weights(rule);
  rule.weights.resize(rule.size());
  for (std::size_t j = 0; j < rule.size(); ++j) {
    rule.weights[j] = mul_exp_neg(rule.fun_weights[j], rule.nodes[j]);
  }
}

}  // namespace detail

/// (N+1)-point Laguerre-Gauss rule, exact for polynomials of degree 2N+1.
inline GaussRule gauss_rule(double alpha, int N, const NewtonConfig& cfg = {}) {
  detail::check_family(alpha, N);
  GaussRule rule;
  rule.alpha = alpha;
  rule.kind = RuleKind::gauss;
  rule.nodes = refine_newton(alpha, N, nodes_eigen_seed(alpha, N), cfg).nodes;
  detail::fill_weights(rule);
  return rule;
}

/// (N+1)-point Laguerre-Gauss-Radau rule with x_0 = 0, exact for degree 2N.
/// Interior nodes are the zeros of d/dx L_{N+1}^(a) = -L_N^(a+1).
inline GaussRule gauss_radau_rule(double alpha, int N, const NewtonConfig& cfg = {}) {
  detail::check_family(alpha, N);
  if (N < 1) throw std::domain_error("Gauss-Radau rule needs N >= 1");
  const auto interior = refine_newton(alpha + 1.0, N - 1, nodes_eigen_seed(alpha + 1.0, N - 1), cfg).nodes;
  GaussRule rule;
  rule.alpha = alpha;
  rule.kind = RuleKind::gauss_radau;
  rule.nodes.reserve(interior.size() + 1);
  rule.nodes.push_back(0.0);
  rule.nodes.insert(rule.nodes.end(), interior.begin(), interior.end());
  detail::fill_weights(rule);
  return rule;
}

enum class WeightForm { poly_weighted, function_form };

/// Sum_j f(x_j) w_j (poly_weighted) or Sum_j f(x_j) e^{x_j} w_j (function_form).
inline double integrate(const GaussRule& rule, const std::function<double(double)>& f,
                        WeightForm form = WeightForm::poly_weighted) {
  const auto& w = form == WeightForm::poly_weighted ? rule.weights : rule.fun_weights;
  double sum = 0.0;
  for (std::size_t j = 0; j < rule.size(); ++j) {
    const double v = f(rule.nodes[j]);
    if (!std::isfinite(v)) {
      throw numeric_error("integrate: integrand is not finite at x = " + std::to_string(rule.nodes[j]), j);
    }
    sum += v * w[j];
  }
  return sum;
}

/// Weights from the polynomial closed form evaluated in plain double
/// arithmetic, w_j = G x_j / [L_N(x_j)]^2 with L_N from the polynomial
/// recurrence. Kept as a reference path: once L_N(x_j) leaves the double
/// range the result contains non-finite or zero entries.
inline std::vector<double> gauss_weights_polynomial_path(double alpha, const std::vector<double>& nodes,
                                                         RecurrenceKind kind = RecurrenceKind::standard) {
  const int N = static_cast<int>(nodes.size()) - 1;
  detail::check_family(alpha, N);
  const double G = std::exp(log_gamma_ratio(N + alpha + 1.0, N + 2.0) - std::log(N + alpha + 1.0));
  std::vector<double> w(nodes.size());
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const LagParams<double> p{alpha, N};
    const double L = kind == RecurrenceKind::standard ? eval_poly_standard(p, nodes[j]).back()
                                                      : eval_poly_modified(p, nodes[j]).back();
    w[j] = G * nodes[j] / (L * L);
  }
  return w;
}

}  // namespace lagspec
