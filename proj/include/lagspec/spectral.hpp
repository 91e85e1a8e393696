#pragma once

// Scaled Laguerre spectral-Galerkin solver for
//   -u'' + gamma u = f  on (0, inf),  u(0) = 0,  u -> 0 at infinity.
//
// With y = beta x and v(y) = u(y / beta) the problem becomes
//   -v'' + (gamma / beta^2) v = f(y / beta) / beta^2,
// which is discretized in span{psi_0..psi_{N-1}},
//   psi_n(y) = e^{-y/2} (L_n(y) - L_{n+1}(y)),  psi_n(0) = 0.
// Orthonormality of the Laguerre functions makes both the mass and the
// stiffness matrix tridiagonal, so a solve is O(N) once the right-hand side
// is projected.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "lagspec/errors.hpp"
#include "lagspec/gamma_ratio.hpp"
#include "lagspec/quadrature.hpp"
#include "lagspec/recurrence.hpp"
#include "lagspec/tridiagonal.hpp"

namespace lagspec {

using ScalarFn = std::function<double(double)>;

struct ModelProblem {
  double gamma{1.0};
  ScalarFn f;
  ScalarFn u_exact;   // optional
  ScalarFn du_exact;  // optional
};

inline void validate(const ModelProblem& p) {
  if (!(p.gamma > 0.0)) throw std::domain_error("ModelProblem: gamma must be positive");
  if (!p.f) throw std::invalid_argument("ModelProblem: right-hand side f is missing");
}

/// psi_0..psi_{N-1} and their derivatives at one point.
struct BasisValues {
  std::vector<double> psi;
  std::vector<double> dpsi;
};

/// psi_n = -(L^_{n+1} - L^_n) is read off the stable difference recurrence,
/// which avoids cancelling two nearly equal function values;
/// psi_n' = (L^_n + L^_{n+1}) / 2.
inline BasisValues basis_series(int N, double y) {
  if (N < 0) throw std::domain_error("basis_series: N must be nonnegative");
  BasisValues b;
  if (N == 0) {
    detail::check_args(LagParams<double>{0.0, 0}, y);
    return b;
  }
  const auto s = eval_fun_stable_series(LagParams<double>{0.0, N}, y);
  const auto n = static_cast<std::size_t>(N);
  b.psi.resize(n);
  b.dpsi.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    b.psi[k] = -s.deltas[k];
    b.dpsi[k] = 0.5 * (s.values[k] + s.values[k + 1]);
  }
  return b;
}

inline double basis_eval(int n, double y) {
  if (n < 0) throw std::domain_error("basis_eval: n must be nonnegative");
  return basis_series(n + 1, y).psi.back();
}

inline double basis_deriv(int n, double y) {
  if (n < 0) throw std::domain_error("basis_deriv: n must be nonnegative");
  return basis_series(n + 1, y).dpsi.back();
}

/// Mass matrix (psi_m, psi_n): 2 on the diagonal, -1 next to it.
inline SymTridiagonal mass_matrix(int N) {
  if (N < 1) throw std::domain_error("mass_matrix: N must be at least 1");
  const auto n = static_cast<std::size_t>(N);
  return {std::vector<double>(n, 2.0), std::vector<double>(n - 1, -1.0)};
}

/// Stiffness matrix (psi_m', psi_n'): 1/2 on the diagonal, 1/4 next to it.
inline SymTridiagonal stiffness_matrix(int N) {
  if (N < 1) throw std::domain_error("stiffness_matrix: N must be at least 1");
  const auto n = static_cast<std::size_t>(N);
  return {std::vector<double>(n, 0.5), std::vector<double>(n - 1, 0.25)};
}

/// Stiffness + gamma_eff * mass.
inline SymTridiagonal assemble_system(int N, double gamma_eff) {
  if (!(gamma_eff > 0.0)) throw std::domain_error("assemble_system: gamma_eff must be positive");
  auto A = stiffness_matrix(N);
  const auto M = mass_matrix(N);
  for (std::size_t i = 0; i < A.diag.size(); ++i) A.diag[i] += gamma_eff * M.diag[i];
  for (std::size_t i = 0; i < A.off.size(); ++i) A.off[i] += gamma_eff * M.off[i];
  return A;
}

inline int default_quadrature_order(int N) { return 2 * N; }

namespace detail {

inline void check_discretization(int N, int M, double beta) {
  if (N < 1) throw std::domain_error("spectral: N must be at least 1");
  if (M < N + 1) throw std::domain_error("spectral: quadrature order M must be at least N + 1");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw std::domain_error("spectral: beta must be positive");
}

}  // namespace detail

/// b_n = sum_j g(y_j) psi_n(y_j) w^_j / beta^2 over `rule`, g(y) = f(y / beta).
/// `rule` must be an alpha = 0 Gauss rule of order M >= N + 1.
inline std::vector<double> project_rhs(const ModelProblem& problem, int N, double beta, const GaussRule& rule) {
  validate(problem);
  detail::check_discretization(N, rule.order(), beta);
  if (rule.alpha != 0.0 || rule.kind != RuleKind::gauss) {
    throw std::invalid_argument("project_rhs: expects an alpha = 0 Gauss rule");
  }
  std::vector<double> b(static_cast<std::size_t>(N), 0.0);
  const double scale = 1.0 / (beta * beta);
  for (std::size_t j = 0; j < rule.size(); ++j) {
    const double y = rule.nodes[j];
    const double g = problem.f(y / beta);
    if (!std::isfinite(g)) {
      throw numeric_error("project_rhs: f is not finite at x = " + std::to_string(y / beta), j);
    }
    if (g == 0.0) continue;
    const auto basis = basis_series(N, y);
    const double c = g * rule.fun_weights[j] * scale;
    for (std::size_t n = 0; n < b.size(); ++n) b[n] += c * basis.psi[n];
  }
  return b;
}

inline std::vector<double> project_rhs(const ModelProblem& problem, int N, int M, double beta) {
  detail::check_discretization(N, M, beta);
  return project_rhs(problem, N, beta, gauss_rule(0.0, M));
}

struct SpectralSolution {
  int N{0};
  int M{0};
  double beta{1.0};
  std::vector<double> coeffs;  // of psi_n(beta x)
  ModelProblem problem;

  /// u_N(x) = sum_n coeffs[n] psi_n(beta x).
  double value(double x) const {
    const auto b = basis_series(N, beta * x);
    double s = 0.0;
    for (std::size_t n = 0; n < coeffs.size(); ++n) s += coeffs[n] * b.psi[n];
    return s;
  }

  /// u_N'(x) = beta sum_n coeffs[n] psi_n'(beta x).
  double derivative(double x) const {
    const auto b = basis_series(N, beta * x);
    double s = 0.0;
    for (std::size_t n = 0; n < coeffs.size(); ++n) s += coeffs[n] * b.dpsi[n];
    return beta * s;
  }
};

inline SpectralSolution solve(const ModelProblem& problem, int N, double beta, const GaussRule& rule) {
  auto b = project_rhs(problem, N, beta, rule);
  const auto A = assemble_system(N, problem.gamma / (beta * beta));
  SpectralSolution sol{N, rule.order(), beta, solve_spd_tridiagonal(A, b), problem};
  for (std::size_t n = 0; n < sol.coeffs.size(); ++n) {
    if (!std::isfinite(sol.coeffs[n])) throw numeric_error("solve: non-finite coefficient", n);
  }
  return sol;
}

inline SpectralSolution solve(const ModelProblem& problem, int N, int M, double beta) {
  detail::check_discretization(N, M, beta);
  return solve(problem, N, beta, gauss_rule(0.0, M));
}

/// Thread-safe memo of alpha = 0 Gauss rules by order. Concurrent requests
/// for the same order wait for a single construction.
class RuleCache {
 public:
  std::shared_ptr<const GaussRule> get(int order) {
    std::shared_future<std::shared_ptr<const GaussRule>> fut;
    std::promise<std::shared_ptr<const GaussRule>> promise;
    bool owner = false;
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = rules_.find(order);
      if (it == rules_.end()) {
        fut = promise.get_future().share();
        rules_.emplace(order, fut);
        owner = true;
      } else {
        fut = it->second;
      }
    }
    if (owner) {
      try {
        promise.set_value(std::make_shared<const GaussRule>(gauss_rule(0.0, order)));
      } catch (...) {
        promise.set_exception(std::current_exception());
      }
    }
    return fut.get();
  }

 private:
  std::mutex mu_;
  std::map<int, std::shared_future<std::shared_ptr<const GaussRule>>> rules_;
};

struct ErrorReport {
  int N{0};
  int M{0};
  double beta{1.0};
  double l2_error{0.0};       // ||u - u_N|| in x
  double h1_semi_error{0.0};  // |u - u_N|_1 in x
  // |difference| of the L2 error evaluated with 4M points instead of
  // 2M + 2; set when the diagnostic ran.
  std::optional<double> l2_quadrature_spread;

  /// True when the quadrature spread exceeds 1% of the error itself.
  bool quadrature_limited() const { return l2_quadrature_spread && *l2_quadrature_spread > 0.01 * l2_error; }
};

struct ErrorNormOptions {
  bool diagnostic{false};
};

namespace detail {

struct NormPair {
  double l2{0.0};
  double h1{0.0};
};

// ||v - v_N|| and |v - v_N|_1 in y by the function-form rule.
inline NormPair y_norms(const SpectralSolution& sol, const ModelProblem& problem, const GaussRule& rule) {
  double l2 = 0.0, h1 = 0.0;
  for (std::size_t j = 0; j < rule.size(); ++j) {
    const double y = rule.nodes[j];
    const double x = y / sol.beta;
    const auto b = basis_series(sol.N, y);
    double v = 0.0, dv = 0.0;
    for (std::size_t n = 0; n < sol.coeffs.size(); ++n) {
      v += sol.coeffs[n] * b.psi[n];
      dv += sol.coeffs[n] * b.dpsi[n];
    }
    const double e0 = problem.u_exact(x) - v;
    const double e1 = problem.du_exact(x) / sol.beta - dv;
    if (!std::isfinite(e0) || !std::isfinite(e1)) {
      throw numeric_error("error_norms: exact solution is not finite at x = " + std::to_string(x), j);
    }
    l2 += e0 * e0 * rule.fun_weights[j];
    h1 += e1 * e1 * rule.fun_weights[j];
  }
  return {std::sqrt(l2), std::sqrt(h1)};
}

}  // namespace detail

/// L2 and H1-seminorm errors in x, from a (2M + 2)-point rule in y:
///   ||u - u_N|| = ||v - v_N|| / sqrt(beta),  |u - u_N|_1 = sqrt(beta) |v - v_N|_1.
inline ErrorReport error_norms(const SpectralSolution& sol, const ModelProblem& problem,
                               const ErrorNormOptions& opt = {}, RuleCache* cache = nullptr) {
  if (!problem.u_exact || !problem.du_exact) {
    throw std::invalid_argument("error_norms: the problem has no exact solution and derivative");
  }
  const auto rule_of = [&](int order) {
    return cache ? cache->get(order) : std::make_shared<const GaussRule>(gauss_rule(0.0, order));
  };
  const auto y = detail::y_norms(sol, problem, *rule_of(2 * sol.M + 1));
  ErrorReport r;
  r.N = sol.N;
  r.M = sol.M;
  r.beta = sol.beta;
  r.l2_error = y.l2 / std::sqrt(sol.beta);
  r.h1_semi_error = y.h1 * std::sqrt(sol.beta);
  if (opt.diagnostic) {
    const auto fine = detail::y_norms(sol, problem, *rule_of(4 * sol.M - 1));
    r.l2_quadrature_spread = std::abs(fine.l2 / std::sqrt(sol.beta) - r.l2_error);
  }
  return r;
}

/// beta* = 2|z| for data decaying like e^{z x}, Re z < 0.
inline double optimal_beta_exponential(double z_re, double z_im) {
  if (!(z_re < 0.0)) throw std::domain_error("optimal_beta_exponential: requires Re z < 0");
  return 2.0 * std::hypot(z_re, z_im);
}

/// Minimum over beta of the weighted m-th seminorm of e^{z x}:
/// (|z| + Re z)^m (m - 1)! / |2 Re z|^m.
inline double min_seminorm_factor(double z_re, double z_im, int m) {
  if (!(z_re < 0.0)) throw std::domain_error("min_seminorm_factor: requires Re z < 0");
  if (m < 1) throw std::domain_error("min_seminorm_factor: m must be at least 1");
  const double base = std::hypot(z_re, z_im) + z_re;
  if (base <= 0.0) return 0.0;
  const double md = static_cast<double>(m);
  return std::exp(md * std::log(base) + log_gamma_ratio(md, 1.0) - md * std::log(std::abs(2.0 * z_re)));
}

struct SweepOptions {
  std::function<int(int)> m_rule;  // N -> M, default 2N
  ErrorNormOptions norms;
  unsigned threads{0};  // 0: hardware concurrency
};

struct SweepCell {
  int N{0};
  double beta{1.0};
  std::optional<ErrorReport> report;
  std::string error;  // set when the cell failed
};

/// Solves and measures every (beta, N) cell; cells run concurrently and
/// come back ordered beta-major, N-minor. A failing cell records its error
/// and the sweep continues.
inline std::vector<SweepCell> beta_sweep(const ModelProblem& problem, const std::vector<int>& N_list,
                                         const std::vector<double>& beta_list, const SweepOptions& opt = {}) {
  validate(problem);
  if (N_list.empty() || beta_list.empty()) throw std::invalid_argument("beta_sweep: empty N or beta list");
  std::vector<SweepCell> cells;
  cells.reserve(N_list.size() * beta_list.size());
  for (double beta : beta_list) {
    for (int N : N_list) cells.push_back({N, beta, std::nullopt, {}});
  }
  const auto m_of = [&](int N) { return opt.m_rule ? opt.m_rule(N) : default_quadrature_order(N); };
  RuleCache cache;
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      auto& c = cells[i];
      try {
        const int M = m_of(c.N);
        detail::check_discretization(c.N, M, c.beta);
        const auto sol = solve(problem, c.N, c.beta, *cache.get(M));
        c.report = error_norms(sol, problem, opt.norms, &cache);
      } catch (const std::exception& e) {
        c.error = e.what();
      }
    }
  };
  unsigned n_threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, cells.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return cells;
}

}  // namespace lagspec
