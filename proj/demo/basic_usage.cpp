// Builds a 1000-point Laguerre-Gauss rule, checks it on a moment, and solves
// -u'' + 2u = f on the half line with the scaled Laguerre method.

#include <cmath>
#include <cstdio>

#include "lagspec/lagspec.hpp"

int main() {
  using namespace lagspec;

  const auto rule = gauss_rule(0.0, 999);
  // int_0^inf x^5 e^{-x} dx = 120
  const double m5 = integrate(rule, [](double x) { return std::pow(x, 5); });
  std::printf("nodes %zu, largest %.6f, moment x^5 = %.15f\n", rule.size(), rule.nodes.back(), m5);

  // Laguerre function of degree 999 deep in the tail, where e^{-x/2} alone
  // would underflow.
  std::printf("e^{-x/2} L_999(3000) = %.6e\n", eval_fun_stable(LagParams<double>{0.0, 999}, 3000.0));

  const auto problem = exp_sine_case(2.0, 2.0);
  const double beta = optimal_beta_exponential(-1.0, 2.0);
  for (int N : {16, 32, 64}) {
    const auto sol = solve(problem, N, default_quadrature_order(N), beta);
    const auto err = error_norms(sol, problem);
    std::printf("N=%3d beta=%.4f  L2 error %.3e  H1 error %.3e\n", N, beta, err.l2_error, err.h1_semi_error);
  }
}
