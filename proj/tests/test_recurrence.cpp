#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "lagspec/oracle.hpp"
#include "lagspec/quadrature.hpp"
#include "lagspec/recurrence.hpp"

using namespace lagspec;

namespace {

double oracle_poly(double alpha, int n, double x) {
  return std::stod(hp_eval_poly(HpContext{}, exact_repr(alpha), n, exact_repr(x)));
}

double oracle_fun(double alpha, int n, double x) {
  return std::stod(hp_eval_fun(HpContext{}, exact_repr(alpha), n, exact_repr(x)));
}

double rel(double v, double ref) { return std::abs(v - ref) / std::abs(ref); }

}  // namespace

TEST(Recurrence, LowDegreeClosedForms) {
  for (double a : {-0.5, 0.0, 1.0, 2.5}) {
    for (double x : {0.0, 0.3, 2.0, 7.5}) {
      const auto s = eval_poly_standard(LagParams<double>{a, 2}, x);
      const auto m = eval_poly_modified(LagParams<double>{a, 2}, x);
      const double l2 = (x * x - 2.0 * (a + 2.0) * x + (a + 1.0) * (a + 2.0)) / 2.0;
      EXPECT_DOUBLE_EQ(s.values[1], a + 1.0 - x);
      EXPECT_NEAR(s.values[2], l2, 1e-13 * (1.0 + std::abs(l2)));
      EXPECT_NEAR(m.values[2], l2, 1e-13 * (1.0 + std::abs(l2)));
      EXPECT_NEAR(m.deltas[1], m.values[2] - m.values[1], 1e-13 * (1.0 + std::abs(l2)));
    }
  }
}

TEST(Recurrence, ValueAtOriginIsBinomial) {
  // L_n^(1)(0) = n + 1, L_3^(1)(0) = 4
  const auto s = eval_poly_modified(LagParams<double>{1.0, 3}, 0.0);
  EXPECT_DOUBLE_EQ(s.values[3], 4.0);
  const auto t = eval_poly_standard(LagParams<double>{0.0, 50}, 0.0);
  for (double v : t.values) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(Recurrence, MatchesOracleInBenignRange) {
  for (double a : {0.0, 0.5, 2.0}) {
    for (double x : {1.0, 2.5, 4.0, 7.0, 10.0}) {
      const auto s = eval_poly_standard(LagParams<double>{a, 20}, x);
      const auto m = eval_poly_modified(LagParams<double>{a, 20}, x);
      const auto ref = hp_eval_poly_series(HpContext{}, exact_repr(a), 20, exact_repr(x));
      for (int n = 0; n <= 20; ++n) {
        const double r = std::stod(ref[n]);
        // absolute below 1: relative error near a zero only measures conditioning
        const double tol = 1e-13 * std::max(1.0, std::abs(r));
        EXPECT_NEAR(s.values[n], r, tol) << "standard a=" << a << " x=" << x << " n=" << n;
        EXPECT_NEAR(m.values[n], r, tol) << "modified a=" << a << " x=" << x << " n=" << n;
      }
    }
  }
}

TEST(Recurrence, ModifiedFormIsMoreAccurateNearOrigin) {
  // L_99 at the smallest nodes of the 100-point rule
  const auto rule = gauss_rule(0.0, 99);
  double log_gain = 0.0;
  for (int j = 0; j < 10; ++j) {
    const double x = rule.nodes[j];
    const double ref = oracle_poly(0.0, 99, x);
    const double es = rel(eval_poly_standard(LagParams<double>{0.0, 99}, x).back(), ref);
    const double em = rel(eval_poly_modified(LagParams<double>{0.0, 99}, x).back(), ref);
    log_gain += std::log10(std::max(es, 1e-17) / std::max(em, 1e-17));
  }
  EXPECT_GT(log_gain / 10.0, 1.0);
}

TEST(Recurrence, PolynomialDerivativeMatchesOracle) {
  const double a = 0.5, x = 3.25;
  const auto s = eval_poly_modified(LagParams<double>{a, 30}, x);
  const auto d = eval_poly_derivative(s);
  const double ref = std::stod(hp_eval_poly_derivative(HpContext{}, exact_repr(a), 30, exact_repr(x)));
  EXPECT_LE(rel(d[30], ref), 1e-12);
  EXPECT_EQ(d[0], 0.0);
  EXPECT_EQ(d[1], -1.0);
  EXPECT_THROW(eval_poly_derivative(eval_fun_modified(LagParams<double>{a, 3}, x)), std::invalid_argument);
}

TEST(Recurrence, StandardFunctionPathUnderflowsWhereStablePathDoesNot) {
  const LagParams<double> p{0.0, 999};
  const double x = 3000.0;
  EXPECT_EQ(eval_fun_standard(p, x).back(), 0.0);
  EXPECT_EQ(eval_fun_modified(p, x).back(), 0.0);
  const double v = eval_fun_stable(p, x);
  ASSERT_TRUE(std::isfinite(v));
  EXPECT_NE(v, 0.0);
  EXPECT_LE(rel(v, oracle_fun(0.0, 999, x)), 1e-12);
}

TEST(Recurrence, StableFunctionMatchesOracleOnLargeRule) {
  const auto rule = gauss_rule(0.0, 999);
  for (std::size_t j = 0; j < rule.size(); j += 37) {
    const double x = rule.nodes[j];
    const double v = eval_fun_stable(LagParams<double>{0.0, 999}, x);
    ASSERT_TRUE(std::isfinite(v)) << x;
    EXPECT_LE(rel(v, oracle_fun(0.0, 999, x)), 1e-11) << "x=" << x;
  }
}

TEST(Recurrence, StableFunctionLowDegrees) {
  for (double x : {0.0, 0.5, 3.0, 40.0}) {
    EXPECT_DOUBLE_EQ(eval_fun_stable(LagParams<double>{0.0, 0}, x), std::exp(-x / 2));
    EXPECT_DOUBLE_EQ(eval_fun_stable(LagParams<double>{1.5, 1}, x), (2.5 - x) * std::exp(-x / 2));
    EXPECT_NEAR(eval_fun_stable(LagParams<double>{0.0, 2}, x),
                (x * x - 4 * x + 2) / 2 * std::exp(-x / 2), 1e-14 * (1 + x * x));
  }
}

TEST(Recurrence, StableSeriesAgreesWithScalarBitForBit) {
  const LagParams<double> p{0.7, 640};
  for (double x : {0.001, 0.9, 55.0, 700.0, 2400.0}) {
    const auto s = eval_fun_stable_series(p, x);
    EXPECT_EQ(s.values.back(), eval_fun_stable(p, x)) << x;
    for (int n : {2, 17, 300}) {
      EXPECT_EQ(s.values[n], eval_fun_stable(LagParams<double>{0.7, n}, x)) << x << " " << n;
    }
  }
}

TEST(Recurrence, StableResultDoesNotDependOnThresholds) {
  const auto rule = gauss_rule(0.0, 499);
  const StableEvalConfig configs[] = {{16, 16, true}, {40, 20, true}, {8, 60, true}, {70, 5, true}};
  for (double x : rule.nodes) {
    const double base = eval_fun_stable(LagParams<double>{0.0, 499}, x);
    for (const auto& c : configs) EXPECT_EQ(eval_fun_stable(LagParams<double>{0.0, 499}, x, c), base) << x;
  }
}

TEST(Recurrence, ContinuousRescalingStaysAccurate) {
  StableEvalConfig lit;
  lit.binary_rescale = false;
  for (double x : {0.05, 12.0, 300.0, 1800.0}) {
    const double ref = oracle_fun(0.0, 900, x);
    EXPECT_LE(rel(eval_fun_stable(LagParams<double>{0.0, 900}, x, lit), ref), 1e-11) << x;
  }
}

TEST(Recurrence, FunctionDerivativeMatchesFiniteDifference) {
  const LagParams<double> p{0.0, 12};
  const double x = 2.7, h = 1e-5;
  const auto d = eval_fun_derivative(p, x);
  for (int n : {0, 1, 5, 12}) {
    const LagParams<double> q{0.0, n};
    const double fd = (eval_fun_stable(q, x + h) - eval_fun_stable(q, x - h)) / (2 * h);
    EXPECT_NEAR(d[n], fd, 1e-8) << n;
  }
}

TEST(Recurrence, RejectsInvalidArguments) {
  EXPECT_THROW(eval_poly_standard(LagParams<double>{-1.0, 3}, 1.0), std::domain_error);
  EXPECT_THROW(eval_poly_modified(LagParams<double>{0.0, -1}, 1.0), std::domain_error);
  EXPECT_THROW(eval_fun_stable(LagParams<double>{0.0, 3}, -0.1), std::domain_error);
  EXPECT_THROW(eval_fun_stable(LagParams<double>{0.0, 3}, std::nan("")), std::domain_error);
  EXPECT_THROW(eval_fun_stable(LagParams<double>{0.0, 3}, 1.0, StableEvalConfig{50, 40, true}), std::domain_error);
  EXPECT_THROW(eval_fun_stable(LagParams<double>{0.0, 3}, 1.0, StableEvalConfig{0, 40, true}), std::domain_error);
}

TEST(Recurrence, NormConstant) {
  EXPECT_DOUBLE_EQ(norm_const(LagParams<double>{0.0, 7}), 1.0);
  EXPECT_NEAR(norm_const(LagParams<double>{1.0, 4}), 5.0, 1e-13);
  EXPECT_NEAR(norm_const(LagParams<double>{2.0, 3}), 20.0, 1e-13);
}
