#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "lagspec/oracle.hpp"
#include "lagspec/oracle_cache.hpp"

using namespace lagspec;

namespace {

HpScalar hp(const HpContext& ctx, const std::string& s) { return HpScalar(ctx, s); }

// |a - b| / |b| in extended precision, as a double
double hp_rel(const HpContext& ctx, const std::string& a, const std::string& b) {
  return ((hp(ctx, a) - hp(ctx, b)) / hp(ctx, b)).to_double();
}

std::filesystem::path fresh_dir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / ("lagspec_test_" + name);
  std::filesystem::remove_all(d);
  return d;
}

}  // namespace

TEST(Oracle, SmallClosedForms) {
  const HpContext ctx;
  EXPECT_DOUBLE_EQ(std::stod(hp_eval_poly(ctx, "0", 2, "3")), -0.5);
  EXPECT_DOUBLE_EQ(std::stod(hp_eval_poly(ctx, "1", 3, "0")), 4.0);
  EXPECT_DOUBLE_EQ(std::stod(hp_eval_poly(ctx, "0", 0, "123.5")), 1.0);
  EXPECT_DOUBLE_EQ(std::stod(hp_eval_poly_derivative(ctx, "0", 1, "7")), -1.0);
  EXPECT_NEAR(std::stod(hp_eval_fun(ctx, "0", 0, "2")), std::exp(-1.0), 1e-16);
  EXPECT_EQ(std::stod(hp_eval_fun(ctx, "0", 1, "1")), 0.0);
  const auto s = hp_eval_poly_series(ctx, "0", 2, "3");
  ASSERT_EQ(s.size(), 3u);
  EXPECT_DOUBLE_EQ(std::stod(s[1]), -2.0);
}

TEST(Oracle, PrecisionsAgree) {
  const auto lo = hp_eval_poly(HpContext{24}, "0.5", 300, "17.25");
  const auto hi = hp_eval_poly(HpContext{40}, "0.5", 300, "17.25");
  EXPECT_LT(std::abs(hp_rel(HpContext{40}, lo, hi)), 1e-18);
}

TEST(Oracle, ExactReprRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.678, 0.0}) {
    EXPECT_EQ(HpScalar(HpContext{}, exact_repr(v)).to_double(), v);
  }
}

TEST(Oracle, SinglePointNode) {
  const auto n = hp_gauss_nodes(HpContext{}, 2.0, 0);
  ASSERT_EQ(n.size(), 1u);
  EXPECT_DOUBLE_EQ(std::stod(n[0]), 3.0);
}

TEST(Oracle, NodesIntegrateMomentExactly) {
  // 17 points integrate x^20 against e^{-x} exactly; the weights follow from
  // w_j = x_j / ((N+1)^2 L_N(x_j)^2) in extended precision
  const HpContext ctx{40};
  const int N = 16;
  const auto nodes = hp::gauss_nodes(ctx, 0.0, N);
  const HpScalar a(ctx, 0L);
  HpScalar sum(ctx, 0L);
  const HpScalar np1(ctx, static_cast<long>(N + 1));
  for (const auto& x : nodes) {
    const auto L = hp::poly(ctx, a, N, x).value;
    HpScalar xp(ctx, 1L);
    for (int k = 0; k < 20; ++k) xp = xp * x;
    sum += x / (np1 * np1 * L * L) * xp;
  }
  const HpScalar fact20(ctx, "2432902008176640000");
  EXPECT_LT(std::abs(((sum - fact20) / fact20).to_double()), 1e-30);
}

TEST(Oracle, RejectsOutOfRangePrecision) {
  EXPECT_THROW(hp_eval_poly(HpContext{10}, "0", 2, "1"), std::domain_error);
  EXPECT_THROW(hp_eval_poly(HpContext{}, "0", -1, "1"), std::domain_error);
}

TEST(OracleCache, RoundTrip) {
  const OracleCache cache(fresh_dir("roundtrip"));
  const OracleKey key{"gauss_nodes", 0.5, 3, 24};
  int calls = 0;
  auto compute = [&] {
    ++calls;
    return std::vector<std::string>{"1.5", "2.25", "3", "4.125"};
  };
  const auto first = cache.fetch(key, compute);
  const auto second = cache.fetch(key, compute);
  EXPECT_EQ(calls, 1);
  EXPECT_EQ(first, second);
  EXPECT_TRUE(std::filesystem::exists(cache.data_path(key)));
  EXPECT_TRUE(std::filesystem::exists(cache.meta_path(key)));
  std::ifstream in(cache.data_path(key));
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "alpha,N,kind,index,value_decimal");
}

TEST(OracleCache, DifferentPrecisionIsAMiss) {
  const OracleCache cache(fresh_dir("digits"));
  cache.store({"gauss_nodes", 0.0, 1, 24}, {"a", "b"});
  EXPECT_TRUE(cache.load({"gauss_nodes", 0.0, 1, 24}).has_value());
  EXPECT_FALSE(cache.load({"gauss_nodes", 0.0, 1, 30}).has_value());
  EXPECT_FALSE(cache.load({"gauss_nodes", 0.0, 2, 24}).has_value());
}

TEST(OracleCache, CorruptMetadataIsAMiss) {
  const OracleCache cache(fresh_dir("corrupt"));
  const OracleKey key{"poly", 1.0, 2, 24};
  cache.store(key, {"1", "2", "3"});
  std::ofstream(cache.meta_path(key)) << "{ not json";
  EXPECT_FALSE(cache.load(key).has_value());
  int calls = 0;
  cache.fetch(key, [&] {
    ++calls;
    return std::vector<std::string>{"1", "2", "3"};
  });
  EXPECT_EQ(calls, 1);
  EXPECT_TRUE(cache.load(key).has_value());
}

TEST(OracleCache, TruncatedDataIsAMiss) {
  const OracleCache cache(fresh_dir("truncated"));
  const OracleKey key{"poly", 1.0, 2, 24};
  cache.store(key, {"1", "2", "3"});
  std::ofstream(cache.data_path(key)) << "alpha,N,kind,index,value_decimal\n1,2,poly,0,1\n";
  EXPECT_FALSE(cache.load(key).has_value());
}

TEST(OracleCache, WithoutCacheComputesDirectly) {
  int calls = 0;
  auto compute = [&] {
    ++calls;
    return std::vector<std::string>{"x"};
  };
  cached_oracle(std::nullopt, {"k", 0.0, 0, 24}, compute);
  cached_oracle(std::nullopt, {"k", 0.0, 0, 24}, compute);
  EXPECT_EQ(calls, 2);
}
