#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "lagspec_cli.hpp"

using namespace lagspec;
using namespace lagspec::cli;

namespace {

struct Output {
  int code;
  std::string out, err;
};

Output run_cfg(const RunConfig& c) {
  std::ostringstream os, es;
  const int code = run(c, os, es);
  return {code, os.str(), es.str()};
}

using Table = std::vector<std::vector<std::string>>;

// rows after the header, split on commas
Table parse_csv(const std::string& text, std::string* header = nullptr) {
  std::istringstream in(text);
  std::string line;
  Table rows;
  std::getline(in, line);
  if (header) *header = line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

// strtod, unlike stod, accepts subnormal values
double num(const std::string& s) { return std::strtod(s.c_str(), nullptr); }

RunConfig cfg(Command cmd) {
  RunConfig c;
  c.command = cmd;
  return c;
}

}  // namespace

TEST(Cli, QuadFivePointTable) {
  auto c = cfg(Command::quad);
  c.n = 4;
  const auto o = run_cfg(c);
  ASSERT_EQ(o.code, kExitOk) << o.err;
  std::string header;
  const auto rows = parse_csv(o.out, &header);
  EXPECT_EQ(header, "index,node,weight,fun_weight");
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_NEAR(num(rows[4][2]), 2.337e-5, 0.001e-5);
}

TEST(Cli, QuadSinglePoint) {
  auto c = cfg(Command::quad);
  c.n = 0;
  const auto rows = parse_csv(run_cfg(c).out);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_DOUBLE_EQ(num(rows[0][1]), 1.0);
  EXPECT_DOUBLE_EQ(num(rows[0][2]), 1.0);
}

TEST(Cli, QuadLargeRuleIsFinite) {
  auto c = cfg(Command::quad);
  c.n = 999;
  const auto rows = parse_csv(run_cfg(c).out);
  ASSERT_EQ(rows.size(), 1000u);
  for (const auto& r : rows) {
    EXPECT_TRUE(std::isfinite(num(r[2])));
    EXPECT_TRUE(std::isfinite(num(r[3])));
    EXPECT_GT(num(r[3]), 0.0);
  }
}

TEST(Cli, QuadSeventeenDigitsRoundTrip) {
  auto c = cfg(Command::quad);
  c.n = 9;
  const auto rows = parse_csv(run_cfg(c).out);
  const auto rule = gauss_rule(0.0, 9);
  for (std::size_t j = 0; j < rows.size(); ++j) {
    EXPECT_EQ(num(rows[j][1]), rule.nodes[j]);
    EXPECT_EQ(num(rows[j][2]), rule.weights[j]);
  }
}

TEST(Cli, QuadJsonAndRadau) {
  auto c = cfg(Command::quad);
  c.n = 3;
  c.kind = RuleKind::gauss_radau;
  c.format = OutputFormat::json;
  const auto j = nlohmann::json::parse(run_cfg(c).out);
  EXPECT_EQ(j["kind"], "radau");
  EXPECT_EQ(j["nodes"].size(), 4u);
  EXPECT_EQ(j["nodes"][0].get<double>(), 0.0);
}

TEST(Cli, EvalPolynomialAndFunction) {
  auto c = cfg(Command::eval);
  c.n = 2;
  c.x = 1.0;
  auto rows = parse_csv(run_cfg(c).out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_DOUBLE_EQ(num(rows[2][1]), -0.5);
  EXPECT_DOUBLE_EQ(num(rows[2][2]), -1.0);  // L_2' = x - 2
  c.fun = true;
  c.n = 0;
  rows = parse_csv(run_cfg(c).out);
  EXPECT_DOUBLE_EQ(num(rows[0][1]), std::exp(-0.5));
  EXPECT_DOUBLE_EQ(num(rows[0][2]), -0.5 * std::exp(-0.5));
}

TEST(Cli, CompareTinyCaseIsExact) {
  auto c = cfg(Command::compare);
  c.n = 2;
  std::string header;
  const auto rows = parse_csv(run_cfg(c).out, &header);
  EXPECT_EQ(header, "index,node,rel_err_standard,rel_err_modified,rel_err_stable");
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) {
    for (int k = 2; k < 5; ++k) EXPECT_LE(num(r[k]), 1e-14);
  }
}

TEST(Cli, CompareModifiedGainsTwoDigitsOnSmallestDecile) {
  auto c = cfg(Command::compare);
  c.n = 100;
  const auto rows = parse_csv(run_cfg(c).out);
  ASSERT_EQ(rows.size(), 100u);
  double gain = 0.0;
  for (int j = 0; j < 10; ++j) gain += std::log10(num(rows[j][2]) / std::max(num(rows[j][3]), 1e-17));
  EXPECT_GE(gain / 10.0, 2.0);
}

TEST(Cli, CompareFunctionsStableColumnFinite) {
  auto c = cfg(Command::compare);
  c.n = 1000;
  c.fun = true;
  const auto o = run_cfg(c);
  ASSERT_EQ(o.code, kExitOk) << o.err;
  const auto rows = parse_csv(o.out);
  ASSERT_EQ(rows.size(), 1000u);
  for (const auto& r : rows) {
    const double st = num(r[4]);
    EXPECT_TRUE(std::isfinite(st));
    EXPECT_LE(st, 1e-10) << r[0];
  }
  // no correct digit left in the upper tail of the unscaled recurrence
  const double tail = num(rows.back()[2]);
  EXPECT_TRUE(std::isnan(tail) || tail >= 1.0);
}

TEST(Cli, ComparePolynomialTailBreaksDown) {
  auto c = cfg(Command::compare);
  c.n = 500;
  const auto rows = parse_csv(run_cfg(c).out);
  int nan = 0;
  for (const auto& r : rows) nan += std::isnan(num(r[2])) ? 1 : 0;
  EXPECT_GT(nan, 0);
  // the stable path holds wherever L_n itself is representable
  for (const auto& r : rows) {
    if (num(r[1]) < 1400.0) {
      EXPECT_LE(num(r[4]), 1e-11) << r[0];
    }
  }
}

TEST(Cli, SolveReportsErrors) {
  auto c = cfg(Command::solve);
  c.n = 64;
  c.beta = optimal_beta_exponential(-1.0, 2.0);
  std::string header;
  const auto rows = parse_csv(run_cfg(c).out, &header);
  EXPECT_EQ(header, "N,beta,l2_error,h1_error,error");
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_LT(num(rows[0][2]), 1e-10);
  EXPECT_EQ(rows[0][4], "");
}

TEST(Cli, SweepJsonSummary) {
  auto c = cfg(Command::sweep);
  c.n_list = {16, 32};
  c.beta_list = {1.0, 4.47};
  c.format = OutputFormat::json;
  const auto o = run_cfg(c);
  ASSERT_EQ(o.code, kExitOk) << o.err;
  const auto j = nlohmann::json::parse(o.out);
  EXPECT_EQ(j["cells"].size(), 4u);
  EXPECT_EQ(j["argmin_beta"].size(), 2u);
  EXPECT_NEAR(j["beta_star"].get<double>(), 2.0 * std::sqrt(5.0), 1e-15);
  EXPECT_EQ(j["cells"][0]["beta"].get<double>(), 1.0);
  EXPECT_EQ(j["cells"][0]["N"].get<int>(), 16);
}

TEST(Cli, SweepOscillatoryCaseArgminStable) {
  auto c = cfg(Command::sweep);
  c.test_case = "u3";
  c.n_list = {64, 128, 256};
  c.beta_list = {0.25, 0.5, 1.0, 2.0, 4.0};
  c.format = OutputFormat::json;
  const auto j = nlohmann::json::parse(run_cfg(c).out);
  std::vector<std::size_t> idx;
  for (const auto& a : j["argmin_beta"]) {
    idx.push_back(std::find(c.beta_list.begin(), c.beta_list.end(), a["beta"].get<double>()) - c.beta_list.begin());
  }
  ASSERT_EQ(idx.size(), 3u);
  for (std::size_t i = 1; i < idx.size(); ++i) {
    EXPECT_LE(std::abs(static_cast<long>(idx[i]) - static_cast<long>(idx[0])), 1);
  }
}

TEST(Cli, ErrlabBoundDominates) {
  auto c = cfg(Command::errlab);
  c.n = 500;
  c.x = 0.05;
  std::string header;
  const auto o = run_cfg(c);
  ASSERT_EQ(o.code, kExitOk) << o.err;
  const auto rows = parse_csv(o.out, &header);
  EXPECT_EQ(header, "n,measured_err,simulated_err,theory_bound,beta_n");
  ASSERT_EQ(rows.size(), 500u);
  for (const auto& r : rows) {
    EXPECT_GE(num(r[3]), num(r[1])) << r[0];
    EXPECT_GE(num(r[3]), num(r[2])) << r[0];
  }
}

TEST(Cli, ErrlabWithoutPerturbations) {
  auto c = cfg(Command::errlab);
  c.n = 50;
  c.x = 0.3;
  c.zeta_scale = 0.0;
  const auto rows = parse_csv(run_cfg(c).out);
  for (const auto& r : rows) EXPECT_EQ(num(r[2]), 0.0);
}

TEST(Cli, ErrlabGrowthFactorSlope) {
  auto c = cfg(Command::errlab);
  c.alpha = 1.0;
  c.x = 0.1;
  c.n = 400;
  const auto rows = parse_csv(run_cfg(c).out);
  // least squares of log beta_n on log n over the upper half
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int k = 0;
  for (const auto& r : rows) {
    const double n = num(r[0]) - 1.0;
    if (n < 200) continue;
    const double lx = std::log(n), ly = std::log(num(r[4]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++k;
  }
  const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  const double expected = 2.0 * 1.0 + 0.1 + 0.25 - 1.0;
  EXPECT_NEAR(slope, expected, 0.1 * expected);
}

TEST(Cli, OutputIsDeterministic) {
  auto c = cfg(Command::errlab);
  c.n = 100;
  c.x = 0.2;
  c.seed = 17;
  EXPECT_EQ(run_cfg(c).out, run_cfg(c).out);
  auto s = cfg(Command::sweep);
  s.n_list = {8, 16, 32};
  s.beta_list = {0.5, 1.0, 2.0};
  EXPECT_EQ(run_cfg(s).out, run_cfg(s).out);
}

TEST(Cli, ExitCodes) {
  auto c = cfg(Command::quad);
  EXPECT_EQ(run_cfg(c).code, kExitUsage);  // missing --n
  c.n = 3;
  c.alpha = -2.0;
  EXPECT_EQ(run_cfg(c).code, kExitUsage);
  auto e = cfg(Command::errlab);
  e.alpha = 3.0;
  e.x = 0.1;
  e.n = 10;
  const auto o = run_cfg(e);
  EXPECT_EQ(o.code, kExitUsage);
  EXPECT_NE(o.err.find("3 - alpha - x - eta"), std::string::npos);
  auto s = cfg(Command::solve);
  s.n = 8;
  s.k = std::nan("");
  EXPECT_EQ(run_cfg(s).code, kExitNumeric);
  auto bad_case = cfg(Command::solve);
  bad_case.n = 8;
  bad_case.test_case = "u9";
  EXPECT_EQ(run_cfg(bad_case).code, kExitUsage);
  EXPECT_THROW(parse_command("plot"), UsageError);
}

TEST(Cli, CompareUsesOracleCache) {
  const auto dir = std::filesystem::temp_directory_path() / "lagspec_cli_cache";
  std::filesystem::remove_all(dir);
  ::setenv("LAGSPEC_ORACLE_CACHE", dir.c_str(), 1);
  auto c = cfg(Command::compare);
  c.n = 20;
  const auto first = run_cfg(c).out;
  const auto second = run_cfg(c).out;
  ::unsetenv("LAGSPEC_ORACLE_CACHE");
  EXPECT_EQ(first, second);
  EXPECT_TRUE(std::filesystem::exists(OracleCache(dir).data_path({"poly_at_gauss_nodes", 0.0, 20, 24})));
}
