#pragma once

// Command implementations behind the lagspec executable. Each command writes
// its table to an ostream; run() maps failures onto exit codes
// (0 success, 2 usage, 3 numeric).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lagspec/errmodel.hpp"
#include "lagspec/errors.hpp"
#include "lagspec/oracle.hpp"
#include "lagspec/oracle_cache.hpp"
#include "lagspec/quadrature.hpp"
#include "lagspec/recurrence.hpp"
#include "lagspec/spectral.hpp"
#include "lagspec/spectral_cases.hpp"

namespace lagspec::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;

enum class Command { quad, eval, compare, solve, sweep, errlab };
enum class OutputFormat { csv, json };

struct RunConfig {
  Command command{Command::quad};
  double alpha{0.0};
  std::optional<int> n;
  std::optional<int> m;
  double gamma{2.0};
  double beta{1.0};
  std::vector<double> beta_list;
  std::vector<int> n_list;
  std::string test_case{"u1"};
  double k{2.0};
  std::optional<double> r;
  int digits{24};
  std::uint64_t seed{0};
  RuleKind kind{RuleKind::gauss};
  OutputFormat format{OutputFormat::csv};
  std::string out;
  // eval / errlab
  std::optional<double> x;
  double eta{0.25};
  std::string mode;  // eval: standard|modified|stable, errlab: standard|delta
  bool fun{false};
  // solve / sweep
  double lift_rate{1.0};
  bool diagnostic{false};
  // errlab
  double zeta_scale{1.0};
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline Command parse_command(const std::string& s) {
  if (s == "quad") return Command::quad;
  if (s == "eval") return Command::eval;
  if (s == "compare") return Command::compare;
  if (s == "solve") return Command::solve;
  if (s == "sweep") return Command::sweep;
  if (s == "errlab") return Command::errlab;
  throw UsageError("unknown command '" + s + "'");
}

/// 17 significant digits, enough to round-trip any double.
inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// NaN and infinities become null in JSON output.
inline nlohmann::json jnum(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

inline void validate(const RunConfig& c) {
  const auto need_n = [&](const char* what, int min) {
    if (!c.n) throw UsageError(std::string(what) + " needs --n");
    if (*c.n < min) throw UsageError(std::string(what) + ": --n must be at least " + std::to_string(min));
  };
  if (!(c.alpha > -1.0)) throw UsageError("--alpha must exceed -1");
  if (c.digits < 24 || c.digits > 64) throw UsageError("--digits must lie in [24, 64]");
  switch (c.command) {
    case Command::quad:
      need_n("quad", c.kind == RuleKind::gauss_radau ? 1 : 0);
      break;
    case Command::eval:
      need_n("eval", 0);
      if (!c.x || !(*c.x >= 0.0)) throw UsageError("eval needs --x >= 0");
      if (!c.mode.empty() && c.mode != "standard" && c.mode != "modified" && c.mode != "stable") {
        throw UsageError("eval: --mode must be standard, modified or stable");
      }
      if (c.mode == "stable" && !c.fun) throw UsageError("eval: --mode stable applies to Laguerre functions (--fun)");
      break;
    case Command::compare:
      need_n("compare", 1);
      break;
    case Command::solve:
    case Command::sweep:
      if (!(c.gamma > 0.0)) throw UsageError("--gamma must be positive");
      if (c.test_case != "u1" && c.test_case != "u2" && c.test_case != "u3") {
        throw UsageError("--case must be u1, u2 or u3");
      }
      if (c.command == Command::solve) {
        need_n("solve", 1);
        if (!(c.beta > 0.0)) throw UsageError("--beta must be positive");
        if (c.m && *c.m < *c.n + 1) throw UsageError("--m must be at least --n + 1");
      } else {
        if (c.n_list.empty() && !c.n) throw UsageError("sweep needs --n-list or --n");
        for (int N : c.n_list) {
          if (N < 1) throw UsageError("--n-list entries must be at least 1");
        }
        for (double b : c.beta_list) {
          if (!(b > 0.0)) throw UsageError("--beta-list entries must be positive");
        }
        if (c.m) throw UsageError("sweep sets M per cell; use solve for an explicit --m");
      }
      break;
    case Command::errlab:
      need_n("errlab", 1);
      if (!c.x || !(*c.x > 0.0)) throw UsageError("errlab needs --x > 0");
      if (!(c.eta > 0.0)) throw UsageError("--eta must be positive");
      if (!c.mode.empty() && c.mode != "standard" && c.mode != "delta") {
        throw UsageError("errlab: --mode must be standard or delta");
      }
      if (!(c.zeta_scale >= 0.0)) throw UsageError("--zeta-scale must be nonnegative");
      break;
  }
}

inline ModelProblem make_case(const RunConfig& c) {
  if (c.test_case == "u1") return exp_sine_case(c.k, c.gamma);
  if (c.test_case == "u2") return algebraic_case(c.r.value_or(2.5), c.gamma, c.lift_rate);
  if (c.test_case == "u3") return oscillatory_algebraic_case(c.k, c.r.value_or(3.5), c.gamma);
  throw UsageError("--case must be u1, u2 or u3");
}

inline void cmd_quad(const RunConfig& c, std::ostream& os) {
  const auto rule = c.kind == RuleKind::gauss ? gauss_rule(c.alpha, *c.n) : gauss_radau_rule(c.alpha, *c.n);
  if (c.format == OutputFormat::json) {
    nlohmann::json j{{"alpha", c.alpha}, {"N", *c.n}, {"kind", to_string(c.kind)},
                     {"nodes", rule.nodes}, {"weights", rule.weights}, {"fun_weights", rule.fun_weights}};
    os << j.dump(2) << '\n';
    return;
  }
  os << "index,node,weight,fun_weight\n";
  for (std::size_t j = 0; j < rule.size(); ++j) {
    os << j << ',' << fmt(rule.nodes[j]) << ',' << fmt(rule.weights[j]) << ',' << fmt(rule.fun_weights[j]) << '\n';
  }
}

inline void cmd_eval(const RunConfig& c, std::ostream& os) {
  const LagParams<double> p{c.alpha, *c.n};
  const double x = *c.x;
  const std::string mode = c.mode.empty() ? (c.fun ? "stable" : "modified") : c.mode;
  std::vector<double> values, derivs;
  if (c.fun) {
    const auto s = mode == "stable"     ? eval_fun_stable_series(p, x)
                   : mode == "standard" ? eval_fun_standard(p, x)
                                        : eval_fun_modified(p, x);
    values = s.values;
    derivs = fun_derivative_from_values(s);
  } else {
    const auto s = mode == "standard" ? eval_poly_standard(p, x) : eval_poly_modified(p, x);
    values = s.values;
    derivs = eval_poly_derivative(s);
  }
  if (c.format == OutputFormat::json) {
    nlohmann::json j{{"alpha", c.alpha}, {"n", *c.n}, {"x", x}, {"mode", mode},
                     {"kind", c.fun ? "function" : "polynomial"}};
    auto& jv = j["values"] = nlohmann::json::array();
    auto& jd = j["derivatives"] = nlohmann::json::array();
    for (std::size_t k = 0; k < values.size(); ++k) {
      jv.push_back(jnum(values[k]));
      jd.push_back(jnum(derivs[k]));
    }
    os << j.dump(2) << '\n';
    return;
  }
  os << "k,value,derivative\n";
  for (std::size_t k = 0; k < values.size(); ++k) os << k << ',' << fmt(values[k]) << ',' << fmt(derivs[k]) << '\n';
}

/// Relative errors of the degree N-1 polynomial (or function, with --fun)
/// at the nodes of the N-point Gauss rule, against the oracle.
inline void cmd_compare(const RunConfig& c, std::ostream& os) {
  const int points = *c.n;
  const int deg = points - 1;
  const auto rule = gauss_rule(c.alpha, deg);
  const HpContext ctx{c.digits};
  const std::string alpha = exact_repr(c.alpha);
  const OracleKey key{c.fun ? "fun_at_gauss_nodes" : "poly_at_gauss_nodes", c.alpha, points, c.digits};
  const auto ref = cached_oracle(OracleCache::from_env(), key, [&] {
    std::vector<std::string> v;
    v.reserve(rule.size());
    for (double x : rule.nodes) {
      v.push_back(c.fun ? hp_eval_fun(ctx, alpha, deg, exact_repr(x)) : hp_eval_poly(ctx, alpha, deg, exact_repr(x)));
    }
    return v;
  });
  if (ref.size() != rule.size()) throw numeric_error("compare: oracle returned the wrong number of values");

  const auto rel = [&](double v, const std::string& exact) {
    if (!std::isfinite(v)) return std::numeric_limits<double>::quiet_NaN();
    const HpScalar e(ctx, exact);
    if (e.is_zero()) return v == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return (abs(HpScalar(ctx, v) - e) / abs(e)).to_double();
  };
  const LagParams<double> p{c.alpha, deg};
  std::vector<std::array<double, 3>> rows;
  rows.reserve(rule.size());
  for (std::size_t j = 0; j < rule.size(); ++j) {
    const double x = rule.nodes[j];
    double s, m, st;
    if (c.fun) {
      s = eval_fun_standard(p, x).back();
      m = eval_fun_modified(p, x).back();
      st = eval_fun_stable(p, x);
    } else {
      s = eval_poly_standard(p, x).back();
      m = eval_poly_modified(p, x).back();
      st = eval_fun_stable(p, x) * std::exp(x / 2.0);
    }
    rows.push_back({rel(s, ref[j]), rel(m, ref[j]), rel(st, ref[j])});
  }
  if (c.format == OutputFormat::json) {
    nlohmann::json j{{"alpha", c.alpha}, {"N", points}, {"degree", deg}, {"digits", c.digits},
                     {"kind", c.fun ? "function" : "polynomial"}, {"rows", nlohmann::json::array()}};
    for (std::size_t i = 0; i < rows.size(); ++i) {
      j["rows"].push_back({{"index", i}, {"node", rule.nodes[i]}, {"rel_err_standard", jnum(rows[i][0])},
                           {"rel_err_modified", jnum(rows[i][1])}, {"rel_err_stable", jnum(rows[i][2])}});
    }
    os << j.dump(2) << '\n';
    return;
  }
  os << "index,node,rel_err_standard,rel_err_modified,rel_err_stable\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    os << i << ',' << fmt(rule.nodes[i]) << ',' << fmt(rows[i][0]) << ',' << fmt(rows[i][1]) << ','
       << fmt(rows[i][2]) << '\n';
  }
}

namespace detail {

inline nlohmann::json cell_json(const SweepCell& cell) {
  nlohmann::json j{{"N", cell.N}, {"beta", cell.beta}};
  if (cell.report) {
    j["M"] = cell.report->M;
    j["l2_error"] = jnum(cell.report->l2_error);
    j["h1_error"] = jnum(cell.report->h1_semi_error);
    if (cell.report->l2_quadrature_spread) j["l2_quadrature_spread"] = jnum(*cell.report->l2_quadrature_spread);
  } else {
    j["error"] = cell.error;
  }
  return j;
}

inline void write_cells_csv(const std::vector<SweepCell>& cells, std::ostream& os) {
  os << "N,beta,l2_error,h1_error,error\n";
  for (const auto& cell : cells) {
    os << cell.N << ',' << fmt(cell.beta) << ',';
    if (cell.report) {
      os << fmt(cell.report->l2_error) << ',' << fmt(cell.report->h1_semi_error) << ",\n";
    } else {
      std::string msg = cell.error;
      for (auto& ch : msg) {
        if (ch == ',' || ch == '\n') ch = ';';
      }
      os << ",," << msg << '\n';
    }
  }
}

inline void note_quadrature_limited(const std::vector<SweepCell>& cells, std::ostream& err) {
  for (const auto& cell : cells) {
    if (cell.report && cell.report->quadrature_limited()) {
      err << "note: N=" << cell.N << " beta=" << fmt(cell.beta)
          << ": error-norm quadrature spread " << fmt(*cell.report->l2_quadrature_spread)
          << " exceeds 1% of the L2 error\n";
    }
  }
}

}  // namespace detail

inline void cmd_solve(const RunConfig& c, std::ostream& os, std::ostream& err) {
  const auto problem = make_case(c);
  const int N = *c.n;
  const int M = c.m.value_or(default_quadrature_order(N));
  SweepCell cell{N, c.beta, std::nullopt, {}};
  RuleCache cache;
  try {
    const auto sol = solve(problem, N, c.beta, *cache.get(M));
    cell.report = error_norms(sol, problem, {c.diagnostic}, &cache);
  } catch (const numeric_error& e) {
    cell.error = e.what();
  }
  detail::note_quadrature_limited({cell}, err);
  if (c.format == OutputFormat::json) {
    auto j = detail::cell_json(cell);
    j["case"] = c.test_case;
    j["gamma"] = c.gamma;
    os << j.dump(2) << '\n';
  } else {
    detail::write_cells_csv({cell}, os);
  }
  if (!cell.error.empty()) throw numeric_error(cell.error);
}

inline void cmd_sweep(const RunConfig& c, std::ostream& os, std::ostream& err) {
  const auto problem = make_case(c);
  const auto n_list = c.n_list.empty() ? std::vector<int>{*c.n} : c.n_list;
  const auto beta_list = c.beta_list.empty() ? std::vector<double>{c.beta} : c.beta_list;
  SweepOptions opt;
  opt.norms.diagnostic = c.diagnostic;
  const auto cells = beta_sweep(problem, n_list, beta_list, opt);
  detail::note_quadrature_limited(cells, err);
  if (c.format == OutputFormat::csv) {
    detail::write_cells_csv(cells, os);
    return;
  }
  nlohmann::json j{{"case", c.test_case}, {"gamma", c.gamma}, {"cells", nlohmann::json::array()},
                   {"argmin_beta", nlohmann::json::array()}};
  if (c.test_case == "u1") j["beta_star"] = optimal_beta_exponential(-1.0, c.k);
  for (const auto& cell : cells) j["cells"].push_back(detail::cell_json(cell));
  for (int N : n_list) {
    const SweepCell* best = nullptr;
    for (const auto& cell : cells) {
      if (cell.N != N || !cell.report) continue;
      if (!best || cell.report->l2_error < best->report->l2_error) best = &cell;
    }
    if (best) j["argmin_beta"].push_back({{"N", N}, {"beta", best->beta}, {"l2_error", best->report->l2_error}});
  }
  os << j.dump(2) << '\n';
}

/// Per degree n: measured and simulated |e_n| and the bound on |e_n|, all
/// relative to |L_n(x)|, plus the growth factor beta_{n-1}.
inline void cmd_errlab(const RunConfig& c, std::ostream& os) {
  const int n_max = *c.n;
  const double x = *c.x;
  const ErrorMode mode = c.mode == "delta" ? ErrorMode::delta : ErrorMode::standard;
  const auto bound_at = [&](const ErrorBoundInput& in) {
    try {
      return abs_error_bound(in);
    } catch (const std::domain_error&) {
      return energy_bound(in).abs_bound;
    }
  };
  try {
    bound_at({0, c.alpha, x, c.eta, 0.0, 0.0});
  } catch (const std::domain_error& e) {
    throw UsageError(std::string("errlab: ") + e.what());
  }
  SimulationOptions sim;
  sim.zeta_scale = c.zeta_scale;
  const auto t = simulate_error_propagation(c.alpha, n_max, x, mode, c.seed, sim);
  const auto measured = measure_error_trajectory(c.alpha, n_max, x, mode, HpContext{c.digits});
  const bool expansive = 1.0 - 2.0 * c.alpha - x - c.eta < 0.0;
  const double e1 = std::max(std::abs(t.e1), std::abs(measured.error[1]));

  struct Row {
    int n;
    double measured, simulated, bound, beta_n;
  };
  std::vector<Row> rows;
  for (int n = 1; n <= n_max; ++n) {
    const auto i = static_cast<std::size_t>(n);
    const double scale = std::abs(measured.exact[i]);
    const double inv = scale > 0.0 ? 1.0 / scale : std::numeric_limits<double>::quiet_NaN();
    const ErrorBoundInput in{n - 1, c.alpha, x, c.eta, e1, t.zeta_max(n - 1)};
    rows.push_back({n, std::abs(measured.error[i]) * inv, std::abs(t.e[i]) * inv, bound_at(in) * inv,
                    expansive ? growth_factor(n - 1, c.alpha, x, c.eta) : 1.0});
  }
  if (c.format == OutputFormat::json) {
    nlohmann::json j{{"alpha", c.alpha}, {"x", x}, {"eta", c.eta}, {"mode", to_string(mode)},
                     {"seed", c.seed}, {"rows", nlohmann::json::array()}};
    for (const auto& r : rows) {
      j["rows"].push_back({{"n", r.n}, {"measured_err", jnum(r.measured)}, {"simulated_err", jnum(r.simulated)},
                           {"theory_bound", jnum(r.bound)}, {"beta_n", jnum(r.beta_n)}});
    }
    os << j.dump(2) << '\n';
    return;
  }
  os << "n,measured_err,simulated_err,theory_bound,beta_n\n";
  for (const auto& r : rows) {
    os << r.n << ',' << fmt(r.measured) << ',' << fmt(r.simulated) << ',' << fmt(r.bound) << ',' << fmt(r.beta_n)
       << '\n';
  }
}

/// Validates and runs one command, writing its table to `os`.
inline void execute(const RunConfig& c, std::ostream& os, std::ostream& err) {
  validate(c);
  switch (c.command) {
    case Command::quad: return cmd_quad(c, os);
    case Command::eval: return cmd_eval(c, os);
    case Command::compare: return cmd_compare(c, os);
    case Command::solve: return cmd_solve(c, os, err);
    case Command::sweep: return cmd_sweep(c, os, err);
    case Command::errlab: return cmd_errlab(c, os);
  }
}

/// execute() with failures reported on `err` and mapped to exit codes.
inline int run(const RunConfig& c, std::ostream& os, std::ostream& err) {
  try {
    execute(c, os, err);
    return kExitOk;
  } catch (const numeric_error& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::logic_error& e) {
    // invalid_argument, domain_error, out_of_range: bad parameters
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  }
}

}  // namespace lagspec::cli
