// lagspec: quadrature tables, recurrence accuracy comparisons, the half-line
// spectral solver and the round-off error lab from the command line.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "lagspec_cli.hpp"

int main(int argc, char** argv) {
  using namespace lagspec;
  cli::RunConfig cfg;
  std::string command, kind = "gauss", format = "csv";

  CLI::App app{"Laguerre polynomials, Gauss rules and spectral solves"};
  app.add_option("command", command, "quad | eval | compare | solve | sweep | errlab")->required();
  app.add_option("--alpha", cfg.alpha, "Laguerre parameter (> -1)");
  app.add_option("--n", cfg.n, "degree / rule order / basis size / points, per command");
  app.add_option("--m", cfg.m, "quadrature order for the right-hand side (solve)");
  app.add_option("--gamma", cfg.gamma, "reaction coefficient");
  app.add_option("--beta", cfg.beta, "scaling factor");
  app.add_option("--beta-list", cfg.beta_list, "comma-separated scaling factors (sweep)")->delimiter(',');
  app.add_option("--n-list", cfg.n_list, "comma-separated basis sizes (sweep)")->delimiter(',');
  app.add_option("--case", cfg.test_case, "u1 | u2 | u3");
  app.add_option("--k", cfg.k, "oscillation frequency of u1 / u3");
  app.add_option("--r", cfg.r, "algebraic decay rate of u2 / u3");
  app.add_option("--lift-rate", cfg.lift_rate, "rate of the e^{-rate x} lifting used for u2");
  app.add_option("--digits", cfg.digits, "oracle precision in decimal digits");
  app.add_option("--seed", cfg.seed, "random seed (errlab)");
  app.add_option("--kind", kind, "gauss | radau");
  app.add_option("--format", format, "csv | json");
  app.add_option("--out", cfg.out, "output file (default stdout)");
  app.add_option("--x", cfg.x, "abscissa (eval, errlab)");
  app.add_option("--eta", cfg.eta, "Cauchy splitting parameter of the error bound (errlab)");
  app.add_option("--mode", cfg.mode, "eval: standard|modified|stable, errlab: standard|delta");
  app.add_option("--zeta-scale", cfg.zeta_scale, "scale of simulated perturbations (errlab)");
  app.add_flag("--fun", cfg.fun, "Laguerre functions e^{-x/2} L_n instead of polynomials");
  app.add_flag("--diagnostic", cfg.diagnostic, "re-check error norms with a 4M-point rule");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitUsage;
  }

  try {
    cfg.command = cli::parse_command(command);
    if (kind == "gauss") cfg.kind = RuleKind::gauss;
    else if (kind == "radau") cfg.kind = RuleKind::gauss_radau;
    else throw cli::UsageError("--kind must be gauss or radau");
    if (format == "csv") cfg.format = cli::OutputFormat::csv;
    else if (format == "json") cfg.format = cli::OutputFormat::json;
    else throw cli::UsageError("--format must be csv or json");
  } catch (const cli::UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitUsage;
  }

  // Buffer the table so a failed run leaves no partial output file.
  std::ostringstream buf;
  const int code = cli::run(cfg, buf, std::cerr);
  if (code != cli::kExitOk) return code;
  if (cfg.out.empty()) {
    std::cout << buf.str();
    return code;
  }
  std::ofstream file(cfg.out, std::ios::binary);
  if (!(file << buf.str())) {
    std::cerr << "error: cannot write " << cfg.out << '\n';
    return cli::kExitUsage;
  }
  return code;
}
