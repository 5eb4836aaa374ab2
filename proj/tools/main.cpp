#include "indep/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

void dataset_flags(CLI::App& app, indep::cli::Config& cfg) {
  app.add_option("--input", cfg.input, "CSV file with a header row")->required();
  app.add_option("--group-col", cfg.group_col, "column holding the group label")->capture_default_str();
  app.add_option("--value-cols", cfg.value_cols, "value columns in coordinate order (default: x1, x2, ...)")
      ->delimiter(',');
  app.add_option("--weight-col", cfg.weight_col, "optional row weight column");
}

void method_flags(CLI::App& app, indep::cli::Config& cfg) {
  app.add_option("--method", cfg.method, "auto | exact | entropic | free | quantile1d")
      ->check(CLI::IsMember({"auto", "exact", "entropic", "free", "quantile1d"}))
      ->capture_default_str();
  app.add_option("--epsilon", cfg.epsilon, "entropic regularization")->capture_default_str();
  app.add_option("--max-iter", cfg.max_iter, "iteration cap (0: solver default)")->capture_default_str();
  app.add_option("--tol", cfg.tol, "convergence tolerance (0: solver default)")->capture_default_str();
  app.add_option("--seed", cfg.seed, "64-bit seed for generated u values and free-support starts");
}

void report_flag(CLI::App& app, indep::cli::Config& cfg) {
  app.add_option("--report", cfg.report, "JSON report path (default: stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  using indep::cli::Config;
  Config cfg;
  CLI::App app{"Optimal L2 approximation of X by a variable independent of a grouping."};
  app.footer(indep::cli::exit_code_help());
  app.require_subcommand(1);

  auto* approx = app.add_subcommand("approx", "build the independent approximation and its report");
  dataset_flags(*approx, cfg);
  approx->add_option("--u-col", cfg.u_col, "column of uniforms used to realize Y");
  method_flags(*approx, cfg);
  approx->add_option("--k", cfg.k, "support size for --method free (0: union support size)");
  report_flag(*approx, cfg);
  approx->add_option("--samples", cfg.samples, "samples CSV path (group, x*, u, y*); needs --u-col or --seed");

  auto* diagnose = app.add_subcommand("diagnose", "rebuild from a dataset and check it, including y1..ym columns");
  dataset_flags(*diagnose, cfg);
  diagnose->add_option("--u-col", cfg.u_col, "column of uniforms");
  method_flags(*diagnose, cfg);
  diagnose->add_option("--k", cfg.k, "support size for --method free");
  report_flag(*diagnose, cfg);

  auto* binary = app.add_subcommand("binary-case", "closed forms for a grouping plus one independent set A");
  binary->add_option("--input", cfg.input, "CSV with columns p, f, g (labels from --group-col if present)")
      ->required();
  binary->add_option("--group-col", cfg.group_col, "optional atom label column")->capture_default_str();
  binary->add_option("--pA", cfg.pA, "P[A] as a decimal or a ratio such as 1/2")->required();
  binary->add_option("--regime", cfg.regime, "auto | half | nonhalf")
      ->check(CLI::IsMember({"auto", "half", "nonhalf"}))
      ->capture_default_str();
  binary->add_flag("--verify", cfg.verify, "compare with brute force and with the unconstrained optimum");
  report_flag(*binary, cfg);

  auto* ot = app.add_subcommand("ot", "optimal transport between the two measures in the input");
  ot->add_option("--input", cfg.input, "CSV with a measure id column, weight and x1..xm")->required();
  ot->add_option("--measure-col", cfg.measure_col, "measure id column")->capture_default_str();
  ot->add_option("--value-cols", cfg.value_cols, "value columns")->delimiter(',');
  ot->add_option("--weight-col", cfg.weight_col, "weight column (default: 'weight' if present)");
  method_flags(*ot, cfg);
  report_flag(*ot, cfg);

  auto* bary = app.add_subcommand("barycenter", "Wasserstein-2 barycenter of the measures in the input");
  bary->add_option("--input", cfg.input, "CSV with a measure id column, weight and x1..xm")->required();
  bary->add_option("--measure-col", cfg.measure_col, "measure id column")->capture_default_str();
  bary->add_option("--value-cols", cfg.value_cols, "value columns")->delimiter(',');
  bary->add_option("--weight-col", cfg.weight_col, "weight column (default: 'weight' if present)");
  method_flags(*bary, cfg);
  bary->add_option("--support", cfg.support, "CSV of candidate support points for exact/entropic");
  bary->add_option("--k", cfg.k, "support size for --method free");
  bary->add_option("--resolution", cfg.resolution, "quantile grid size for --method quantile1d (0: exact)");
  report_flag(*bary, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : indep::cli::kConfig;
  }
  cfg.subcommand = app.get_subcommands().front()->get_name();
  return indep::cli::run(cfg, std::cout, std::cerr);
}
