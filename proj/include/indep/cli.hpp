#pragma once

#include "indep/error.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace indep::cli {

enum ExitCode : int {
  kOk = 0,
  kIo = 2,
  kParse = 3,
  kSolver = 4,
  kConfig = 5,
};

/// Exit status for an error raised anywhere in the pipeline.
int exit_code(ErrorCode code);

struct Config {
  /// approx | binary-case | ot | barycenter | diagnose
  std::string subcommand;
  std::string input;
  std::string group_col = "group";
  /// Coordinates in this order. Empty: every header column named x<digits>.
  std::vector<std::string> value_cols;
  std::optional<std::string> weight_col;
  std::optional<std::string> u_col;
  /// auto | exact | entropic | free | quantile1d
  std::string method = "auto";
  double epsilon = 0.01;
  /// 0 keeps each solver's default.
  int max_iter = 0;
  double tol = 0.0;
  std::optional<std::uint64_t> seed;
  /// Empty writes the report to stdout.
  std::string report;
  std::string samples;

  // binary-case
  std::string pA;
  bool verify = false;
  /// auto | half | nonhalf
  std::string regime = "auto";

  // ot, barycenter
  std::string measure_col = "measure";
  /// Fixed support for barycenter --method exact|entropic (default: union).
  std::string support;
  int k = 0;
  /// Quantile grid size for barycenter --method quantile1d (0 = exact breakpoints).
  int resolution = 0;
};

/// Runs one subcommand. Errors are reported on `err` as "error: ..." and
/// mapped to an exit code; the report goes to cfg.report or `out`.
int run(const Config& cfg, std::ostream& out, std::ostream& err);

int run_approx(const Config& cfg, std::ostream& out);
int run_binary_case(const Config& cfg, std::ostream& out);
int run_ot(const Config& cfg, std::ostream& out);
int run_barycenter(const Config& cfg, std::ostream& out);
int run_diagnose(const Config& cfg, std::ostream& out);

/// Text for --help describing exit statuses.
std::string exit_code_help();

}  // namespace indep::cli
