#pragma once

#include "indep/measure.hpp"

#include <Eigen/SparseCore>

namespace indep::lp {

/// min c'x  subject to  A x = b, x >= 0.
struct Problem {
  Eigen::SparseMatrix<double> A;
  Vector b;
  Vector c;
};

enum class Status { Optimal, Infeasible, Unbounded };

enum class Pricing {
  /// Lowest-index improving column, lowest-index leaving row.
  Bland,
  /// Most negative reduced cost; falls back to Bland while pivots stall.
  DantzigBlandFallback,
};

struct Options {
  Pricing pricing = Pricing::DantzigBlandFallback;
  /// 0 selects a cap from the problem size.
  long max_iterations = 0;
  /// Consecutive degenerate pivots before switching to Bland's rule.
  int stall_limit = 50;
};

struct Result {
  Status status = Status::Infeasible;
  Vector x;
  double objective = 0.0;
  long iterations = 0;
};

/// Two-phase revised simplex on a sparse LU of the basis with product-form
/// updates, refactorized every 64 pivots.
/// Throws Error(SolverFailure) when the iteration cap is hit.
Result solve(const Problem& problem, const Options& options = {});

}  // namespace indep::lp
