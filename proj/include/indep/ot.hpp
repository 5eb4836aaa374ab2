#pragma once

#include "indep/measure.hpp"

#include <string_view>

namespace indep::ot {

enum class Method { Exact, Entropic, Comonotone1d };

std::string_view to_string(Method method);

/// Joint weight matrix over two supports. Marginals are not enforced by the
/// constructor: an unconverged entropic plan is still a Coupling.
class Coupling {
 public:
  Coupling(DiscreteMeasure rows, DiscreteMeasure cols, Matrix plan);

  const DiscreteMeasure& row_measure() const { return rows_; }
  const DiscreteMeasure& col_measure() const { return cols_; }
  const Matrix& plan() const { return plan_; }

  /// Largest absolute deviation of a row or column sum from its marginal.
  double marginal_violation() const;

 private:
  DiscreteMeasure rows_;
  DiscreteMeasure cols_;
  Matrix plan_;
};

struct OtSolution {
  Coupling coupling;
  double cost = 0.0;
  Method method = Method::Exact;
  int iterations = 0;
  bool converged = false;
};

/// Dense matrix of squared Euclidean distances between rows of x and rows of y.
Matrix cost_matrix(const Matrix& x, const Matrix& y);

double transport_cost(const Coupling& coupling);

/// Product measure mu x nu as a coupling.
Coupling product_coupling(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

struct ExactOptions {
  /// 0 selects a cap proportional to the number of cells.
  long max_iterations = 0;
};

/// Transportation simplex with Bland's rule. The initial basis is the
/// north-west-corner plan in input order, so the returned optimal vertex is a
/// deterministic function of the inputs.
OtSolution solve_exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const ExactOptions& options = {});

struct EntropicOptions {
  double epsilon = 0.01;
  int max_iter = 10000;
  /// L1 row-marginal violation accepted as converged.
  double tol = 1e-9;
};

/// Log-domain Sinkhorn with epsilon scaling. The final plan is rounded onto
/// the exact marginals, and the reported cost is the unregularized <plan, C>.
/// The flag reports whether the iterations met `tol` before rounding.
OtSolution solve_entropic(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const EntropicOptions& options = {});

/// North-west-corner plan on supports sorted by (value, original index); the
/// optimal plan for m = 1.
OtSolution solve_comonotone_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

double wasserstein_sq(const DiscreteMeasure& mu, const DiscreteMeasure& nu, Method method = Method::Exact,
                      const EntropicOptions& entropic = {});

}  // namespace indep::ot
