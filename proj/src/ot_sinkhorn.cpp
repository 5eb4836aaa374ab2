#include "indep/error.hpp"
#include "indep/ot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace indep::ot {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(sum_i exp(v_i)), ignoring -inf entries.
double log_sum_exp(const Vector& v) {
  const double c = v.maxCoeff();
  if (c == kNegInf) return kNegInf;
  double s = 0.0;
  for (Index i = 0; i < v.size(); ++i) s += std::exp(v(i) - c);
  return c + std::log(s);
}

Vector safe_log(const Vector& w) {
  return w.unaryExpr([](double x) { return x > 0.0 ? std::log(x) : kNegInf; });
}

// plan_ij = exp((f_i + g_j - C_ij) / eps + log a_i + log b_j)
Matrix gibbs_plan(const Vector& f, const Vector& g, const Vector& log_a, const Vector& log_b, const Matrix& cost,
                  double eps) {
  Matrix plan(cost.rows(), cost.cols());
  for (Index j = 0; j < cost.cols(); ++j)
    for (Index i = 0; i < cost.rows(); ++i) {
      const double e = (f(i) + g(j) - cost(i, j)) / eps + log_a(i) + log_b(j);
      plan(i, j) = e == kNegInf ? 0.0 : std::exp(e);
    }
  return plan;
}

// Moves `plan` onto the exact marginals (a, b): shrink rows, then columns, that
// carry too much mass, then spread the remaining deficit as a rank-one term.
void round_to_marginals(Matrix& plan, const Vector& a, const Vector& b) {
  for (Index i = 0; i < plan.rows(); ++i) {
    const double s = plan.row(i).sum();
    if (s > a(i)) plan.row(i) *= a(i) / s;
  }
  for (Index j = 0; j < plan.cols(); ++j) {
    const double s = plan.col(j).sum();
    if (s > b(j)) plan.col(j) *= b(j) / s;
  }
  const Vector row_deficit = (a - plan.rowwise().sum()).cwiseMax(0.0);
  const Vector col_deficit = (b - plan.colwise().sum().transpose()).cwiseMax(0.0);
  const double total = row_deficit.sum();
  if (total > 0.0) plan += row_deficit * col_deficit.transpose() / total;
}

}  // namespace

OtSolution solve_entropic(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const EntropicOptions& options) {
  if (!(options.epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  if (mu.dim() != nu.dim()) throw Error(ErrorCode::DimensionMismatch, "measures differ in dimension");
  const Matrix cost = cost_matrix(mu.points(), nu.points());
  const Index n = mu.size(), k = nu.size();
  const Vector log_a = safe_log(mu.weights());
  const Vector log_b = safe_log(nu.weights());

  // Halve from the largest cost entry down to the target.
  std::vector<double> schedule;
  for (double e = cost.maxCoeff(); e > options.epsilon; e *= 0.5) schedule.push_back(e);
  schedule.push_back(options.epsilon);

  Vector f = Vector::Zero(n), g = Vector::Zero(k);
  Vector scratch_row(k), scratch_col(n);
  int iterations = 0;
  double violation = std::numeric_limits<double>::infinity();

  for (std::size_t stage = 0; stage < schedule.size(); ++stage) {
    const double eps = schedule[stage];
    const bool last = stage + 1 == schedule.size();
    const double stage_tol = last ? options.tol : std::max(options.tol, 1e-6);
    const int stage_cap = last ? options.max_iter : std::min(options.max_iter, 500);
    for (int it = 0; it < stage_cap && iterations < options.max_iter; ++it) {
      ++iterations;
      for (Index i = 0; i < n; ++i) {
        if (log_a(i) == kNegInf) continue;
        for (Index j = 0; j < k; ++j) scratch_row(j) = log_b(j) + (g(j) - cost(i, j)) / eps;
        f(i) = -eps * log_sum_exp(scratch_row);
      }
      for (Index j = 0; j < k; ++j) {
        if (log_b(j) == kNegInf) continue;
        for (Index i = 0; i < n; ++i) scratch_col(i) = log_a(i) + (f(i) - cost(i, j)) / eps;
        g(j) = -eps * log_sum_exp(scratch_col);
      }
      if (!f.allFinite() || !g.allFinite())
        throw Error(ErrorCode::NumericalUnderflow, "Sinkhorn potentials became non-finite; epsilon too small");
      // Columns are exact after the g-update; rows carry the violation.
      violation = 0.0;
      for (Index i = 0; i < n; ++i) {
        if (log_a(i) == kNegInf) continue;
        for (Index j = 0; j < k; ++j) scratch_row(j) = log_b(j) + (f(i) + g(j) - cost(i, j)) / eps;
        violation += std::abs(std::exp(log_sum_exp(scratch_row)) - 1.0) * mu.weight(i);
      }
      if (violation < stage_tol) break;
    }
  }

  Matrix plan = gibbs_plan(f, g, log_a, log_b, cost, options.epsilon);
  if (!plan.allFinite() || plan.sum() <= 0.0)
    throw Error(ErrorCode::NumericalUnderflow, "Sinkhorn plan underflowed");
  round_to_marginals(plan, mu.weights(), nu.weights());
  const double value = plan.cwiseProduct(cost).sum();
  Coupling coupling(mu, nu, std::move(plan));
  return OtSolution{std::move(coupling), value, Method::Entropic, iterations, violation < options.tol};
}

}  // namespace indep::ot
