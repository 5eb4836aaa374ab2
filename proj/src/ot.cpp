#include "indep/ot.hpp"

#include "indep/error.hpp"

#include <algorithm>
#include <numeric>

namespace indep::ot {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::Exact: return "exact";
    case Method::Entropic: return "entropic";
    case Method::Comonotone1d: return "comonotone_1d";
  }
  return "unknown";
}

Coupling::Coupling(DiscreteMeasure rows, DiscreteMeasure cols, Matrix plan)
    : rows_(std::move(rows)), cols_(std::move(cols)), plan_(std::move(plan)) {
  if (plan_.rows() != rows_.size() || plan_.cols() != cols_.size())
    throw Error(ErrorCode::DimensionMismatch, "plan shape does not match the marginals");
}

double Coupling::marginal_violation() const {
  const double r = (plan_.rowwise().sum() - rows_.weights()).cwiseAbs().maxCoeff();
  const double c = (plan_.colwise().sum().transpose() - cols_.weights()).cwiseAbs().maxCoeff();
  return std::max(r, c);
}

Matrix cost_matrix(const Matrix& x, const Matrix& y) {
  if (x.cols() != y.cols()) throw Error(ErrorCode::DimensionMismatch, "supports differ in dimension");
  Matrix c(x.rows(), y.rows());
  for (Index j = 0; j < y.rows(); ++j)
    for (Index i = 0; i < x.rows(); ++i) c(i, j) = (x.row(i) - y.row(j)).squaredNorm();
  return c;
}

double transport_cost(const Coupling& coupling) {
  return coupling.plan().cwiseProduct(cost_matrix(coupling.row_measure().points(), coupling.col_measure().points())).sum();
}

Coupling product_coupling(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  return Coupling(mu, nu, mu.weights() * nu.weights().transpose());
}

OtSolution solve_comonotone_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (mu.dim() != 1 || nu.dim() != 1) throw Error(ErrorCode::DimensionNotOne, "comonotone coupling requires m = 1");
  const auto rows = lex_order(mu.points());
  const auto cols = lex_order(nu.points());

  Matrix plan = Matrix::Zero(mu.size(), nu.size());
  std::size_t r = 0, c = 0;
  double row_left = mu.weight(rows[0]);
  double col_left = nu.weight(cols[0]);
  while (true) {
    const double x = std::max(0.0, std::min(row_left, col_left));
    plan(rows[r], cols[c]) += x;
    row_left -= x;
    col_left -= x;
    const bool last_row = r + 1 == rows.size();
    const bool last_col = c + 1 == cols.size();
    if (last_row && last_col) break;
    if (last_col || (!last_row && row_left <= col_left)) {
      row_left = mu.weight(rows[++r]);
    } else {
      col_left = nu.weight(cols[++c]);
    }
  }
  Coupling coupling(mu, nu, std::move(plan));
  const double cost = transport_cost(coupling);
  return OtSolution{std::move(coupling), cost, Method::Comonotone1d, 1, true};
}

double wasserstein_sq(const DiscreteMeasure& mu, const DiscreteMeasure& nu, Method method,
                      const EntropicOptions& entropic) {
  switch (method) {
    case Method::Exact: return solve_exact(mu, nu).cost;
    case Method::Entropic: return solve_entropic(mu, nu, entropic).cost;
    case Method::Comonotone1d: return solve_comonotone_1d(mu, nu).cost;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown transport method");
}

}  // namespace indep::ot
