#include "indep/lp.hpp"

#include "indep/error.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace indep::lp {
namespace {

using SpMat = Eigen::SparseMatrix<double>;

class RevisedSimplex {
 public:
  RevisedSimplex(const Problem& p, const Options& options)
      : A_(p.A), b_(p.b), c_(p.c), options_(options), rows_(p.A.rows()), cols_(p.A.cols()) {
    A_.makeCompressed();
    // Rows with negative right-hand side are flipped so artificials start feasible.
    for (Index r = 0; r < rows_; ++r) {
      if (b_(r) < 0.0) {
        b_(r) = -b_(r);
        flip_.push_back(r);
      }
    }
    if (!flip_.empty()) {
      Vector sign = Vector::Ones(rows_);
      for (Index r : flip_) sign(r) = -1.0;
      A_ = sign.asDiagonal() * A_;
      A_.makeCompressed();
    }
    basis_.resize(static_cast<std::size_t>(rows_));
    is_basic_.assign(static_cast<std::size_t>(cols_ + rows_), 0);
    for (Index r = 0; r < rows_; ++r) {
      basis_[static_cast<std::size_t>(r)] = cols_ + r;
      is_basic_[static_cast<std::size_t>(cols_ + r)] = 1;
    }
    refactor();
    const double scale = std::max(1.0, c_.size() ? c_.cwiseAbs().maxCoeff() : 1.0);
    cost_tol_ = 1e-11 * scale;
    cap_ = options_.max_iterations > 0 ? options_.max_iterations : 50 * (rows_ + cols_) + 10000;
  }

  Result run() {
    Result result;
    // Phase 1: minimize the sum of artificials.
    Vector phase1 = Vector::Zero(cols_ + rows_);
    phase1.tail(rows_).setOnes();
    if (!iterate(phase1, /*allow_artificial=*/true)) {
      throw Error(ErrorCode::SolverFailure, "phase 1 reported unbounded");
    }
    double infeasibility = 0.0;
    for (Index r = 0; r < rows_; ++r)
      if (basis_[static_cast<std::size_t>(r)] >= cols_) infeasibility += xb_(r);
    if (infeasibility > 1e-9 * std::max(1.0, b_.cwiseAbs().maxCoeff())) {
      result.status = Status::Infeasible;
      result.iterations = iterations_;
      return result;
    }
    drive_out_artificials();

    Vector phase2 = Vector::Zero(cols_ + rows_);
    phase2.head(cols_) = c_;
    const bool bounded = iterate(phase2, /*allow_artificial=*/false);
    refactor();
    result.iterations = iterations_;
    if (!bounded) {
      result.status = Status::Unbounded;
      return result;
    }
    result.status = Status::Optimal;
    result.x = Vector::Zero(cols_);
    for (Index r = 0; r < rows_; ++r) {
      const Index j = basis_[static_cast<std::size_t>(r)];
      if (j < cols_) result.x(j) = std::max(0.0, xb_(r));
    }
    result.objective = c_.dot(result.x);
    return result;
  }

 private:
  // Dense copy of column j (artificial columns are unit vectors).
  template <typename F>
  void for_column(Index j, F&& f) const {
    if (j >= cols_) {
      f(j - cols_, 1.0);
      return;
    }
    for (SpMat::InnerIterator it(A_, j); it; ++it) f(it.row(), it.value());
  }

  // B^-1 a via the LU of the last refactored basis followed by the eta file.
  Vector ftran(Vector v) const {
    v = lu_.solve(v);
    for (const Eta& e : etas_) {
      const double vr = v(e.row) / e.pivot;
      for (const auto& [i, di] : e.entries) v(i) -= di * vr;
      v(e.row) = vr;
    }
    return v;
  }

  // u' B^-1 for a row vector u, returned as a column.
  Vector btran(Vector u) const {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double s = u(it->row);
      for (const auto& [i, di] : it->entries) s -= u(i) * di;
      u(it->row) = s / it->pivot;
    }
    return lu_.transpose().solve(u);
  }

  Vector column_in_basis(Index j) const {
    Vector a = Vector::Zero(rows_);
    for_column(j, [&](Index r, double v) { a(r) = v; });
    return ftran(std::move(a));
  }

  double reduced_cost(const Vector& cost, const Vector& y, Index j) const {
    double d = cost(j);
    for_column(j, [&](Index r, double v) { d -= y(r) * v; });
    return d;
  }

  // Returns false if the phase is unbounded.
  bool iterate(const Vector& cost, bool allow_artificial) {
    const Index limit = allow_artificial ? cols_ + rows_ : cols_;
    int stalled = 0;
    while (true) {
      Vector cb(rows_);
      for (Index r = 0; r < rows_; ++r) cb(r) = cost(basis_[static_cast<std::size_t>(r)]);
      const Vector y = btran(std::move(cb));

      const bool bland = options_.pricing == Pricing::Bland || stalled >= options_.stall_limit;
      Index entering = -1;
      double best = -cost_tol_;
      for (Index j = 0; j < limit; ++j) {
        if (is_basic_[static_cast<std::size_t>(j)]) continue;
        const double d = reduced_cost(cost, y, j);
        if (d < best) {
          entering = j;
          if (bland) break;
          best = d;
        }
      }
      if (entering < 0) return true;
      if (++iterations_ > cap_) throw Error(ErrorCode::SolverFailure, "simplex iteration cap exceeded");

      const Vector d = column_in_basis(entering);
      Index leave = -1;
      double theta = std::numeric_limits<double>::infinity();
      for (Index r = 0; r < rows_; ++r) {
        if (d(r) <= kPivotTol) continue;
        const double ratio = std::max(0.0, xb_(r)) / d(r);
        if (ratio < theta - 1e-14 ||
            (ratio <= theta + 1e-14 && basis_[static_cast<std::size_t>(r)] < basis_[static_cast<std::size_t>(leave)])) {
          theta = std::min(theta, ratio);
          leave = r;
        }
      }
      if (leave < 0) return false;
      stalled = theta <= 1e-14 ? stalled + 1 : 0;
      pivot(entering, leave, d, theta);
    }
  }

  void pivot(Index entering, Index leave, const Vector& d, double theta) {
    xb_ -= theta * d;
    xb_(leave) = theta;
    for (Index r = 0; r < rows_; ++r)
      if (xb_(r) < 0.0 && xb_(r) > -1e-12) xb_(r) = 0.0;
    Eta eta{leave, d(leave), {}};
    for (Index r = 0; r < rows_; ++r)
      if (r != leave && d(r) != 0.0) eta.entries.emplace_back(r, d(r));
    etas_.push_back(std::move(eta));
    is_basic_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(leave)])] = 0;
    is_basic_[static_cast<std::size_t>(entering)] = 1;
    basis_[static_cast<std::size_t>(leave)] = entering;
    if (static_cast<Index>(etas_.size()) >= kRefactorEvery) refactor();
  }

  void refactor() {
    std::vector<Eigen::Triplet<double>> entries;
    for (Index r = 0; r < rows_; ++r)
      for_column(basis_[static_cast<std::size_t>(r)], [&](Index i, double v) { entries.emplace_back(i, r, v); });
    SpMat basis_matrix(rows_, rows_);
    basis_matrix.setFromTriplets(entries.begin(), entries.end());
    lu_.compute(basis_matrix);
    if (lu_.info() != Eigen::Success) throw Error(ErrorCode::SolverFailure, "basis matrix is singular");
    etas_.clear();
    xb_ = lu_.solve(b_);
    for (Index r = 0; r < rows_; ++r)
      if (xb_(r) < 0.0 && xb_(r) > -1e-9) xb_(r) = 0.0;
  }

  // Artificials left basic at zero are pivoted out where possible; those that
  // remain sit on redundant rows and never move again.
  void drive_out_artificials() {
    for (Index r = 0; r < rows_; ++r) {
      if (basis_[static_cast<std::size_t>(r)] < cols_) continue;
      const Vector row = btran(Vector::Unit(rows_, r));
      for (Index j = 0; j < cols_; ++j) {
        if (is_basic_[static_cast<std::size_t>(j)]) continue;
        double v = 0.0;
        for_column(j, [&](Index i, double a) { v += row(i) * a; });
        if (std::abs(v) > 1e-7) {
          pivot(j, r, column_in_basis(j), 0.0);
          break;
        }
      }
    }
  }

  struct Eta {
    Index row;
    double pivot;
    std::vector<std::pair<Index, double>> entries;
  };

  static constexpr Index kRefactorEvery = 64;
  static constexpr double kPivotTol = 1e-9;

  SpMat A_;
  Vector b_, c_;
  Options options_;
  Index rows_, cols_;
  std::vector<Index> flip_;
  std::vector<Index> basis_;
  std::vector<char> is_basic_;
  mutable Eigen::SparseLU<SpMat> lu_;  // transpose() is non-const
  std::vector<Eta> etas_;
  Vector xb_;
  double cost_tol_ = 0.0;
  long cap_ = 0;
  long iterations_ = 0;
};

}  // namespace

Result solve(const Problem& problem, const Options& options) {
  if (problem.A.rows() != problem.b.size() || problem.A.cols() != problem.c.size())
    throw Error(ErrorCode::DimensionMismatch, "LP dimensions are inconsistent");
  RevisedSimplex simplex(problem, options);
  return simplex.run();
}

}  // namespace indep::lp
