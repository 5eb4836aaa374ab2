// Transportation simplex on the bipartite graph rows -> columns.
//
// Nodes 0..n-1 are rows, n..n+k-1 are columns. A basis is a spanning tree of
// n+k-1 cells. Entering cell: lowest (row, col) with negative reduced cost.
// Leaving cell: lowest (row, col) among the minus-cells attaining the ratio.
// Using the same index order for both choices is Bland's rule, so degenerate
// pivots cannot cycle.

#include "indep/error.hpp"
#include "indep/ot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace indep::ot {
namespace {

struct Edge {
  int node;
  Index cell;
};

class TransportSimplex {
 public:
  TransportSimplex(const Vector& a, const Vector& b, const Matrix& cost)
      : n_(a.size()), k_(b.size()), cost_(cost), plan_(Matrix::Zero(n_, k_)),
        basic_(static_cast<std::size_t>(n_ * k_), 0), u_(n_), v_(k_) {
    cost_rows_ = cost;
    north_west_corner(a, b);
    const double scale = std::max(1.0, cost_.cwiseAbs().maxCoeff());
    tolerance_ = 1e-12 * scale;
  }

  int run(long max_iterations) {
    int iterations = 0;
    while (true) {
      build_adjacency();
      compute_potentials();
      const Index entering = find_entering();
      if (entering < 0) return iterations;
      if (++iterations > max_iterations)
        throw Error(ErrorCode::SolverFailure, "transport simplex exceeded its iteration cap");
      pivot(entering);
    }
  }

  const Matrix& plan() const { return plan_; }

 private:
  Index row_of(Index cell) const { return cell / k_; }
  Index col_of(Index cell) const { return cell % k_; }

  // One index advances per step, so the staircase has exactly n+k-1 cells
  // (degenerate zero cells included) and forms a spanning tree.
  void north_west_corner(const Vector& a, const Vector& b) {
    Index i = 0, j = 0;
    double row_left = a(0), col_left = b(0);
    while (true) {
      const double x = std::max(0.0, std::min(row_left, col_left));
      plan_(i, j) = x;
      add_basic(i * k_ + j);
      row_left -= x;
      col_left -= x;
      const bool last_row = i + 1 == n_;
      const bool last_col = j + 1 == k_;
      if (last_row && last_col) break;
      if (last_col || (!last_row && row_left <= col_left)) {
        row_left = a(++i);
      } else {
        col_left = b(++j);
      }
    }
  }

  void add_basic(Index cell) {
    basic_[static_cast<std::size_t>(cell)] = 1;
    cells_.push_back(cell);
  }

  // Compressed adjacency of the current tree, rebuilt in place.
  void build_adjacency() {
    const auto total = static_cast<std::size_t>(n_ + k_);
    offsets_.assign(total + 1, 0);
    for (Index cell : cells_) {
      ++offsets_[static_cast<std::size_t>(row_of(cell)) + 1];
      ++offsets_[static_cast<std::size_t>(n_ + col_of(cell)) + 1];
    }
    for (std::size_t t = 0; t < total; ++t) offsets_[t + 1] += offsets_[t];
    edges_.resize(2 * cells_.size());
    fill_.assign(offsets_.begin(), offsets_.end() - 1);
    for (Index cell : cells_) {
      const int r = static_cast<int>(row_of(cell));
      const int c = static_cast<int>(n_ + col_of(cell));
      edges_[static_cast<std::size_t>(fill_[static_cast<std::size_t>(r)]++)] = {c, cell};
      edges_[static_cast<std::size_t>(fill_[static_cast<std::size_t>(c)]++)] = {r, cell};
    }
  }

  // Breadth-first traversal from row 0; fills parent, parent edge and depth.
  void traverse() {
    const auto total = static_cast<std::size_t>(n_ + k_);
    parent_.assign(total, -1);
    parent_cell_.assign(total, -1);
    depth_.assign(total, -1);
    order_.clear();
    depth_[0] = 0;
    order_.push_back(0);
    for (std::size_t head = 0; head < order_.size(); ++head) {
      const int node = order_[head];
      const auto idx = static_cast<std::size_t>(node);
      for (int e = offsets_[idx]; e < offsets_[idx + 1]; ++e) {
        const Edge& edge = edges_[static_cast<std::size_t>(e)];
        const auto next = static_cast<std::size_t>(edge.node);
        if (depth_[next] >= 0) continue;
        depth_[next] = depth_[idx] + 1;
        parent_[next] = node;
        parent_cell_[next] = edge.cell;
        order_.push_back(edge.node);
      }
    }
    if (order_.size() != total) throw Error(ErrorCode::SolverFailure, "basis is not a spanning tree");
  }

  void compute_potentials() {
    traverse();
    u_(0) = 0.0;
    for (std::size_t t = 1; t < order_.size(); ++t) {
      const int node = order_[t];
      const Index cell = parent_cell_[static_cast<std::size_t>(node)];
      const double c = cost_rows_(row_of(cell), col_of(cell));
      if (node < n_) {
        u_(node) = c - v_(col_of(cell));
      } else {
        v_(node - n_) = c - u_(row_of(cell));
      }
    }
  }

  Index find_entering() const {
    for (Index i = 0; i < n_; ++i) {
      const double* row = cost_rows_.data() + i * k_;
      const char* basic = basic_.data() + i * k_;
      const double ui = u_(i) - tolerance_;
      for (Index j = 0; j < k_; ++j) {
        if (!basic[j] && row[j] - v_(j) < ui) return i * k_ + j;
      }
    }
    return -1;
  }

  void pivot(Index entering) {
    const Index i = row_of(entering);
    const Index j = col_of(entering);
    // Cycle: entering cell (+), then the tree path from column j to row i with
    // alternating signs starting at (-). The path meets at the common ancestor.
    std::vector<Index> from_col, from_row;
    int a = static_cast<int>(n_ + j), b = static_cast<int>(i);
    while (a != b) {
      if (depth_[static_cast<std::size_t>(a)] >= depth_[static_cast<std::size_t>(b)]) {
        from_col.push_back(parent_cell_[static_cast<std::size_t>(a)]);
        a = parent_[static_cast<std::size_t>(a)];
      } else {
        from_row.push_back(parent_cell_[static_cast<std::size_t>(b)]);
        b = parent_[static_cast<std::size_t>(b)];
      }
    }
    from_col.insert(from_col.end(), from_row.rbegin(), from_row.rend());

    Index leaving = -1;
    double theta = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < from_col.size(); t += 2) {
      const Index cell = from_col[t];
      const double f = plan_(row_of(cell), col_of(cell));
      if (f < theta || (f == theta && cell < leaving)) {
        theta = f;
        leaving = cell;
      }
    }

    for (std::size_t t = 0; t < from_col.size(); ++t) {
      const Index cell = from_col[t];
      plan_(row_of(cell), col_of(cell)) += (t % 2 == 0) ? -theta : theta;
    }
    plan_(row_of(leaving), col_of(leaving)) = 0.0;
    plan_(i, j) = theta;

    basic_[static_cast<std::size_t>(leaving)] = 0;
    basic_[static_cast<std::size_t>(entering)] = 1;
    *std::find(cells_.begin(), cells_.end(), leaving) = entering;
  }

  Index n_, k_;
  const Matrix& cost_;
  Matrix plan_;
  std::vector<char> basic_;
  std::vector<Index> cells_;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> cost_rows_;
  std::vector<int> offsets_, fill_;
  std::vector<Edge> edges_;
  std::vector<int> parent_, depth_;
  std::vector<Index> parent_cell_;
  std::vector<int> order_;
  Vector u_, v_;
  double tolerance_ = 0.0;
};

}  // namespace

OtSolution solve_exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const ExactOptions& options) {
  if (mu.dim() != nu.dim()) throw Error(ErrorCode::DimensionMismatch, "measures differ in dimension");
  const Matrix cost = cost_matrix(mu.points(), nu.points());
  TransportSimplex simplex(mu.weights(), nu.weights(), cost);
  const long cap = options.max_iterations > 0 ? options.max_iterations
                                              : 50 * static_cast<long>(mu.size() * nu.size()) + 1000;
  const int iterations = simplex.run(cap);
  Coupling coupling(mu, nu, simplex.plan());
  const double value = coupling.plan().cwiseProduct(cost).sum();
  return OtSolution{std::move(coupling), value, Method::Exact, iterations, true};
}

}  // namespace indep::ot
