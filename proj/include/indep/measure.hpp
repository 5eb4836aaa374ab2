#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace indep {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Finite weighted point set in R^m. Points are stored one per row of an
/// n x m matrix; weights are a probability vector. Duplicate points are kept
/// as separate atoms (see coalesce()).
class DiscreteMeasure {
 public:
  /// Weights must already be a probability vector up to 1e-6 (renormalized
  /// here); larger deviations are rejected. Use make_measure() for raw masses.
  DiscreteMeasure(Matrix points, Vector weights);

  Index size() const { return points_.rows(); }
  Index dim() const { return points_.cols(); }
  const Matrix& points() const { return points_; }
  const Vector& weights() const { return weights_; }
  auto point(Index i) const { return points_.row(i).transpose(); }
  double weight(Index i) const { return weights_(i); }

 private:
  Matrix points_;
  Vector weights_;
};

/// Builds a measure from unnormalized nonnegative masses (total mass > 0).
DiscreteMeasure make_measure(Matrix points, Vector masses);
DiscreteMeasure make_measure(const std::vector<Vector>& points, std::span<const double> masses);

/// 1-D convenience: points given as scalars.
DiscreteMeasure make_measure_1d(std::span<const double> points, std::span<const double> masses);

DiscreteMeasure dirac(const Vector& at);

double second_moment(const DiscreteMeasure& mu);
Vector mean(const DiscreteMeasure& mu);

/// Merges exactly equal support points (summing weights) and orders the
/// result lexicographically by coordinates.
DiscreteMeasure coalesce(const DiscreteMeasure& mu);

/// Stable lexicographic order of the support (ties keep construction order).
std::vector<Index> lex_order(const Matrix& points);

DiscreteMeasure translate(const DiscreteMeasure& mu, const Vector& shift);

/// Total variation between two weight vectors on a common indexed support.
double total_variation(const Vector& p, const Vector& q);

// ---------------------------------------------------------------------------

struct Atom {
  std::string label;
  double probability;
  DiscreteMeasure measure;
};

/// Law of X within each group of a finite partition, with group probabilities.
class ConditionalFamily {
 public:
  explicit ConditionalFamily(std::vector<Atom> atoms);

  Index size() const { return static_cast<Index>(atoms_.size()); }
  Index dim() const { return atoms_.front().measure.dim(); }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const Atom& atom(Index a) const { return atoms_[static_cast<std::size_t>(a)]; }
  std::optional<Index> find(const std::string& label) const;

 private:
  std::vector<Atom> atoms_;
};

DiscreteMeasure mixture(const ConditionalFamily& family);

/// Sum_a p_a mean(mu_a).
Vector family_mean(const ConditionalFamily& family);

// ---------------------------------------------------------------------------

struct Row {
  std::string group;
  Vector x;
  double weight = 1.0;
  std::optional<double> u;
};

/// Sample-level data: one row per observation. Weights are renormalized to
/// sum to one on construction.
class Dataset {
 public:
  explicit Dataset(std::vector<Row> rows);

  Index size() const { return static_cast<Index>(rows_.size()); }
  Index dim() const { return dim_; }
  bool has_u() const { return has_u_; }
  const std::vector<Row>& rows() const { return rows_; }
  const Row& row(Index i) const { return rows_[static_cast<std::size_t>(i)]; }
  /// Group labels in order of first appearance.
  const std::vector<std::string>& groups() const { return groups_; }

 private:
  std::vector<Row> rows_;
  std::vector<std::string> groups_;
  Index dim_ = 0;
  bool has_u_ = false;
};

}  // namespace indep
