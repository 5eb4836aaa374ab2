#include "indep/measure.hpp"

#include "indep/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace indep {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptySupport: return "EmptySupport";
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::InvalidWeights: return "InvalidWeights";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::UOutOfRange: return "UOutOfRange";
    case ErrorCode::UnseenValue: return "UnseenValue";
    case ErrorCode::DatasetMismatch: return "DatasetMismatch";
    case ErrorCode::UnknownSupportPoint: return "UnknownSupportPoint";
    case ErrorCode::UnknownGroup: return "UnknownGroup";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NegativeComponent: return "NegativeComponent";
    case ErrorCode::TooManyAtoms: return "TooManyAtoms";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionNotOne: return "DimensionNotOne";
    case ErrorCode::SupportDimensionMismatch: return "SupportDimensionMismatch";
    case ErrorCode::MissingU: return "MissingU";
    case ErrorCode::NotHalf: return "NotHalf";
    case ErrorCode::HalfNotAllowed: return "HalfNotAllowed";
    case ErrorCode::ConfigConflict: return "ConfigConflict";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::LpInfeasible: return "LpInfeasible";
    case ErrorCode::NumericalUnderflow: return "NumericalUnderflow";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::WriteFailed: return "WriteFailed";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

namespace {

constexpr double kConstructorTolerance = 1e-6;

void check_masses(const Matrix& points, const Vector& masses) {
  if (points.rows() == 0) throw Error(ErrorCode::EmptySupport, "measure has no points");
  if (points.cols() == 0) throw Error(ErrorCode::DimensionMismatch, "points must have dimension >= 1");
  if (masses.size() != points.rows())
    throw Error(ErrorCode::DimensionMismatch, "number of weights differs from number of points");
  for (Index i = 0; i < masses.size(); ++i) {
    if (!std::isfinite(masses(i))) throw Error(ErrorCode::InvalidWeights, "non-finite weight");
    if (masses(i) < 0.0) throw Error(ErrorCode::NegativeWeight, "weight " + std::to_string(i) + " is negative");
  }
  if (!points.allFinite()) throw Error(ErrorCode::InvalidArgument, "non-finite support point");
}

}  // namespace

DiscreteMeasure::DiscreteMeasure(Matrix points, Vector weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  check_masses(points_, weights_);
  const double total = weights_.sum();
  if (std::abs(total - 1.0) > kConstructorTolerance)
    throw Error(ErrorCode::InvalidWeights, "weights sum to " + std::to_string(total) + ", expected 1");
  weights_ /= total;
}

DiscreteMeasure make_measure(Matrix points, Vector masses) {
  check_masses(points, masses);
  const double total = masses.sum();
  if (!(total > 0.0)) throw Error(ErrorCode::InvalidWeights, "total mass must be positive");
  masses /= total;
  return DiscreteMeasure(std::move(points), std::move(masses));
}

DiscreteMeasure make_measure(const std::vector<Vector>& points, std::span<const double> masses) {
  if (points.empty()) throw Error(ErrorCode::EmptySupport, "measure has no points");
  const Index m = points.front().size();
  Matrix p(static_cast<Index>(points.size()), m);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != m) throw Error(ErrorCode::DimensionMismatch, "support points differ in dimension");
    p.row(static_cast<Index>(i)) = points[i].transpose();
  }
  Vector w = Eigen::Map<const Vector>(masses.data(), static_cast<Index>(masses.size()));
  return make_measure(std::move(p), std::move(w));
}

DiscreteMeasure make_measure_1d(std::span<const double> points, std::span<const double> masses) {
  Matrix p = Eigen::Map<const Vector>(points.data(), static_cast<Index>(points.size()));
  Vector w = Eigen::Map<const Vector>(masses.data(), static_cast<Index>(masses.size()));
  return make_measure(std::move(p), std::move(w));
}

DiscreteMeasure dirac(const Vector& at) {
  return DiscreteMeasure(Matrix(at.transpose()), Vector::Ones(1));
}

double second_moment(const DiscreteMeasure& mu) {
  return mu.weights().dot(mu.points().rowwise().squaredNorm());
}

Vector mean(const DiscreteMeasure& mu) {
  return mu.points().transpose() * mu.weights();
}

std::vector<Index> lex_order(const Matrix& points) {
  std::vector<Index> order(static_cast<std::size_t>(points.rows()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    for (Index c = 0; c < points.cols(); ++c) {
      if (points(a, c) < points(b, c)) return true;
      if (points(b, c) < points(a, c)) return false;
    }
    return false;
  });
  return order;
}

DiscreteMeasure coalesce(const DiscreteMeasure& mu) {
  const auto order = lex_order(mu.points());
  std::vector<Index> keep;
  std::vector<double> mass;
  for (Index i : order) {
    if (!keep.empty() && mu.points().row(keep.back()) == mu.points().row(i)) {
      mass.back() += mu.weight(i);
    } else {
      keep.push_back(i);
      mass.push_back(mu.weight(i));
    }
  }
  Matrix p(static_cast<Index>(keep.size()), mu.dim());
  for (std::size_t k = 0; k < keep.size(); ++k) p.row(static_cast<Index>(k)) = mu.points().row(keep[k]);
  return DiscreteMeasure(std::move(p), Eigen::Map<Vector>(mass.data(), static_cast<Index>(mass.size())));
}

DiscreteMeasure translate(const DiscreteMeasure& mu, const Vector& shift) {
  if (shift.size() != mu.dim()) throw Error(ErrorCode::DimensionMismatch, "shift dimension");
  Matrix p = mu.points().rowwise() + shift.transpose();
  return DiscreteMeasure(std::move(p), mu.weights());
}

double total_variation(const Vector& p, const Vector& q) {
  if (p.size() != q.size()) throw Error(ErrorCode::DimensionMismatch, "weight vectors differ in length");
  return 0.5 * (p - q).lpNorm<1>();
}

// ---------------------------------------------------------------------------

ConditionalFamily::ConditionalFamily(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw Error(ErrorCode::EmptyDataset, "conditional family has no atoms");
  double total = 0.0;
  const Index m = atoms_.front().measure.dim();
  for (const auto& a : atoms_) {
    if (!(a.probability > 0.0) || !std::isfinite(a.probability))
      throw Error(ErrorCode::InvalidWeights, "atom '" + a.label + "' has non-positive probability");
    if (a.measure.dim() != m) throw Error(ErrorCode::DimensionMismatch, "atoms differ in dimension");
    total += a.probability;
  }
  if (std::abs(total - 1.0) > kConstructorTolerance)
    throw Error(ErrorCode::InvalidWeights, "atom probabilities sum to " + std::to_string(total));
  for (auto& a : atoms_) a.probability /= total;
}

std::optional<Index> ConditionalFamily::find(const std::string& label) const {
  for (std::size_t a = 0; a < atoms_.size(); ++a)
    if (atoms_[a].label == label) return static_cast<Index>(a);
  return std::nullopt;
}

DiscreteMeasure mixture(const ConditionalFamily& family) {
  Index n = 0;
  for (const auto& a : family.atoms()) n += a.measure.size();
  Matrix p(n, family.dim());
  Vector w(n);
  Index k = 0;
  for (const auto& a : family.atoms()) {
    p.middleRows(k, a.measure.size()) = a.measure.points();
    w.segment(k, a.measure.size()) = a.probability * a.measure.weights();
    k += a.measure.size();
  }
  return DiscreteMeasure(std::move(p), std::move(w));
}

Vector family_mean(const ConditionalFamily& family) {
  Vector out = Vector::Zero(family.dim());
  for (const auto& a : family.atoms()) out += a.probability * mean(a.measure);
  return out;
}

// ---------------------------------------------------------------------------

Dataset::Dataset(std::vector<Row> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) throw Error(ErrorCode::EmptyDataset, "dataset has no rows");
  dim_ = rows_.front().x.size();
  if (dim_ == 0) throw Error(ErrorCode::DimensionMismatch, "rows must have at least one value column");
  has_u_ = rows_.front().u.has_value();
  double total = 0.0;
  std::unordered_map<std::string, bool> seen;
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const auto& r = rows_[i];
    const std::string where = "row " + std::to_string(i);
    if (r.x.size() != dim_) throw Error(ErrorCode::DimensionMismatch, where + " has a different dimension");
    if (!r.x.allFinite()) throw Error(ErrorCode::InvalidArgument, where + " has a non-finite value");
    if (!std::isfinite(r.weight)) throw Error(ErrorCode::InvalidWeights, where + " has a non-finite weight");
    if (r.weight <= 0.0) throw Error(ErrorCode::NegativeWeight, where + " has a non-positive weight");
    if (r.u.has_value() != has_u_) throw Error(ErrorCode::MissingU, where + ": u must be given for all rows or none");
    if (r.u && !(*r.u >= 0.0 && *r.u <= 1.0)) throw Error(ErrorCode::UOutOfRange, where + ": u outside [0,1]");
    total += r.weight;
    if (seen.emplace(r.group, true).second) groups_.push_back(r.group);
  }
  for (auto& r : rows_) r.weight /= total;
}

}  // namespace indep
