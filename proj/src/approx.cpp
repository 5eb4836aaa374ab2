#include "indep/approx.hpp"

#include "indep/error.hpp"
#include "indep/random.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace indep::approx {
namespace {

DiscreteMeasure without_empty(const DiscreteMeasure& mu) {
  std::vector<Index> keep;
  for (Index j = 0; j < mu.size(); ++j)
    if (mu.weight(j) > 0.0) keep.push_back(j);
  Matrix p(static_cast<Index>(keep.size()), mu.dim());
  Vector w(static_cast<Index>(keep.size()));
  for (std::size_t t = 0; t < keep.size(); ++t) {
    p.row(static_cast<Index>(t)) = mu.points().row(keep[t]);
    w(static_cast<Index>(t)) = mu.weight(keep[t]);
  }
  return make_measure(std::move(p), std::move(w));
}

barycenter::BarycenterResult on_centered_union(const ConditionalFamily& family, const Options& options,
                                               bool use_entropic) {
  if (!use_entropic) return barycenter::centered_refined(family, options.refine_max_iter, options.refine_tol);
  const Vector center = family_mean(family);
  std::vector<Atom> atoms;
  for (const auto& a : family.atoms())
    atoms.push_back({a.label, a.probability, translate(a.measure, -mean(a.measure))});
  const ConditionalFamily zero_mean(std::move(atoms));
  const auto weights = barycenter::entropic(zero_mean, barycenter::union_support(zero_mean), options.entropic);
  DiscreteMeasure start = without_empty(weights.nu0);
  start = translate(start, -mean(start));
  auto result = barycenter::refine(zero_mean, start, options.refine_max_iter, options.refine_tol);
  result.nu0 = translate(result.nu0, center);
  result.method = barycenter::Method::Entropic;
  result.iterations += weights.iterations;
  result.converged = result.converged && weights.converged;
  return result;
}

barycenter::BarycenterResult solve_barycenter(const ConditionalFamily& family, const Options& options) {
  auto method = options.method;
  if (method == BarycenterChoice::Auto)
    method = family.dim() == 1 ? BarycenterChoice::Quantile1d : BarycenterChoice::Exact;
  switch (method) {
    case BarycenterChoice::Quantile1d:
      if (family.dim() != 1) throw Error(ErrorCode::DimensionNotOne, "quantile barycenter requires m = 1");
      return barycenter::quantile_1d_exact(family);
    case BarycenterChoice::Exact: return on_centered_union(family, options, false);
    case BarycenterChoice::Entropic: return on_centered_union(family, options, true);
    case BarycenterChoice::Free: {
      auto free = options.free;
      if (free.k <= 0) free.k = barycenter::union_support(family).rows();
      return barycenter::free_support(family, free);
    }
    case BarycenterChoice::Auto: break;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown barycenter method");
}

}  // namespace

ConditionalFamily estimate_conditionals(const Dataset& data) {
  std::unordered_map<std::string, std::size_t> slot;
  std::vector<std::vector<Index>> members(data.groups().size());
  for (std::size_t g = 0; g < data.groups().size(); ++g) slot.emplace(data.groups()[g], g);
  for (Index r = 0; r < data.size(); ++r) members[slot.at(data.row(r).group)].push_back(r);

  std::vector<Atom> atoms;
  for (std::size_t g = 0; g < members.size(); ++g) {
    const auto& rows = members[g];
    Matrix p(static_cast<Index>(rows.size()), data.dim());
    Vector w(static_cast<Index>(rows.size()));
    for (std::size_t t = 0; t < rows.size(); ++t) {
      p.row(static_cast<Index>(t)) = data.row(rows[t]).x.transpose();
      w(static_cast<Index>(t)) = data.row(rows[t]).weight;
    }
    const double mass = w.sum();
    atoms.push_back({data.groups()[g], mass, make_measure(std::move(p), std::move(w))});
  }
  return ConditionalFamily(std::move(atoms));
}

double lower_bound(const ConditionalFamily& family, const DiscreteMeasure& nu) {
  return barycenter::objective(family, nu);
}

IndependentApproximation assemble(const ConditionalFamily& family, const DiscreteMeasure& nu0_in) {
  const DiscreteMeasure nu0 = coalesce(without_empty(nu0_in));
  IndependentApproximation out{family, nu0};
  out.achieved_distance_sq = 0.0;
  for (const auto& atom : family.atoms()) {
    ot::OtSolution sol = ot::solve_exact(atom.measure, nu0);
    const Matrix& plan = sol.coupling.plan();
    const Matrix cost = ot::cost_matrix(atom.measure.points(), nu0.points());
    Matrix conditional = Matrix::Zero(plan.rows(), plan.cols());
    Matrix ladder = Matrix::Zero(plan.rows(), plan.cols());
    double atom_distance = 0.0;
    for (Index i = 0; i < plan.rows(); ++i) {
      const double row_mass = plan.row(i).sum();
      if (row_mass <= 0.0) continue;
      conditional.row(i) = plan.row(i) / row_mass;
      double acc = 0.0;
      for (Index j = 0; j < plan.cols(); ++j) {
        acc += conditional(i, j);
        ladder(i, j) = acc;
      }
      atom_distance += atom.measure.weight(i) * conditional.row(i).dot(cost.row(i));
    }
    out.achieved_distance_sq += atom.probability * atom_distance;
    out.disintegrations.push_back({std::move(sol.coupling), std::move(conditional), std::move(ladder)});
  }
  out.lower_bound = lower_bound(family, nu0);
  out.mean_x = mean(mixture(family));
  out.mean_y = mean(nu0);
  return out;
}

IndependentApproximation build(const ConditionalFamily& family, const Options& options) {
  const auto bary = solve_barycenter(family, options);
  IndependentApproximation out = assemble(family, bary.nu0);
  out.barycenter_method = bary.method;
  out.barycenter_iterations = bary.iterations;
  out.barycenter_converged = bary.converged;
  out.warnings = bary.warnings;
  return out;
}

IndependentApproximation build(const Dataset& data, const Options& options) {
  return build(estimate_conditionals(data), options);
}

Index sample_index(const IndependentApproximation& approx, Index atom, Index source, double u) {
  if (atom < 0 || atom >= approx.family.size()) throw Error(ErrorCode::UnknownGroup, "atom index out of range");
  const auto& d = approx.disintegrations[static_cast<std::size_t>(atom)];
  if (source < 0 || source >= d.conditional.rows())
    throw Error(ErrorCode::IndexOutOfRange, "source index " + std::to_string(source) + " out of range");
  if (!(u >= 0.0 && u <= 1.0)) throw Error(ErrorCode::UOutOfRange, "u outside [0,1]");
  Index last = -1;
  for (Index j = 0; j < d.conditional.cols(); ++j) {
    if (d.conditional(source, j) <= 0.0) continue;
    last = j;
    if (d.ladder(source, j) >= u) return j;
  }
  if (last < 0) throw Error(ErrorCode::IndexOutOfRange, "source point carries no mass");
  return last;  // u beyond a ladder top that rounded below 1
}

Vector sample_y(const IndependentApproximation& approx, const std::string& group, Index source, double u) {
  const auto atom = approx.family.find(group);
  if (!atom) throw Error(ErrorCode::UnknownGroup, "unknown group '" + group + "'");
  return approx.nu0.point(sample_index(approx, *atom, source, u));
}

SampledOutput transform(const IndependentApproximation& approx, const Dataset& data,
                        std::optional<std::uint64_t> seed) {
  if (!data.has_u() && !seed) throw Error(ErrorCode::MissingU, "dataset has no u column and no seed was given");
  std::optional<Rng> rng;
  if (!data.has_u()) rng.emplace(*seed);

  std::vector<Index> next_source(static_cast<std::size_t>(approx.family.size()), 0);
  SampledOutput out;
  out.rows.reserve(static_cast<std::size_t>(data.size()));
  for (const Row& row : data.rows()) {
    const auto atom = approx.family.find(row.group);
    if (!atom) throw Error(ErrorCode::UnknownGroup, "unknown group '" + row.group + "'");
    const auto& mu = approx.family.atom(*atom).measure;
    const Index source = next_source[static_cast<std::size_t>(*atom)]++;
    if (source >= mu.size() || row.x.size() != mu.dim() || mu.points().row(source) != row.x.transpose())
      throw Error(ErrorCode::UnseenValue, "row of group '" + row.group + "' does not match the fitted support");
    const double u = data.has_u() ? *row.u : rng->uniform();
    const Index target = sample_index(approx, *atom, source, u);
    out.rows.push_back({row.group, row.x, row.weight, u, approx.nu0.point(target), *atom, source, target});
  }
  return out;
}

SampledOutput transform_grid(const IndependentApproximation& approx, Index resolution) {
  if (resolution < 1) throw Error(ErrorCode::InvalidArgument, "resolution must be >= 1");
  SampledOutput out;
  for (Index a = 0; a < approx.family.size(); ++a) {
    const auto& atom = approx.family.atom(a);
    for (Index i = 0; i < atom.measure.size(); ++i) {
      const double w = atom.probability * atom.measure.weight(i) / static_cast<double>(resolution);
      for (Index k = 0; k < resolution; ++k) {
        const double u = (static_cast<double>(k) + 0.5) / static_cast<double>(resolution);
        const Index target = sample_index(approx, a, i, u);
        out.rows.push_back({atom.label, atom.measure.point(i), w, u, approx.nu0.point(target), a, i, target});
      }
    }
  }
  return out;
}

IndependentApproximation decompose_solve(const Dataset& data, const Options& options) {
  const ConditionalFamily family = estimate_conditionals(data);
  std::unordered_map<std::string, Vector> group_mean;
  for (const auto& a : family.atoms()) group_mean.emplace(a.label, mean(a.measure));

  std::vector<Row> rows = data.rows();
  for (auto& r : rows) r.x -= group_mean.at(r.group);
  const Dataset centered(std::move(rows));
  const IndependentApproximation inner = build(centered, options);

  const Vector overall = family_mean(family);
  IndependentApproximation out = assemble(family, translate(inner.nu0, overall));
  out.barycenter_method = inner.barycenter_method;
  out.barycenter_iterations = inner.barycenter_iterations;
  out.barycenter_converged = inner.barycenter_converged;
  out.warnings = inner.warnings;
  Decomposition parts;
  parts.centered_distance_sq = inner.achieved_distance_sq;
  for (const auto& a : family.atoms()) parts.between_groups_sq += a.probability * (mean(a.measure) - overall).squaredNorm();
  out.decomposition = parts;
  return out;
}

}  // namespace indep::approx
