#include "indep/diagnostics.hpp"

#include "indep/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace indep::diagnostics {
namespace {

void require_same_family(const ConditionalFamily& fitted, const ConditionalFamily& fresh) {
  auto mismatch = [](const std::string& why) { throw Error(ErrorCode::DatasetMismatch, why); };
  if (fitted.size() != fresh.size()) mismatch("group count differs");
  if (fitted.dim() != fresh.dim()) mismatch("dimension differs");
  for (Index a = 0; a < fitted.size(); ++a) {
    const auto& x = fitted.atom(a);
    const auto& y = fresh.atom(a);
    if (x.label != y.label) mismatch("group order differs at '" + y.label + "'");
    if (std::abs(x.probability - y.probability) > 1e-12) mismatch("probability of '" + x.label + "' differs");
    if (x.measure.size() != y.measure.size() || x.measure.points() != y.measure.points())
      mismatch("support of '" + x.label + "' differs");
    if ((x.measure.weights() - y.measure.weights()).cwiseAbs().maxCoeff() > 1e-12)
      mismatch("weights of '" + x.label + "' differ");
  }
}

Check make_check(std::string name, double value, double tolerance) {
  return {std::move(name), std::abs(value) <= tolerance, value, tolerance};
}

}  // namespace

bool Report::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

Report verify(const approx::IndependentApproximation& approx, const Dataset& data) {
  const ConditionalFamily& family = approx.family;
  require_same_family(family, approx::estimate_conditionals(data));

  Report r;
  r.objective = approx.achieved_distance_sq;
  const auto w2 = barycenter::per_atom_w2(family, approx.nu0);
  r.lower_bound = 0.0;
  for (Index a = 0; a < family.size(); ++a) {
    r.lower_bound += family.atom(a).probability * w2[static_cast<std::size_t>(a)];
    r.per_atom_w2.emplace_back(family.atom(a).label, w2[static_cast<std::size_t>(a)]);
  }
  r.gap = r.objective - r.lower_bound;

  Vector x_mean = Vector::Zero(data.dim());
  for (const Row& row : data.rows()) x_mean += row.weight * row.x;
  r.mean_x = x_mean;
  r.mean_y = approx.mean_y;

  double max_tv = 0.0, max_marginal = 0.0, max_row_norm = 0.0;
  for (Index a = 0; a < family.size(); ++a) {
    const auto& mu = family.atom(a).measure;
    const auto& d = approx.disintegrations[static_cast<std::size_t>(a)];
    const Vector law = d.conditional.transpose() * mu.weights();
    const double tv = total_variation(law, approx.nu0.weights());
    r.independence_tv.emplace_back(family.atom(a).label, tv);
    max_tv = std::max(max_tv, tv);
    max_marginal = std::max(max_marginal, d.coupling.marginal_violation());
    for (Index i = 0; i < mu.size(); ++i)
      if (mu.weight(i) > 0.0) max_row_norm = std::max(max_row_norm, std::abs(d.conditional.row(i).sum() - 1.0));
  }

  const double law_y_mean_error = (approx.mean_y - r.mean_x).cwiseAbs().maxCoeff();
  r.checks.push_back(make_check("bound_attainment", r.gap, 1e-8 * std::max(1.0, r.objective)));
  r.checks.push_back(make_check("mean_matching", law_y_mean_error, 1e-8));
  r.checks.push_back(make_check("independence", max_tv, 1e-8));
  r.checks.push_back(make_check("coupling_marginals", max_marginal, 1e-8));
  r.checks.push_back(make_check("disintegration_normalized", max_row_norm, 1e-10));
  return r;
}

double empirical_distance(const approx::SampledOutput& output) {
  if (output.rows.empty()) throw Error(ErrorCode::EmptyDataset, "no sampled rows");
  double total = 0.0, mass = 0.0;
  for (const auto& row : output.rows) {
    total += row.weight * (row.x - row.y).squaredNorm();
    mass += row.weight;
  }
  return total / mass;
}

PerAtom independence_tv(const approx::SampledOutput& output, const DiscreteMeasure& nu0) {
  std::map<std::vector<double>, Index> lookup;
  for (Index j = 0; j < nu0.size(); ++j) {
    const Vector p = nu0.point(j);
    lookup.emplace(std::vector<double>(p.data(), p.data() + p.size()), j);
  }

  std::vector<std::string> order;
  std::map<std::string, Vector> laws;
  for (const auto& row : output.rows) {
    auto it = lookup.find(std::vector<double>(row.y.data(), row.y.data() + row.y.size()));
    if (it == lookup.end()) throw Error(ErrorCode::UnknownSupportPoint, "sampled y is not a support point of nu0");
    auto [slot, inserted] = laws.try_emplace(row.group, Vector::Zero(nu0.size()));
    if (inserted) order.push_back(row.group);
    slot->second(it->second) += row.weight;
  }

  PerAtom out;
  for (const auto& g : order) {
    const Vector& law = laws.at(g);
    out.emplace_back(g, total_variation(law / law.sum(), nu0.weights()));
  }
  return out;
}

}  // namespace indep::diagnostics
