#pragma once

#include "indep/approx.hpp"

#include <string>
#include <utility>
#include <vector>

namespace indep::diagnostics {

struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double tolerance = 0.0;
};

using PerAtom = std::vector<std::pair<std::string, double>>;

struct Report {
  double objective = 0.0;
  double lower_bound = 0.0;
  /// objective - lower_bound
  double gap = 0.0;
  Vector mean_x;
  Vector mean_y;
  PerAtom per_atom_w2;
  /// TV between the law of Y given each atom and nu0, at the disintegration level.
  PerAtom independence_tv;
  std::vector<Check> checks;

  bool all_passed() const;
};

/// Re-evaluates the approximation's invariants against the dataset it was
/// built from. Failing checks are reported, not thrown.
Report verify(const approx::IndependentApproximation& approx, const Dataset& data);

/// Weighted mean of |x - y|^2 over the rows.
double empirical_distance(const approx::SampledOutput& output);

/// Per group (first-appearance order): TV between the weighted empirical law
/// of y within the group and nu0.
PerAtom independence_tv(const approx::SampledOutput& output, const DiscreteMeasure& nu0);

}  // namespace indep::diagnostics
