#pragma once

#include "indep/barycenter.hpp"
#include "indep/measure.hpp"
#include "indep/ot.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace indep::approx {

enum class BarycenterChoice {
  /// Quantile1d when m = 1, Exact otherwise.
  Auto,
  /// Fixed-support LP on the centered union support, refined by projection.
  Exact,
  /// Bregman projections on the centered union support, refined by projection.
  Entropic,
  /// Free-support iterations from a seeded start.
  Free,
  /// Exact quantile averaging (m = 1 only).
  Quantile1d,
};

struct Options {
  BarycenterChoice method = BarycenterChoice::Auto;
  barycenter::EntropicOptions entropic;
  /// k = 0 uses the size of the coalesced union support.
  barycenter::FreeSupportOptions free{0, 0, 200, 1e-12};
  int refine_max_iter = 200;
  double refine_tol = 1e-12;
};

/// Row-normalized optimal coupling of one atom to nu0.
struct Disintegration {
  ot::Coupling coupling;
  /// Row i is alpha_i, the conditional law of the target given source i.
  Matrix conditional;
  /// Row-wise cumulative sums of `conditional` in nu0 support order.
  Matrix ladder;
};

struct Decomposition {
  /// Optimal distance for X - E[X | A].
  double centered_distance_sq = 0.0;
  /// || E[X | A] - E[X] ||^2.
  double between_groups_sq = 0.0;
};

struct IndependentApproximation {
  ConditionalFamily family;
  /// Support ordered lexicographically, no zero weights.
  DiscreteMeasure nu0;
  std::vector<Disintegration> disintegrations;
  double achieved_distance_sq = 0.0;
  double lower_bound = 0.0;
  Vector mean_x;
  Vector mean_y;
  barycenter::Method barycenter_method = barycenter::Method::Refined;
  long barycenter_iterations = 0;
  bool barycenter_converged = true;
  std::vector<std::string> warnings;
  std::optional<Decomposition> decomposition;
};

struct SampledRow {
  std::string group;
  Vector x;
  double weight = 0.0;
  double u = 0.0;
  Vector y;
  Index atom = 0;
  Index source = 0;
  /// Index of y in nu0's support.
  Index target = 0;
};

struct SampledOutput {
  std::vector<SampledRow> rows;
};

/// Group-by estimate of the conditional laws. Support order within an atom is
/// the order of the group's rows in the dataset.
ConditionalFamily estimate_conditionals(const Dataset& data);

/// Sum_a p_a W^2(mu_a, nu): the smallest ||X - Y||^2 over Y independent of
/// the grouping with law nu.
double lower_bound(const ConditionalFamily& family, const DiscreteMeasure& nu);

IndependentApproximation build(const Dataset& data, const Options& options = {});
IndependentApproximation build(const ConditionalFamily& family, const Options& options = {});

/// Couplings, disintegrations and distances for a given nu0.
IndependentApproximation assemble(const ConditionalFamily& family, const DiscreteMeasure& nu0);

/// Index into nu0 of the inverse-CDF draw from alpha_i at u.
Index sample_index(const IndependentApproximation& approx, Index atom, Index source, double u);
Vector sample_y(const IndependentApproximation& approx, const std::string& group, Index source, double u);

/// Realizes Y row by row. u comes from the dataset, else from `seed`.
SampledOutput transform(const IndependentApproximation& approx, const Dataset& data,
                        std::optional<std::uint64_t> seed = std::nullopt);

/// Deterministic transform on the u-grid (i - 1/2)/R for every source point,
/// with row weight p_a mu_a(i) / R.
SampledOutput transform_grid(const IndependentApproximation& approx, Index resolution);

/// Solves for X - E[X | A] and translates the result by E[X].
IndependentApproximation decompose_solve(const Dataset& data, const Options& options = {});

}  // namespace indep::approx
