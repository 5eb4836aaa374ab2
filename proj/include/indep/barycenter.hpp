#pragma once

#include "indep/measure.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace indep::barycenter {

enum class Method { FixedSupportLp, Entropic, FreeSupport, Quantile1d, Quantile1dExact, Refined };

std::string_view to_string(Method method);

struct BarycenterResult {
  DiscreteMeasure nu0;
  /// Sum_a p_a W^2(mu_a, nu0), evaluated with the exact transport solver.
  double objective = 0.0;
  /// One entry per atom of the input family, in family order.
  std::vector<double> per_atom_w2;
  Method method = Method::FixedSupportLp;
  long iterations = 0;
  bool converged = true;
  /// Objective after each iteration (iterative methods only).
  std::vector<double> history;
  std::vector<std::string> warnings;
};

/// Sum_a p_a W^2(mu_a, nu) with exact optimal transport (the sorted coupling
/// when m = 1, the transport simplex otherwise).
double objective(const ConditionalFamily& family, const DiscreteMeasure& nu);
std::vector<double> per_atom_w2(const ConditionalFamily& family, const DiscreteMeasure& nu);

/// Coalesced union of all atom supports.
Matrix union_support(const ConditionalFamily& family);

/// Globally optimal weights on a fixed support: one joint LP over the
/// per-atom plans and the shared column marginal.
BarycenterResult fixed_support(const ConditionalFamily& family, const Matrix& support);

struct EntropicOptions {
  double epsilon = 0.01;
  int max_iter = 20000;
  /// L1 change of the weights between sweeps.
  double tol = 1e-10;
};

/// Iterative Bregman projections on a fixed support (log domain).
BarycenterResult entropic(const ConditionalFamily& family, const Matrix& support, const EntropicOptions& options = {});

struct FreeSupportOptions {
  Index k = 1;
  std::uint64_t seed = 0;
  int max_iter = 200;
  double tol = 1e-12;
};

/// Starts from k seeded pool points and alternates two steps that never
/// increase the objective: optimal weights on the current points (the
/// fixed-support LP) and barycentric projection of the points. A point the
/// weights step leaves empty is respawned by splitting the heaviest point.
BarycenterResult free_support(const ConditionalFamily& family, const FreeSupportOptions& options);

/// Barycentric-projection iterations starting from `start`, keeping its weights.
/// The mean of every iterate after the first update equals family_mean().
BarycenterResult refine(const ConditionalFamily& family, const DiscreteMeasure& start, int max_iter = 200,
                        double tol = 1e-12);

/// Centers every atom, solves the fixed-support LP on the union of the
/// centered supports, recenters the result and refines it by barycentric
/// projection, then translates back by the family mean. The returned mean is
/// family_mean() and the objective is no larger than the LP's.
BarycenterResult centered_refined(const ConditionalFamily& family, int max_iter = 200, double tol = 1e-12);

/// Quantile averaging on the midpoint grid t = (i - 1/2)/R.
BarycenterResult quantile_1d(const ConditionalFamily& family, Index resolution);

/// Quantile averaging on the merged cumulative-weight breakpoints of all
/// atoms; the exact barycenter for m = 1.
BarycenterResult quantile_1d_exact(const ConditionalFamily& family);

/// Generalized inverse of the CDF of a 1-D measure at t in (0, 1].
double quantile(const DiscreteMeasure& mu, double t);

}  // namespace indep::barycenter
