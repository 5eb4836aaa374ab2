#pragma once

// Reference computations used only by tests. None of them call the solvers
// they are meant to check.

#include "indep/measure.hpp"
#include "indep/random.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace oracle {

using indep::Index;
using indep::Matrix;
using indep::Vector;

inline indep::DiscreteMeasure random_measure(indep::Rng& rng, Index n, Index m, double scale = 1.0,
                                             bool integer_support = false) {
  Matrix p(n, m);
  Vector w(n);
  for (Index i = 0; i < n; ++i) {
    for (Index c = 0; c < m; ++c)
      p(i, c) = integer_support ? std::floor(rng.uniform() * 6.0) : scale * (2.0 * rng.uniform() - 1.0);
    w(i) = 0.05 + rng.uniform();
  }
  return indep::make_measure(std::move(p), std::move(w));
}

inline indep::ConditionalFamily random_family(indep::Rng& rng, Index atoms, Index max_points, Index m,
                                              double scale = 1.0) {
  std::vector<indep::Atom> out;
  double total = 0.0;
  std::vector<double> probs;
  for (Index a = 0; a < atoms; ++a) {
    probs.push_back(0.1 + rng.uniform());
    total += probs.back();
  }
  for (Index a = 0; a < atoms; ++a) {
    const Index n = 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(max_points)));
    out.push_back({"g" + std::to_string(a), probs[static_cast<std::size_t>(a)] / total,
                   random_measure(rng, n, m, scale)});
  }
  return indep::ConditionalFamily(std::move(out));
}

inline indep::Dataset random_dataset(indep::Rng& rng, Index atoms, Index max_points, Index m, double scale = 1.0) {
  std::vector<indep::Row> rows;
  for (Index a = 0; a < atoms; ++a) {
    const Index n = 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(max_points)));
    for (Index i = 0; i < n; ++i) {
      Vector x(m);
      for (Index c = 0; c < m; ++c) x(c) = scale * (2.0 * rng.uniform() - 1.0);
      rows.push_back({"g" + std::to_string(a), x, 0.1 + rng.uniform(), std::nullopt});
    }
  }
  return indep::Dataset(std::move(rows));
}

inline double sq_dist(const Matrix& x, Index i, const Matrix& y, Index j) {
  return (x.row(i) - y.row(j)).squaredNorm();
}

inline double plan_cost(const Matrix& plan, const Matrix& x, const Matrix& y) {
  double c = 0.0;
  for (Index i = 0; i < plan.rows(); ++i)
    for (Index j = 0; j < plan.cols(); ++j) c += plan(i, j) * sq_dist(x, i, y, j);
  return c;
}

/// 1-D optimal cost: north-west corner on both supports sorted ascending.
inline double comonotone_cost(const indep::DiscreteMeasure& mu, const indep::DiscreteMeasure& nu) {
  auto sorted = [](const indep::DiscreteMeasure& m) {
    std::vector<std::pair<double, double>> v;
    for (Index i = 0; i < m.size(); ++i) v.emplace_back(m.points()(i, 0), m.weight(i));
    std::stable_sort(v.begin(), v.end(), [](auto& a, auto& b) { return a.first < b.first; });
    return v;
  };
  const auto a = sorted(mu), b = sorted(nu);
  std::size_t i = 0, j = 0;
  double ra = a[0].second, rb = b[0].second, cost = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(ra, rb);
    cost += x * (a[i].first - b[j].first) * (a[i].first - b[j].first);
    ra -= x;
    rb -= x;
    if (ra <= rb) {
      if (++i < a.size()) ra = a[i].second;
    } else {
      if (++j < b.size()) rb = b[j].second;
    }
  }
  return cost;
}

/// 1-D W2 by integrating |F^-1 - G^-1|^2 over the merged breakpoints.
inline double quantile_w2(const std::vector<std::pair<double, double>>& a_in,
                          const std::vector<std::pair<double, double>>& b_in) {
  auto a = a_in, b = b_in;
  auto by_value = [](auto& p, auto& q) { return p.first < q.first; };
  std::stable_sort(a.begin(), a.end(), by_value);
  std::stable_sort(b.begin(), b.end(), by_value);
  auto inv = [](const std::vector<std::pair<double, double>>& v, double t) {
    double acc = 0.0;
    for (const auto& [x, w] : v) {
      acc += w;
      if (acc >= t - 1e-15) return x;
    }
    return v.back().first;
  };
  std::vector<double> cuts{0.0, 1.0};
  double acc = 0.0;
  for (const auto& p : a) cuts.push_back(acc += p.second);
  acc = 0.0;
  for (const auto& p : b) cuts.push_back(acc += p.second);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double lo = cuts[k], hi = std::min(1.0, cuts[k + 1]);
    if (hi <= lo) continue;
    const double mid = 0.5 * (lo + hi);
    const double d = inv(a, mid) - inv(b, mid);
    total += (hi - lo) * d * d;
  }
  return total;
}

/// Random element of the transport polytope: a random positive matrix scaled
/// to the marginals by alternating row/column normalization.
inline Matrix random_feasible_plan(indep::Rng& rng, const Vector& a, const Vector& b) {
  Matrix p(a.size(), b.size());
  for (Index i = 0; i < p.rows(); ++i)
    for (Index j = 0; j < p.cols(); ++j) {
      const double r = rng.uniform();
      p(i, j) = r * r * r + 1e-9;  // skewed so that near-vertex plans also appear
    }
  for (int it = 0; it < 5000; ++it) {
    for (Index i = 0; i < p.rows(); ++i) p.row(i) *= a(i) / p.row(i).sum();
    for (Index j = 0; j < p.cols(); ++j) p.col(j) *= b(j) / p.col(j).sum();
    const double err = (p.rowwise().sum() - a).cwiseAbs().maxCoeff();
    if (err < 1e-13) break;
  }
  return p;
}

/// Every weight vector on n points with entries in multiples of 1/steps.
inline void for_each_simplex_point(Index n, int steps, const std::function<void(const Vector&)>& visit) {
  Vector w = Vector::Zero(n);
  std::function<void(Index, int)> rec = [&](Index k, int left) {
    if (k == n - 1) {
      w(k) = static_cast<double>(left) / steps;
      visit(w);
      return;
    }
    for (int s = 0; s <= left; ++s) {
      w(k) = static_cast<double>(s) / steps;
      rec(k + 1, left - s);
    }
  };
  rec(0, steps);
}

/// Random probability vector on n points (uniform spacings).
inline Vector random_simplex(indep::Rng& rng, Index n) {
  Vector e(n);
  for (Index i = 0; i < n; ++i) e(i) = -std::log(1.0 - rng.uniform());
  return e / e.sum();
}

/// Mean-squared distance from each source point to a single point c.
inline double dirac_w2(const indep::DiscreteMeasure& mu, const Vector& c) {
  double s = 0.0;
  for (Index i = 0; i < mu.size(); ++i) s += mu.weight(i) * (mu.point(i) - c).squaredNorm();
  return s;
}

/// Total variation between two weight vectors.
inline double tv(const Vector& p, const Vector& q) { return 0.5 * (p - q).cwiseAbs().sum(); }

}  // namespace oracle
