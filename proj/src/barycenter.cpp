#include "indep/barycenter.hpp"

#include "indep/error.hpp"
#include "indep/lp.hpp"
#include "indep/ot.hpp"
#include "indep/random.hpp"

#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace indep::barycenter {
namespace {

constexpr double kDegenerateAtom = 1e-12;
constexpr double kEmptyPoint = 1e-14;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Atoms that carry mass; the rest are skipped by the solvers.
std::vector<Index> active_atoms(const ConditionalFamily& family, std::vector<std::string>& warnings) {
  std::vector<Index> out;
  for (Index a = 0; a < family.size(); ++a) {
    if (family.atom(a).probability < kDegenerateAtom) {
      warnings.push_back("atom '" + family.atom(a).label + "' has negligible probability and was dropped");
    } else {
      out.push_back(a);
    }
  }
  return out;
}

void check_support(const ConditionalFamily& family, const Matrix& support) {
  if (support.rows() == 0) throw Error(ErrorCode::EmptySupport, "barycenter support is empty");
  if (support.cols() != family.dim())
    throw Error(ErrorCode::SupportDimensionMismatch, "support dimension differs from the family");
}

void fill_objective(const ConditionalFamily& family, BarycenterResult& result) {
  result.per_atom_w2 = per_atom_w2(family, result.nu0);
  result.objective = 0.0;
  for (Index a = 0; a < family.size(); ++a)
    result.objective += family.atom(a).probability * result.per_atom_w2[static_cast<std::size_t>(a)];
}

double log_sum_exp(const double* v, Index n) {
  double c = kNegInf;
  for (Index i = 0; i < n; ++i) c = std::max(c, v[i]);
  if (c == kNegInf) return kNegInf;
  double s = 0.0;
  for (Index i = 0; i < n; ++i) s += std::exp(v[i] - c);
  return c + std::log(s);
}

ConditionalFamily centered(const ConditionalFamily& family) {
  std::vector<Atom> atoms;
  for (const auto& a : family.atoms())
    atoms.push_back({a.label, a.probability, translate(a.measure, -mean(a.measure))});
  return ConditionalFamily(std::move(atoms));
}

DiscreteMeasure drop_empty(const DiscreteMeasure& mu) {
  std::vector<Index> keep;
  for (Index j = 0; j < mu.size(); ++j)
    if (mu.weight(j) > 1e-15) keep.push_back(j);
  Matrix p(static_cast<Index>(keep.size()), mu.dim());
  Vector w(static_cast<Index>(keep.size()));
  for (std::size_t t = 0; t < keep.size(); ++t) {
    p.row(static_cast<Index>(t)) = mu.points().row(keep[t]);
    w(static_cast<Index>(t)) = mu.weight(keep[t]);
  }
  return make_measure(std::move(p), std::move(w));
}

// Splits every point of nu along the per-atom optimal plans. Inside one
// point's cell the sources of each atom are queued in lexicographic order and
// matched north-west-corner style; each matched piece moves to the
// probability-weighted combination of its sources. Any such matching keeps
// the objective from increasing, and in 1-D it yields the quantile average.
DiscreteMeasure glue(const ConditionalFamily& family, const std::vector<Index>& atoms, const DiscreteMeasure& nu) {
  struct Queue {
    std::vector<Index> sources;
    std::size_t at = 0;
    double left = 0.0;
  };
  std::vector<Matrix> plans;
  double total_p = 0.0;
  for (Index a : atoms) {
    plans.push_back(ot::solve_exact(family.atom(a).measure, nu).coupling.plan());
    total_p += family.atom(a).probability;
  }
  std::vector<Vector> points;
  std::vector<double> masses;
  for (Index j = 0; j < nu.size(); ++j) {
    std::vector<Queue> queues(atoms.size());
    bool used = true;
    for (std::size_t t = 0; t < atoms.size() && used; ++t) {
      for (Index i : lex_order(family.atom(atoms[t]).measure.points()))
        if (plans[t](i, j) > kEmptyPoint) queues[t].sources.push_back(i);
      used = !queues[t].sources.empty();
      if (used) queues[t].left = plans[t](queues[t].sources.front(), j);
    }
    if (!used) continue;
    for (;;) {
      double piece = std::numeric_limits<double>::infinity();
      for (const auto& q : queues) piece = std::min(piece, q.left);
      Vector y = Vector::Zero(nu.dim());
      for (std::size_t t = 0; t < atoms.size(); ++t)
        y += family.atom(atoms[t]).probability / total_p *
             family.atom(atoms[t]).measure.point(queues[t].sources[queues[t].at]);
      if (piece > kEmptyPoint) {
        points.push_back(std::move(y));
        masses.push_back(piece);
      }
      bool done = false;
      for (std::size_t t = 0; t < atoms.size(); ++t) {
        auto& q = queues[t];
        q.left -= piece;
        if (q.left > kEmptyPoint) continue;
        if (++q.at == q.sources.size()) {
          done = true;
        } else {
          q.left = plans[t](q.sources[q.at], j);
        }
      }
      if (done) break;
    }
  }
  return coalesce(make_measure(points, masses));
}

}  // namespace

std::string_view to_string(Method method) {
  switch (method) {
    case Method::FixedSupportLp: return "fixed_support_lp";
    case Method::Entropic: return "entropic";
    case Method::FreeSupport: return "free_support";
    case Method::Quantile1d: return "quantile_1d";
    case Method::Quantile1dExact: return "quantile_1d_exact";
    case Method::Refined: return "centered_refined";
  }
  return "unknown";
}

std::vector<double> per_atom_w2(const ConditionalFamily& family, const DiscreteMeasure& nu) {
  if (nu.dim() != family.dim()) throw Error(ErrorCode::DimensionMismatch, "candidate dimension differs from family");
  std::vector<double> out;
  out.reserve(family.atoms().size());
  // On the line the sorted coupling is optimal and far cheaper than the simplex.
  for (const auto& a : family.atoms())
    out.push_back(nu.dim() == 1 ? ot::solve_comonotone_1d(a.measure, nu).cost : ot::solve_exact(a.measure, nu).cost);
  return out;
}

double objective(const ConditionalFamily& family, const DiscreteMeasure& nu) {
  const auto w2 = per_atom_w2(family, nu);
  double total = 0.0;
  for (Index a = 0; a < family.size(); ++a) total += family.atom(a).probability * w2[static_cast<std::size_t>(a)];
  return total;
}

Matrix union_support(const ConditionalFamily& family) {
  return coalesce(mixture(family)).points();
}

BarycenterResult fixed_support(const ConditionalFamily& family, const Matrix& support) {
  check_support(family, support);
  BarycenterResult result{DiscreteMeasure(support.topRows(1), Vector::Ones(1))};
  result.method = Method::FixedSupportLp;
  const auto atoms = active_atoms(family, result.warnings);
  const Index s = support.rows();

  // Variables: gamma^a (row-major per atom), then w. Rows: per-atom row sums,
  // per-atom column sums minus w, then sum(w) = 1.
  Index nvar = 0, nrow = 0;
  std::vector<Index> var_offset, row_offset;
  for (Index a : atoms) {
    const Index n = family.atom(a).measure.size();
    var_offset.push_back(nvar);
    row_offset.push_back(nrow);
    nvar += n * s;
    nrow += n + s;
  }
  const Index w_offset = nvar;
  nvar += s;
  const Index total_row = nrow++;

  std::vector<Eigen::Triplet<double>> triplets;
  Vector b = Vector::Zero(nrow);
  Vector c = Vector::Zero(nvar);
  for (std::size_t t = 0; t < atoms.size(); ++t) {
    const auto& atom = family.atom(atoms[t]);
    const Index n = atom.measure.size();
    const Matrix cost = ot::cost_matrix(atom.measure.points(), support);
    for (Index i = 0; i < n; ++i) {
      b(row_offset[t] + i) = atom.measure.weight(i);
      for (Index j = 0; j < s; ++j) {
        const Index v = var_offset[t] + i * s + j;
        triplets.emplace_back(row_offset[t] + i, v, 1.0);
        triplets.emplace_back(row_offset[t] + n + j, v, 1.0);
        c(v) = atom.probability * cost(i, j);
      }
    }
    for (Index j = 0; j < s; ++j) triplets.emplace_back(row_offset[t] + n + j, w_offset + j, -1.0);
  }
  for (Index j = 0; j < s; ++j) triplets.emplace_back(total_row, w_offset + j, 1.0);
  b(total_row) = 1.0;

  lp::Problem problem{Eigen::SparseMatrix<double>(nrow, nvar), std::move(b), std::move(c)};
  problem.A.setFromTriplets(triplets.begin(), triplets.end());
  const lp::Result lp_result = lp::solve(problem);
  if (lp_result.status != lp::Status::Optimal)
    throw Error(ErrorCode::LpInfeasible, "fixed-support barycenter LP has no optimal solution");

  Vector w = lp_result.x.segment(w_offset, s).cwiseMax(0.0);
  result.nu0 = make_measure(support, std::move(w));
  result.iterations = lp_result.iterations;
  result.converged = true;
  fill_objective(family, result);
  return result;
}

BarycenterResult entropic(const ConditionalFamily& family, const Matrix& support, const EntropicOptions& options) {
  check_support(family, support);
  if (!(options.epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  BarycenterResult result{DiscreteMeasure(support.topRows(1), Vector::Ones(1))};
  result.method = Method::Entropic;
  const auto atoms = active_atoms(family, result.warnings);
  const Index s = support.rows();
  const double eps = options.epsilon;

  double p_total = 0.0;
  for (Index a : atoms) p_total += family.atom(a).probability;

  struct State {
    Matrix neg_cost;  // -C / eps, n x s
    Vector log_mu;
    Vector log_u;
    Vector log_v;
    Vector log_ktu;
    double p;
  };
  std::vector<State> state;
  for (Index a : atoms) {
    const auto& atom = family.atom(a);
    State st;
    st.neg_cost = -ot::cost_matrix(atom.measure.points(), support) / eps;
    st.log_mu = atom.measure.weights().unaryExpr([](double x) { return x > 0.0 ? std::log(x) : kNegInf; });
    st.log_u = Vector::Zero(atom.measure.size());
    st.log_v = Vector::Zero(s);
    st.log_ktu = Vector::Zero(s);
    st.p = atom.probability / p_total;
    state.push_back(std::move(st));
  }

  Vector weights = Vector::Constant(s, 1.0 / static_cast<double>(s));
  std::vector<double> scratch(static_cast<std::size_t>(std::max<Index>(s, 1)));
  result.converged = false;
  for (int it = 0; it < options.max_iter; ++it) {
    result.iterations = it + 1;
    Vector log_w = Vector::Zero(s);
    for (auto& st : state) {
      const Index n = st.neg_cost.rows();
      scratch.resize(static_cast<std::size_t>(std::max(n, s)));
      for (Index i = 0; i < n; ++i) {
        if (st.log_mu(i) == kNegInf) {
          st.log_u(i) = kNegInf;
          continue;
        }
        for (Index j = 0; j < s; ++j) scratch[static_cast<std::size_t>(j)] = st.neg_cost(i, j) + st.log_v(j);
        st.log_u(i) = st.log_mu(i) - log_sum_exp(scratch.data(), s);
      }
      for (Index j = 0; j < s; ++j) {
        for (Index i = 0; i < n; ++i) scratch[static_cast<std::size_t>(i)] = st.log_u(i) + st.neg_cost(i, j);
        st.log_ktu(j) = log_sum_exp(scratch.data(), n);
      }
      log_w += st.p * st.log_ktu;
    }
    for (auto& st : state) st.log_v = log_w - st.log_ktu;
    if (!log_w.allFinite()) throw Error(ErrorCode::NumericalUnderflow, "Bregman projections underflowed");

    Vector next = (log_w.array() - log_w.maxCoeff()).exp().matrix();
    next /= next.sum();
    const double change = (next - weights).lpNorm<1>();
    weights = std::move(next);
    if (change < options.tol) {
      result.converged = true;
      break;
    }
  }
  result.nu0 = make_measure(support, weights);
  fill_objective(family, result);
  return result;
}

BarycenterResult refine(const ConditionalFamily& family, const DiscreteMeasure& start, int max_iter, double tol) {
  if (start.dim() != family.dim())
    throw Error(ErrorCode::SupportDimensionMismatch, "start measure dimension differs from the family");
  BarycenterResult result{start};
  result.method = Method::Refined;
  result.converged = false;
  const auto atoms = active_atoms(family, result.warnings);

  const DiscreteMeasure pool = mixture(family);
  Index heaviest = 0;
  pool.weights().maxCoeff(&heaviest);

  DiscreteMeasure nu = start;
  double previous = std::numeric_limits<double>::infinity();
  for (int it = 0;; ++it) {
    Matrix numerator = Matrix::Zero(nu.size(), nu.dim());
    std::vector<double> w2;
    double value = 0.0;
    for (Index a = 0; a < family.size(); ++a) {
      const auto& atom = family.atom(a);
      const ot::OtSolution sol = ot::solve_exact(atom.measure, nu);
      w2.push_back(sol.cost);
      value += atom.probability * sol.cost;
      if (std::find(atoms.begin(), atoms.end(), a) != atoms.end())
        numerator.noalias() += atom.probability * sol.coupling.plan().transpose() * atom.measure.points();
    }
    result.history.push_back(value);
    result.per_atom_w2 = std::move(w2);
    result.objective = value;
    result.nu0 = nu;
    if (it > 0 && previous - value <= tol * std::max(1.0, std::abs(value))) {
      result.converged = true;
      break;
    }
    if (it >= max_iter) break;
    result.iterations = it + 1;

    // y_j = (sum_a p_a sum_i gamma^a_ij x_i) / w_j
    Matrix points(nu.size(), nu.dim());
    for (Index j = 0; j < nu.size(); ++j) {
      if (nu.weight(j) <= 1e-300) {
        result.warnings.push_back("support point " + std::to_string(j) + " received no mass; respawned");
        points.row(j) = pool.points().row(heaviest);
      } else {
        points.row(j) = numerator.row(j) / nu.weight(j);
      }
    }
    nu = DiscreteMeasure(std::move(points), nu.weights());
    previous = value;
  }
  return result;
}

BarycenterResult free_support(const ConditionalFamily& family, const FreeSupportOptions& options) {
  const DiscreteMeasure pool = mixture(family);
  if (options.k < 1) throw Error(ErrorCode::InvalidArgument, "free-support barycenter needs k >= 1");
  if (options.k > pool.size())
    throw Error(ErrorCode::InvalidArgument, "k exceeds the total number of support points");

  // Draw k distinct pool points with probability proportional to weight.
  Rng rng(options.seed);
  std::vector<double> mass(pool.weights().data(), pool.weights().data() + pool.size());
  std::vector<Index> chosen;
  for (Index t = 0; t < options.k; ++t) {
    double total = 0.0;
    for (double m : mass) total += m;
    const double target = rng.uniform() * total;
    double acc = 0.0;
    Index pick = -1;
    for (std::size_t i = 0; i < mass.size(); ++i) {
      if (mass[i] <= 0.0) continue;
      acc += mass[i];
      pick = static_cast<Index>(i);
      if (acc > target) break;
    }
    if (pick < 0) {  // remaining pool has zero mass; take the first unused point
      for (std::size_t i = 0; i < mass.size(); ++i)
        if (std::find(chosen.begin(), chosen.end(), static_cast<Index>(i)) == chosen.end()) {
          pick = static_cast<Index>(i);
          break;
        }
    }
    chosen.push_back(pick);
    mass[static_cast<std::size_t>(pick)] = 0.0;
  }
  Matrix points(options.k, pool.dim());
  for (Index t = 0; t < options.k; ++t) points.row(t) = pool.points().row(chosen[static_cast<std::size_t>(t)]);
  DiscreteMeasure nu(std::move(points), Vector::Constant(options.k, 1.0 / static_cast<double>(options.k)));

  BarycenterResult result{nu};
  result.method = Method::FreeSupport;
  result.converged = false;
  const auto atoms = active_atoms(family, result.warnings);
  fill_objective(family, result);
  result.history.push_back(result.objective);
  for (int it = 0; it < options.max_iter; ++it) {
    // Optimal weights for the current points, then one projection of the points.
    const DiscreteMeasure lp = fixed_support(family, nu.points()).nu0;
    // An empty point takes half of the heaviest point's mass at the same
    // location. The measure is unchanged; the projection then separates them.
    Matrix split = lp.points();
    Vector mass = lp.weights();
    for (Index j = 0; j < mass.size(); ++j) {
      if (mass(j) > kEmptyPoint) continue;
      Index heaviest = 0;
      mass.maxCoeff(&heaviest);
      split.row(j) = split.row(heaviest);
      mass(j) = mass(heaviest) = 0.5 * mass(heaviest);
    }
    const DiscreteMeasure weighted(std::move(split), std::move(mass));
    Matrix numerator = Matrix::Zero(weighted.size(), weighted.dim());
    for (Index a : atoms) {
      const auto& atom = family.atom(a);
      const ot::OtSolution sol = ot::solve_exact(atom.measure, weighted);
      numerator.noalias() += atom.probability * sol.coupling.plan().transpose() * atom.measure.points();
    }
    Matrix moved = weighted.points();
    for (Index j = 0; j < weighted.size(); ++j)
      moved.row(j) = numerator.row(j) / weighted.weight(j);
    nu = DiscreteMeasure(std::move(moved), weighted.weights());

    const double previous = result.objective;
    result.nu0 = nu;
    result.iterations = it + 1;
    fill_objective(family, result);
    result.history.push_back(result.objective);
    if (previous - result.objective > options.tol * std::max(1.0, std::abs(result.objective))) continue;

    // Stalled: try splitting the cells along the plans.
    BarycenterResult candidate{glue(family, atoms, nu)};
    fill_objective(family, candidate);
    if (candidate.nu0.size() > options.k ||
        result.objective - candidate.objective <= options.tol * std::max(1.0, std::abs(candidate.objective))) {
      result.converged = true;
      break;
    }
    nu = candidate.nu0;
    result.nu0 = nu;
    result.objective = candidate.objective;
    result.per_atom_w2 = std::move(candidate.per_atom_w2);
    result.history.push_back(result.objective);
  }
  return result;
}

BarycenterResult centered_refined(const ConditionalFamily& family, int max_iter, double tol) {
  const Vector center = family_mean(family);
  const ConditionalFamily zero_mean = centered(family);
  const BarycenterResult lp = fixed_support(zero_mean, union_support(zero_mean));
  DiscreteMeasure start = drop_empty(lp.nu0);
  start = translate(start, -mean(start));
  BarycenterResult result = refine(zero_mean, start, max_iter, tol);
  result.nu0 = translate(result.nu0, center);
  result.method = Method::Refined;
  result.iterations += lp.iterations;
  result.warnings.insert(result.warnings.begin(), lp.warnings.begin(), lp.warnings.end());
  fill_objective(family, result);
  return result;
}

// ---------------------------------------------------------------------------

namespace {

struct SortedAtom {
  std::vector<double> values;
  std::vector<double> cumulative;
};

SortedAtom sorted_atom(const DiscreteMeasure& mu) {
  if (mu.dim() != 1) throw Error(ErrorCode::DimensionNotOne, "quantile functions require m = 1");
  SortedAtom out;
  double acc = 0.0;
  for (Index i : lex_order(mu.points())) {
    acc += mu.weight(i);
    out.values.push_back(mu.points()(i, 0));
    out.cumulative.push_back(acc);
  }
  out.cumulative.back() = 1.0;
  return out;
}

double sorted_quantile(const SortedAtom& s, double t) {
  auto it = std::lower_bound(s.cumulative.begin(), s.cumulative.end(), t);
  if (it == s.cumulative.end()) --it;
  return s.values[static_cast<std::size_t>(it - s.cumulative.begin())];
}

std::vector<SortedAtom> sorted_family(const ConditionalFamily& family) {
  if (family.dim() != 1) throw Error(ErrorCode::DimensionNotOne, "quantile barycenter requires m = 1");
  std::vector<SortedAtom> out;
  for (const auto& a : family.atoms()) out.push_back(sorted_atom(a.measure));
  return out;
}

double averaged_quantile(const ConditionalFamily& family, const std::vector<SortedAtom>& sorted, double t) {
  double y = 0.0;
  for (Index a = 0; a < family.size(); ++a)
    y += family.atom(a).probability * sorted_quantile(sorted[static_cast<std::size_t>(a)], t);
  return y;
}

}  // namespace

double quantile(const DiscreteMeasure& mu, double t) {
  return sorted_quantile(sorted_atom(mu), t);
}

BarycenterResult quantile_1d(const ConditionalFamily& family, Index resolution) {
  if (resolution < 1) throw Error(ErrorCode::InvalidArgument, "resolution must be >= 1");
  const auto sorted = sorted_family(family);
  Matrix points(resolution, 1);
  for (Index i = 0; i < resolution; ++i) {
    const double t = (static_cast<double>(i) + 0.5) / static_cast<double>(resolution);
    points(i, 0) = averaged_quantile(family, sorted, t);
  }
  BarycenterResult result{
      coalesce(DiscreteMeasure(std::move(points), Vector::Constant(resolution, 1.0 / static_cast<double>(resolution))))};
  result.method = Method::Quantile1d;
  fill_objective(family, result);
  return result;
}

BarycenterResult quantile_1d_exact(const ConditionalFamily& family) {
  const auto sorted = sorted_family(family);
  std::vector<double> levels;
  for (const auto& s : sorted) levels.insert(levels.end(), s.cumulative.begin(), s.cumulative.end());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  std::vector<double> values, masses;
  double previous = 0.0;
  for (double level : levels) {
    if (level <= previous) continue;
    values.push_back(averaged_quantile(family, sorted, 0.5 * (previous + level)));
    masses.push_back(level - previous);
    previous = level;
  }
  BarycenterResult result{coalesce(make_measure_1d(values, masses))};
  result.method = Method::Quantile1dExact;
  fill_objective(family, result);
  return result;
}

}  // namespace indep::barycenter
