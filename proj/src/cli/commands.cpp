#include "indep/cli.hpp"

#include "indep/approx.hpp"
#include "indep/barycenter.hpp"
#include "indep/csv.hpp"
#include "indep/diagnostics.hpp"
#include "indep/json_out.hpp"
#include "indep/ot.hpp"
#include "indep/special_binary.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <regex>
#include <sstream>

namespace indep::cli {
namespace {

using json_out::Json;

// ---------------------------------------------------------------------------
// Input

std::vector<std::string> value_columns(const csv::Table& t, const Config& cfg) {
  if (!cfg.value_cols.empty()) {
    for (const auto& name : cfg.value_cols) t.column(name);
    return cfg.value_cols;
  }
  static const std::regex coordinate("x[0-9]+");
  std::vector<std::string> cols;
  for (const auto& h : t.header)
    if (std::regex_match(h, coordinate)) cols.push_back(h);
  if (cols.empty()) throw Error(ErrorCode::MissingColumn, "no value columns given and no column named x1, x2, ...");
  return cols;
}

Vector read_point(const csv::Table& t, std::size_t row, const std::vector<std::size_t>& cols) {
  Vector x(static_cast<Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) x(static_cast<Index>(c)) = csv::number(t, row, cols[c]);
  return x;
}

std::vector<std::size_t> indices(const csv::Table& t, const std::vector<std::string>& names) {
  std::vector<std::size_t> out;
  for (const auto& n : names) out.push_back(t.column(n));
  return out;
}

struct LoadedData {
  csv::Table table;
  std::vector<std::string> value_cols;
  Dataset data;
};

LoadedData load_dataset(const Config& cfg) {
  csv::Table t = csv::read_file(cfg.input);
  const auto names = value_columns(t, cfg);
  const auto cols = indices(t, names);
  const std::size_t group = t.column(cfg.group_col);
  constexpr std::size_t kAbsent = static_cast<std::size_t>(-1);
  const std::size_t weight = cfg.weight_col ? t.column(*cfg.weight_col) : kAbsent;
  const std::size_t u = cfg.u_col ? t.column(*cfg.u_col) : kAbsent;
  std::vector<Row> rows;
  rows.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    Row row{t.rows[r][group], read_point(t, r, cols), 1.0, std::nullopt};
    if (weight != kAbsent) row.weight = csv::number(t, r, weight);
    if (u != kAbsent) row.u = csv::number(t, r, u);
    rows.push_back(std::move(row));
  }
  Dataset data(std::move(rows));
  return {std::move(t), names, std::move(data)};
}

struct NamedMeasure {
  std::string id;
  Matrix points;
  Vector masses;
};

// Measures keyed by the measure column, in order of first appearance.
std::vector<NamedMeasure> load_measures(const Config& cfg, std::vector<std::string>& names) {
  const csv::Table t = csv::read_file(cfg.input);
  names = value_columns(t, cfg);
  const auto cols = indices(t, names);
  const std::size_t id_col = t.column(cfg.measure_col);
  std::optional<std::size_t> weight;
  if (cfg.weight_col) weight = t.column(*cfg.weight_col);
  else if (t.has("weight")) weight = t.column("weight");

  std::vector<std::string> order;
  std::vector<std::vector<Vector>> points;
  std::vector<std::vector<double>> masses;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::string& id = t.rows[r][id_col];
    auto it = std::find(order.begin(), order.end(), id);
    if (it == order.end()) {
      order.push_back(id);
      points.emplace_back();
      masses.emplace_back();
      it = order.end() - 1;
    }
    const auto slot = static_cast<std::size_t>(it - order.begin());
    points[slot].push_back(read_point(t, r, cols));
    masses[slot].push_back(weight ? csv::number(t, r, *weight) : 1.0);
  }
  if (order.empty()) throw Error(ErrorCode::EmptyDataset, "no measures in input");

  std::vector<NamedMeasure> out;
  for (std::size_t s = 0; s < order.size(); ++s) {
    Matrix p(static_cast<Index>(points[s].size()), static_cast<Index>(cols.size()));
    Vector w(static_cast<Index>(points[s].size()));
    for (std::size_t i = 0; i < points[s].size(); ++i) {
      p.row(static_cast<Index>(i)) = points[s][i].transpose();
      w(static_cast<Index>(i)) = masses[s][i];
    }
    out.push_back({order[s], std::move(p), std::move(w)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Output

Json to_json(const Vector& v) {
  Json a = Json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json to_json(const Matrix& m) {
  Json a = Json::array();
  for (Index i = 0; i < m.rows(); ++i) a.push_back(to_json(Vector(m.row(i).transpose())));
  return a;
}

Json to_json(const diagnostics::PerAtom& values) {
  Json o = Json::object();
  for (const auto& [label, v] : values) o[label] = v;
  return o;
}

Json to_json(const std::vector<std::string>& values) {
  Json a = Json::array();
  for (const auto& v : values) a.push_back(v);
  return a;
}

Json measure_json(const DiscreteMeasure& mu) {
  Json o = Json::object();
  o["support"] = to_json(mu.points());
  o["weights"] = to_json(mu.weights());
  return o;
}

Json optional_string(const std::optional<std::string>& s) { return s ? Json(*s) : Json(nullptr); }

Json config_json(const Config& cfg) {
  Json c = Json::object();
  c["input"] = cfg.input;
  c["group_col"] = cfg.group_col;
  c["value_cols"] = to_json(cfg.value_cols);
  c["weight_col"] = optional_string(cfg.weight_col);
  c["u_col"] = optional_string(cfg.u_col);
  c["method"] = cfg.method;
  c["epsilon"] = cfg.epsilon;
  c["max_iter"] = cfg.max_iter;
  c["tol"] = cfg.tol;
  c["seed"] = cfg.seed ? Json(*cfg.seed) : Json(nullptr);
  return c;
}

Json header(const std::string& command) {
  Json j = Json::object();
  j["schema"] = 1;
  j["command"] = command;
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::WriteFailed, "cannot open '" + path + "' for writing");
  f << text;
  f.close();
  if (!f) throw Error(ErrorCode::WriteFailed, "failed writing '" + path + "'");
}

void emit_report(const Config& cfg, const Json& report, std::ostream& out) {
  const std::string text = json_out::dump(report);
  if (cfg.report.empty()) {
    out << text;
    out.flush();
  } else {
    write_text(cfg.report, text);
  }
}

// `weights` holds the input weight fields verbatim (empty when the input had
// none), so re-ingesting the file reproduces the same dataset bit for bit.
std::string samples_csv(const approx::SampledOutput& s, Index dim, const std::vector<std::string>& weights) {
  const bool with_weight = !weights.empty();
  std::ostringstream o;
  o << "group";
  for (Index c = 1; c <= dim; ++c) o << ",x" << c;
  o << ",u";
  for (Index c = 1; c <= dim; ++c) o << ",y" << c;
  if (with_weight) o << ",weight";
  o << '\n';
  for (std::size_t row = 0; row < s.rows.size(); ++row) {
    const auto& r = s.rows[row];
    const bool quote = r.group.find_first_of(",\"\n\r") != std::string::npos;
    if (quote) {
      o << '"';
      for (char ch : r.group) o << (ch == '"' ? "\"\"" : std::string(1, ch));
      o << '"';
    } else {
      o << r.group;
    }
    for (Index c = 0; c < dim; ++c) o << ',' << csv::format(r.x(c));
    o << ',' << csv::format(r.u);
    for (Index c = 0; c < dim; ++c) o << ',' << csv::format(r.y(c));
    if (with_weight) o << ',' << weights[row];
    o << '\n';
  }
  return o.str();
}

// ---------------------------------------------------------------------------
// Options

approx::BarycenterChoice parse_method(const std::string& m) {
  if (m == "auto") return approx::BarycenterChoice::Auto;
  if (m == "exact") return approx::BarycenterChoice::Exact;
  if (m == "entropic") return approx::BarycenterChoice::Entropic;
  if (m == "free") return approx::BarycenterChoice::Free;
  if (m == "quantile1d") return approx::BarycenterChoice::Quantile1d;
  throw Error(ErrorCode::ConfigConflict, "unknown method '" + m + "'");
}

[[noreturn]] void conflict(const std::string& why) { throw Error(ErrorCode::ConfigConflict, why); }

void check_common(const Config& cfg, Index dim) {
  const auto method = parse_method(cfg.method);
  if (method == approx::BarycenterChoice::Quantile1d && dim != 1)
    conflict("--method quantile1d requires one value column, got " + std::to_string(dim));
  if (method == approx::BarycenterChoice::Entropic && !(cfg.epsilon > 0.0)) conflict("--epsilon must be > 0");
  if (cfg.k > 0 && method != approx::BarycenterChoice::Free) conflict("--k only applies to --method free");
  if (cfg.max_iter < 0) conflict("--max-iter must be >= 0");
  if (cfg.tol < 0.0) conflict("--tol must be >= 0");
}

approx::Options approx_options(const Config& cfg) {
  approx::Options o;
  o.method = parse_method(cfg.method);
  o.entropic.epsilon = cfg.epsilon;
  if (cfg.max_iter > 0) {
    o.entropic.max_iter = cfg.max_iter;
    o.free.max_iter = cfg.max_iter;
    o.refine_max_iter = cfg.max_iter;
  }
  if (cfg.tol > 0.0) {
    o.entropic.tol = cfg.tol;
    o.free.tol = cfg.tol;
    o.refine_tol = cfg.tol;
  }
  o.free.k = cfg.k;
  o.free.seed = cfg.seed.value_or(0);
  return o;
}

Json approximation_json(const approx::IndependentApproximation& ap, const diagnostics::Report& rep) {
  Json j = Json::object();
  j["dimension"] = ap.family.dim();
  Json groups = Json::array();
  for (const auto& a : ap.family.atoms()) {
    Json g = Json::object();
    g["label"] = a.label;
    g["probability"] = a.probability;
    g["support_size"] = a.measure.size();
    groups.push_back(std::move(g));
  }
  j["groups"] = std::move(groups);
  Json b = Json::object();
  b["method"] = std::string(barycenter::to_string(ap.barycenter_method));
  b["iterations"] = ap.barycenter_iterations;
  b["converged"] = ap.barycenter_converged;
  b["support"] = to_json(ap.nu0.points());
  b["weights"] = to_json(ap.nu0.weights());
  j["barycenter"] = std::move(b);
  j["objective"] = rep.objective;
  j["lower_bound"] = rep.lower_bound;
  j["gap"] = rep.gap;
  j["mean_x"] = to_json(rep.mean_x);
  j["mean_y"] = to_json(rep.mean_y);
  j["per_atom_w2"] = to_json(rep.per_atom_w2);
  j["independence_tv"] = to_json(rep.independence_tv);
  Json checks = Json::array();
  for (const auto& c : rep.checks) {
    Json o = Json::object();
    o["name"] = c.name;
    o["pass"] = c.pass;
    o["value"] = c.value;
    o["tolerance"] = c.tolerance;
    checks.push_back(std::move(o));
  }
  j["checks"] = std::move(checks);
  j["checks_failed"] = !rep.all_passed();
  j["warnings"] = to_json(ap.warnings);
  return j;
}

Json sampled_json(const approx::SampledOutput& s, const DiscreteMeasure& nu0) {
  Json o = Json::object();
  o["rows"] = s.rows.size();
  o["empirical_distance_sq"] = diagnostics::empirical_distance(s);
  o["independence_tv"] = to_json(diagnostics::independence_tv(s, nu0));
  return o;
}

}  // namespace

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::FileNotFound:
    case ErrorCode::WriteFailed:
      return kIo;
    case ErrorCode::SolverFailure:
    case ErrorCode::LpInfeasible:
    case ErrorCode::NumericalUnderflow:
      return kSolver;
    case ErrorCode::InvalidArgument:
    case ErrorCode::DimensionNotOne:
    case ErrorCode::SupportDimensionMismatch:
    case ErrorCode::MissingU:
    case ErrorCode::NotHalf:
    case ErrorCode::HalfNotAllowed:
    case ErrorCode::ConfigConflict:
    case ErrorCode::TooManyAtoms:
      return kConfig;
    default:
      return kParse;
  }
}

std::string exit_code_help() {
  return "Exit status:\n"
         "  0  success (a report with \"checks_failed\": true still exits 0)\n"
         "  2  I/O error: input missing or output not writable\n"
         "  3  schema or parse error: missing column, malformed number, invalid data\n"
         "  4  solver failure: iteration cap, infeasible LP, numerical underflow\n"
         "  5  configuration conflict: incompatible flags or values\n";
}

int run(const Config& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.subcommand == "approx") return run_approx(cfg, out);
    if (cfg.subcommand == "binary-case") return run_binary_case(cfg, out);
    if (cfg.subcommand == "ot") return run_ot(cfg, out);
    if (cfg.subcommand == "barycenter") return run_barycenter(cfg, out);
    if (cfg.subcommand == "diagnose") return run_diagnose(cfg, out);
    throw Error(ErrorCode::ConfigConflict, "unknown subcommand '" + cfg.subcommand + "'");
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kSolver;
  }
}

int run_approx(const Config& cfg, std::ostream& out) {
  const LoadedData in = load_dataset(cfg);
  check_common(cfg, in.data.dim());
  if (cfg.resolution > 0) conflict("--resolution only applies to the barycenter subcommand");

  const auto ap = approx::build(in.data, approx_options(cfg));
  const auto rep = diagnostics::verify(ap, in.data);

  Json report = header("approx");
  report["config"] = config_json(cfg);
  const Json body = approximation_json(ap, rep);
  for (const auto& [key, value] : body.items()) report[key] = value;

  Json samples = Json::object();
  std::string samples_text;
  if (cfg.samples.empty()) {
    samples["written"] = false;
    samples["reason"] = "no --samples path";
  } else if (!in.data.has_u() && !cfg.seed) {
    samples["written"] = false;
    samples["reason"] = "no u column and no --seed; report-only mode";
  } else {
    const auto s = approx::transform(ap, in.data, cfg.seed);
    samples["written"] = true;
    samples["path"] = cfg.samples;
    samples["u_source"] = in.data.has_u() ? "column" : "seed";
    const Json sampled = sampled_json(s, ap.nu0);
    for (const auto& [key, value] : sampled.items()) samples[key] = value;
    std::vector<std::string> weights;
    if (cfg.weight_col) {
      const std::size_t wc = in.table.column(*cfg.weight_col);
      for (const auto& fields : in.table.rows) weights.push_back(fields[wc]);
    }
    samples_text = samples_csv(s, in.data.dim(), weights);
  }
  report["samples"] = std::move(samples);

  if (!samples_text.empty()) write_text(cfg.samples, samples_text);
  emit_report(cfg, report, out);
  return kOk;
}

int run_diagnose(const Config& cfg, std::ostream& out) {
  const LoadedData in = load_dataset(cfg);
  check_common(cfg, in.data.dim());
  if (cfg.resolution > 0) conflict("--resolution only applies to the barycenter subcommand");
  if (!cfg.samples.empty()) conflict("diagnose reads samples from --input; --samples is not an output here");

  const auto ap = approx::build(in.data, approx_options(cfg));
  const auto rep = diagnostics::verify(ap, in.data);

  Json report = header("diagnose");
  report["config"] = config_json(cfg);
  const Json body = approximation_json(ap, rep);
  for (const auto& [key, value] : body.items()) report[key] = value;

  // Columns y1..ym, when present, are checked as realized samples.
  std::vector<std::string> y_names;
  for (Index c = 1; c <= in.data.dim(); ++c) y_names.push_back("y" + std::to_string(c));
  const bool has_y = std::all_of(y_names.begin(), y_names.end(), [&](const auto& n) { return in.table.has(n); });
  if (has_y) {
    const auto y_cols = indices(in.table, y_names);
    approx::SampledOutput s;
    for (std::size_t r = 0; r < in.table.rows.size(); ++r) {
      const Row& row = in.data.row(static_cast<Index>(r));
      approx::SampledRow sr;
      sr.group = row.group;
      sr.x = row.x;
      sr.weight = row.weight;
      sr.u = row.u.value_or(0.0);
      sr.y = read_point(in.table, r, y_cols);
      s.rows.push_back(std::move(sr));
    }
    report["sampled"] = sampled_json(s, ap.nu0);
  } else {
    report["sampled"] = nullptr;
  }
  emit_report(cfg, report, out);
  return kOk;
}

int run_binary_case(const Config& cfg, std::ostream& out) {
  if (cfg.pA.empty()) conflict("binary-case requires --pA");
  if (cfg.regime != "auto" && cfg.regime != "half" && cfg.regime != "nonhalf")
    conflict("--regime must be auto, half or nonhalf");
  const binary::SetProbability pA = binary::parse_set_probability(cfg.pA);

  const csv::Table t = csv::read_file(cfg.input);
  const std::size_t pc = t.column("p"), fc = t.column("f"), gc = t.column("g");
  const std::optional<std::size_t> label = t.has(cfg.group_col) ? std::optional(t.column(cfg.group_col)) : std::nullopt;
  std::vector<binary::BinaryAtom> atoms;
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    atoms.push_back({label ? t.rows[r][*label] : std::to_string(r + 1), csv::number(t, r, pc), csv::number(t, r, fc),
                     csv::number(t, r, gc)});
  const binary::BinaryInstance inst(std::move(atoms), pA);

  const binary::BinarySolution sol = cfg.regime == "half"      ? binary::solve_half(inst)
                                     : cfg.regime == "nonhalf" ? binary::solve_nonhalf(inst)
                                                               : binary::solve(inst);

  Json report = header("binary-case");
  Json c = Json::object();
  c["input"] = cfg.input;
  c["pA"] = cfg.pA;
  c["regime"] = cfg.regime;
  c["verify"] = cfg.verify;
  report["config"] = std::move(c);
  report["pA"] = inst.pA();
  report["exact_half"] = inst.is_half();
  report["regime"] = sol.regime == binary::Regime::Half ? "half" : "nonhalf";
  report["alpha"] = sol.alpha;
  report["beta"] = sol.beta;
  Json set_b = Json::array();
  Json per_atom = Json::array();
  double mean_x = 0.0, mass_d = 0.0;
  for (std::size_t b = 0; b < inst.atoms().size(); ++b) {
    const auto& a = inst.atoms()[b];
    if (sol.in_B[b]) set_b.push_back(a.label);
    Json o = Json::object();
    o["label"] = a.label;
    o["p"] = a.p;
    o["f"] = a.f;
    o["g"] = a.g;
    o["in_B"] = static_cast<bool>(sol.in_B[b]);
    o["y_on_A"] = sol.y(b, true);
    o["y_on_Ac"] = sol.y(b, false);
    per_atom.push_back(std::move(o));
    mean_x += a.p * (inst.pA() * a.f + (1.0 - inst.pA()) * a.g);
    mass_d += a.p * (sol.in_B[b] ? inst.pA() : 1.0 - inst.pA());
  }
  report["set_B"] = std::move(set_b);
  report["atoms"] = std::move(per_atom);
  report["distance_sq"] = sol.distance_sq;
  report["mean_x"] = mean_x;
  report["mean_y"] = mass_d * sol.alpha + (1.0 - mass_d) * sol.beta;

  if (cfg.verify) {
    const auto bf = binary::brute_force(inst);
    const auto cmp = binary::compare_unconstrained(inst);
    Json v = Json::object();
    v["brute_force_distance_sq"] = bf.distance_sq;
    v["agrees"] = std::abs(bf.distance_sq - sol.distance_sq) <= 1e-12 * std::max(1.0, sol.distance_sq);
    v["unconstrained_distance_sq"] = cmp.unconstrained;
    v["unconstrained_le_constrained"] = cmp.unconstrained <= cmp.constrained + 1e-10;
    report["verify"] = std::move(v);
  } else {
    report["verify"] = nullptr;
  }
  emit_report(cfg, report, out);
  return kOk;
}

int run_ot(const Config& cfg, std::ostream& out) {
  std::vector<std::string> names;
  const auto measures = load_measures(cfg, names);
  if (measures.size() != 2)
    throw Error(ErrorCode::ParseError, "ot expects exactly two measures, found " + std::to_string(measures.size()));
  const DiscreteMeasure mu = make_measure(measures[0].points, measures[0].masses);
  const DiscreteMeasure nu = make_measure(measures[1].points, measures[1].masses);

  const auto method = parse_method(cfg.method);
  ot::OtSolution sol = [&] {
    switch (method) {
      case approx::BarycenterChoice::Auto:
      case approx::BarycenterChoice::Exact: return ot::solve_exact(mu, nu);
      case approx::BarycenterChoice::Entropic: {
        if (!(cfg.epsilon > 0.0)) conflict("--epsilon must be > 0");
        ot::EntropicOptions o;
        o.epsilon = cfg.epsilon;
        if (cfg.max_iter > 0) o.max_iter = cfg.max_iter;
        if (cfg.tol > 0.0) o.tol = cfg.tol;
        return ot::solve_entropic(mu, nu, o);
      }
      case approx::BarycenterChoice::Quantile1d:
        if (mu.dim() != 1) conflict("--method quantile1d requires one value column");
        return ot::solve_comonotone_1d(mu, nu);
      case approx::BarycenterChoice::Free: break;
    }
    conflict("--method free does not apply to ot");
  }();

  Json report = header("ot");
  Json c = config_json(cfg);
  c["measure_col"] = cfg.measure_col;
  report["config"] = std::move(c);
  report["method"] = std::string(ot::to_string(sol.method));
  report["source"] = measures[0].id;
  report["target"] = measures[1].id;
  report["cost"] = sol.cost;
  report["iterations"] = sol.iterations;
  report["converged"] = sol.converged;
  report["marginal_violation"] = sol.coupling.marginal_violation();
  report["source_measure"] = measure_json(mu);
  report["target_measure"] = measure_json(nu);
  report["plan"] = to_json(sol.coupling.plan());
  emit_report(cfg, report, out);
  return kOk;
}

int run_barycenter(const Config& cfg, std::ostream& out) {
  std::vector<std::string> names;
  const auto measures = load_measures(cfg, names);
  double total = 0.0;
  for (const auto& m : measures) total += m.masses.sum();
  std::vector<Atom> atoms;
  for (const auto& m : measures) atoms.push_back({m.id, m.masses.sum() / total, make_measure(m.points, m.masses)});
  const ConditionalFamily family(std::move(atoms));
  const Index dim = family.dim();
  check_common(cfg, dim);

  const auto method = parse_method(cfg.method);
  const bool grid_method = method == approx::BarycenterChoice::Exact || method == approx::BarycenterChoice::Entropic ||
                           (method == approx::BarycenterChoice::Auto && !cfg.support.empty());
  if (!cfg.support.empty() && !grid_method) conflict("--support applies to fixed-support methods only");
  if (cfg.resolution > 0 && method != approx::BarycenterChoice::Quantile1d)
    conflict("--resolution only applies to --method quantile1d");

  Matrix support;
  if (grid_method) {
    if (cfg.support.empty()) {
      support = barycenter::union_support(family);
    } else {
      Config support_cfg = cfg;
      support_cfg.value_cols = names;
      const csv::Table t = csv::read_file(cfg.support);
      const auto cols = indices(t, value_columns(t, support_cfg));
      support.resize(static_cast<Index>(t.rows.size()), dim);
      for (std::size_t r = 0; r < t.rows.size(); ++r) support.row(static_cast<Index>(r)) = read_point(t, r, cols).transpose();
      if (support.rows() == 0) throw Error(ErrorCode::EmptySupport, "support file has no rows");
    }
  }

  const auto options = approx_options(cfg);
  barycenter::BarycenterResult res = [&] {
    switch (method) {
      case approx::BarycenterChoice::Auto:
        if (support.rows() > 0) return barycenter::fixed_support(family, support);
        if (dim == 1) return barycenter::quantile_1d_exact(family);
        return barycenter::centered_refined(family, options.refine_max_iter, options.refine_tol);
      case approx::BarycenterChoice::Exact: return barycenter::fixed_support(family, support);
      case approx::BarycenterChoice::Entropic: {
        barycenter::EntropicOptions o;
        o.epsilon = cfg.epsilon;
        if (cfg.max_iter > 0) o.max_iter = cfg.max_iter;
        if (cfg.tol > 0.0) o.tol = cfg.tol;
        return barycenter::entropic(family, support, o);
      }
      case approx::BarycenterChoice::Free: {
        auto o = options.free;
        if (o.k <= 0) o.k = barycenter::union_support(family).rows();
        return barycenter::free_support(family, o);
      }
      case approx::BarycenterChoice::Quantile1d:
        return cfg.resolution > 0 ? barycenter::quantile_1d(family, cfg.resolution) : barycenter::quantile_1d_exact(family);
    }
    throw Error(ErrorCode::ConfigConflict, "unknown method");
  }();

  Json report = header("barycenter");
  Json c = config_json(cfg);
  c["measure_col"] = cfg.measure_col;
  c["support"] = cfg.support;
  c["k"] = cfg.k;
  c["resolution"] = cfg.resolution;
  report["config"] = std::move(c);
  report["method"] = std::string(barycenter::to_string(res.method));
  report["iterations"] = res.iterations;
  report["converged"] = res.converged;
  report["objective"] = res.objective;
  diagnostics::PerAtom w2;
  for (Index a = 0; a < family.size(); ++a) w2.emplace_back(family.atom(a).label, res.per_atom_w2[static_cast<std::size_t>(a)]);
  report["per_atom_w2"] = to_json(w2);
  report["support"] = to_json(res.nu0.points());
  report["weights"] = to_json(res.nu0.weights());
  Json history = Json::array();
  for (double h : res.history) history.push_back(h);
  report["history"] = std::move(history);
  report["warnings"] = to_json(res.warnings);
  emit_report(cfg, report, out);
  return kOk;
}

}  // namespace indep::cli
