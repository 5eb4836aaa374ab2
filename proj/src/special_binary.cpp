#include "indep/special_binary.hpp"

#include "indep/approx.hpp"
#include "indep/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>

namespace indep::binary {
namespace {

constexpr double kHalfTolerance = 1e-12;

double parse_double(std::string_view text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw Error(ErrorCode::ParseError, "cannot parse '" + std::string(text) + "'");
  return v;
}

long long parse_integer(std::string_view text) {
  long long v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw Error(ErrorCode::ParseError, "cannot parse '" + std::string(text) + "'");
  return v;
}

double expectation(const BinaryInstance& inst, auto&& value) {
  double s = 0.0;
  for (std::size_t b = 0; b < inst.atoms().size(); ++b) s += inst.atoms()[b].p * value(b);
  return s;
}

}  // namespace

SetProbability set_probability(double value) {
  return {value, std::abs(value - 0.5) <= kHalfTolerance};
}

SetProbability parse_set_probability(const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) return set_probability(parse_double(text));
  const long long num = parse_integer(std::string_view(text).substr(0, slash));
  const long long den = parse_integer(std::string_view(text).substr(slash + 1));
  if (den <= 0) throw Error(ErrorCode::ParseError, "ratio '" + text + "' has a non-positive denominator");
  return {static_cast<double>(num) / static_cast<double>(den), 2 * num == den};
}

BinaryInstance::BinaryInstance(std::vector<BinaryAtom> atoms, SetProbability pA) : atoms_(std::move(atoms)), pA_(pA) {
  if (atoms_.empty()) throw Error(ErrorCode::EmptyDataset, "binary instance has no atoms");
  if (!(pA_.value > 0.0 && pA_.value < 1.0)) throw Error(ErrorCode::InvalidArgument, "P[A] must lie in (0,1)");
  double total = 0.0;
  for (const auto& a : atoms_) {
    if (!(a.p > 0.0) || !std::isfinite(a.p))
      throw Error(ErrorCode::InvalidWeights, "atom '" + a.label + "' has non-positive probability");
    if (!(a.f >= 0.0) || !(a.g >= 0.0))
      throw Error(ErrorCode::NegativeComponent, "atom '" + a.label + "' has a negative component");
    total += a.p;
  }
  if (std::abs(total - 1.0) > 1e-6)
    throw Error(ErrorCode::InvalidWeights, "atom probabilities sum to " + std::to_string(total));
  for (auto& a : atoms_) a.p /= total;
  if (pA_.exact_half) pA_.value = 0.5;
}

double distance_sq(const BinaryInstance& inst, double alpha, double beta, const std::vector<bool>& in_B) {
  const double pA = inst.pA();
  return expectation(inst, [&](std::size_t b) {
    const auto& a = inst.atoms()[b];
    const double on_A = in_B[b] ? alpha : beta;
    const double off_A = in_B[b] ? beta : alpha;
    return pA * (a.f - on_A) * (a.f - on_A) + (1.0 - pA) * (a.g - off_A) * (a.g - off_A);
  });
}

BinarySolution solve_half(const BinaryInstance& inst) {
  if (!inst.is_half()) throw Error(ErrorCode::NotHalf, "closed form requires P[A] = 1/2");
  const auto& atoms = inst.atoms();
  BinarySolution s;
  s.regime = Regime::Half;
  s.alpha = expectation(inst, [&](std::size_t b) { return std::max(atoms[b].f, atoms[b].g); });
  s.beta = expectation(inst, [&](std::size_t b) { return std::min(atoms[b].f, atoms[b].g); });
  const double max_sq = expectation(inst, [&](std::size_t b) { return std::pow(std::max(atoms[b].f, atoms[b].g), 2); });
  const double min_sq = expectation(inst, [&](std::size_t b) { return std::pow(std::min(atoms[b].f, atoms[b].g), 2); });
  for (const auto& a : atoms) s.in_B.push_back(a.f >= a.g);
  s.distance_sq = 0.5 * (max_sq - s.alpha * s.alpha + min_sq - s.beta * s.beta);
  return s;
}

BinarySolution solve_nonhalf(const BinaryInstance& inst) {
  if (inst.is_half()) throw Error(ErrorCode::HalfNotAllowed, "P[A] = 1/2; use the half closed form");
  const auto& atoms = inst.atoms();
  BinarySolution s;
  s.regime = Regime::NonHalf;
  s.alpha = expectation(inst, [&](std::size_t b) { return atoms[b].f; });
  s.beta = expectation(inst, [&](std::size_t b) { return atoms[b].g; });
  const double var_f = expectation(inst, [&](std::size_t b) { return std::pow(atoms[b].f - s.alpha, 2); });
  const double var_g = expectation(inst, [&](std::size_t b) { return std::pow(atoms[b].g - s.beta, 2); });
  s.in_B.assign(atoms.size(), true);  // D = A
  s.distance_sq = inst.pA() * var_f + (1.0 - inst.pA()) * var_g;
  return s;
}

BinarySolution solve(const BinaryInstance& inst) {
  return inst.is_half() ? solve_half(inst) : solve_nonhalf(inst);
}

BinarySolution brute_force(const BinaryInstance& inst) {
  const auto& atoms = inst.atoms();
  const std::size_t n = atoms.size();
  if (n > 20) throw Error(ErrorCode::TooManyAtoms, "brute force is limited to 20 atoms");

  BinarySolution best;
  best.distance_sq = std::numeric_limits<double>::infinity();
  auto consider = [&](const std::vector<bool>& in_B, Regime regime) {
    // Inner optimum: alpha, beta are the means of X on D and D^c.
    const double pA = inst.pA();
    double mass_d = 0.0, sum_d = 0.0, sum_dc = 0.0;
    for (std::size_t b = 0; b < n; ++b) {
      const auto& a = atoms[b];
      const double on_d = in_B[b] ? pA : 1.0 - pA;
      mass_d += a.p * on_d;
      sum_d += a.p * (in_B[b] ? pA * a.f : (1.0 - pA) * a.g);
      sum_dc += a.p * (in_B[b] ? (1.0 - pA) * a.g : pA * a.f);
    }
    const double alpha = mass_d > 0.0 ? sum_d / mass_d : 0.0;
    const double beta = mass_d < 1.0 ? sum_dc / (1.0 - mass_d) : 0.0;
    const double d = distance_sq(inst, alpha, beta, in_B);
    if (d < best.distance_sq) {
      best = BinarySolution{regime, alpha, beta, in_B, d};
    }
  };

  if (inst.is_half()) {
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      std::vector<bool> in_B(n);
      for (std::size_t b = 0; b < n; ++b) in_B[b] = (mask >> b) & 1u;
      consider(in_B, Regime::Half);
    }
  } else {
    consider(std::vector<bool>(n, true), Regime::NonHalf);   // D = A
    consider(std::vector<bool>(n, false), Regime::NonHalf);  // D = A^c
    // D = Omega: Y constant.
    const double c = expectation(inst, [&](std::size_t b) { return inst.pA() * atoms[b].f + (1 - inst.pA()) * atoms[b].g; });
    const double d = distance_sq(inst, c, c, std::vector<bool>(n, true));
    if (d < best.distance_sq) best = BinarySolution{Regime::NonHalf, c, c, std::vector<bool>(n, true), d};
  }
  return best;
}

Comparison compare_unconstrained(const BinaryInstance& inst) {
  std::vector<Row> rows;
  for (const auto& a : inst.atoms()) {
    rows.push_back({a.label, Vector::Constant(1, a.f), a.p * inst.pA(), std::nullopt});
    rows.push_back({a.label, Vector::Constant(1, a.g), a.p * (1.0 - inst.pA()), std::nullopt});
  }
  const auto approx = approx::build(Dataset(std::move(rows)));
  return {solve(inst).distance_sq, approx.achieved_distance_sq};
}

}  // namespace indep::binary
