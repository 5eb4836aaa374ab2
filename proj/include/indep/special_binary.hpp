#pragma once

// Closed forms for the case where the ambient information is generated by the
// grouping and a single set A independent of it, so no auxiliary uniform is
// available. X = f 1_A + g 1_{A^c} with f, g group-measurable and nonnegative.
// Every candidate is Y = alpha 1_D + beta 1_{D^c} with
// D = (A n B) u (A^c n B^c) for a union of groups B.

#include <string>
#include <utility>
#include <vector>

namespace indep::binary {

struct BinaryAtom {
  std::string label;
  double p = 0.0;
  double f = 0.0;
  double g = 0.0;
};

/// P[A] as read from input. `exact_half` is set when P[A] = 1/2 was given as
/// a ratio (or within 1e-12 of 0.5 as a decimal).
struct SetProbability {
  double value = 0.5;
  bool exact_half = true;
};

/// Accepts "0.25", "1/4", "2/4", ...
SetProbability parse_set_probability(const std::string& text);
SetProbability set_probability(double value);

class BinaryInstance {
 public:
  BinaryInstance(std::vector<BinaryAtom> atoms, SetProbability pA);

  const std::vector<BinaryAtom>& atoms() const { return atoms_; }
  double pA() const { return pA_.value; }
  bool is_half() const { return pA_.exact_half; }

 private:
  std::vector<BinaryAtom> atoms_;
  SetProbability pA_;
};

enum class Regime { Half, NonHalf };

struct BinarySolution {
  Regime regime = Regime::Half;
  double alpha = 0.0;
  double beta = 0.0;
  /// Membership of each atom in B, in instance order.
  std::vector<bool> in_B;
  double distance_sq = 0.0;

  /// Value of Y on atom b inside A (in_A) or inside A^c.
  double y(std::size_t b, bool in_A) const { return (in_A == in_B[b]) ? alpha : beta; }
};

/// ||X - Y||^2 for Y = alpha 1_D + beta 1_{D^c}.
double distance_sq(const BinaryInstance& inst, double alpha, double beta, const std::vector<bool>& in_B);

/// P[A] = 1/2: alpha = E[f v g], beta = E[f ^ g], B = {f >= g}.
BinarySolution solve_half(const BinaryInstance& inst);

/// P[A] != 1/2: only {}, Omega, A, A^c are independent, so Y = E[f] 1_A + E[g] 1_{A^c}.
BinarySolution solve_nonhalf(const BinaryInstance& inst);

BinarySolution solve(const BinaryInstance& inst);

/// Exhaustive search over B (P[A] = 1/2) or over the independent sets
/// (P[A] != 1/2) with the closed-form inner optimum. At most 20 atoms.
BinarySolution brute_force(const BinaryInstance& inst);

struct Comparison {
  double constrained = 0.0;
  double unconstrained = 0.0;
};

/// Constrained optimum versus the optimum over all independent Y when an
/// auxiliary uniform is available (group b splits into f_b w.p. P[A] and g_b).
Comparison compare_unconstrained(const BinaryInstance& inst);

}  // namespace indep::binary
