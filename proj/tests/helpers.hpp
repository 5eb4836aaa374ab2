#pragma once

#include "indep/error.hpp"
#include "indep/measure.hpp"

#include <doctest.h>

#include <initializer_list>

namespace th {

using indep::Index;
using indep::Matrix;
using indep::Vector;

inline Matrix col(std::initializer_list<double> v) {
  Matrix m(static_cast<Index>(v.size()), 1);
  Index i = 0;
  for (double x : v) m(i++, 0) = x;
  return m;
}

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

inline indep::DiscreteMeasure line(std::initializer_list<double> points, std::initializer_list<double> masses) {
  return indep::make_measure(col(points), vec(masses));
}

inline indep::DiscreteMeasure point(double x) { return indep::dirac(vec({x})); }

/// Runs f and returns the code of the indep::Error it throws.
inline indep::ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const indep::Error& e) {
    return e.code();
  }
  FAIL("expected an indep::Error");
  return indep::ErrorCode::InvalidArgument;
}

}  // namespace th
