#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace indep {

enum class ErrorCode {
  // construction / schema
  EmptySupport,
  NegativeWeight,
  InvalidWeights,
  DimensionMismatch,
  EmptyDataset,
  UOutOfRange,
  UnseenValue,
  DatasetMismatch,
  UnknownSupportPoint,
  UnknownGroup,
  IndexOutOfRange,
  NegativeComponent,
  TooManyAtoms,
  // configuration
  InvalidArgument,
  DimensionNotOne,
  SupportDimensionMismatch,
  MissingU,
  NotHalf,
  HalfNotAllowed,
  ConfigConflict,
  // solver
  SolverFailure,
  LpInfeasible,
  NumericalUnderflow,
  // io
  FileNotFound,
  WriteFailed,
  MissingColumn,
  ParseError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace indep
