#pragma once

#include <stdexcept>
#include <string>

namespace meromat {

enum class ErrorKind {
  NonSquare,
  NonFinite,
  ClusterAmbiguity,
  ChainConstructionFailure,
  InvariantViolation,
  IndexNotOne,
  SpectrumHit,
  ContourContainsOtherEigenvalue,
  MissingEigenvalueData,
  InsufficientLaurentDepth,
  FunctionSingularAtEigenvalue,
  ZeroC,
  NotStochastic,
  NotRateMatrix,
  StationaryEigenvalueMissing,
  NonUniqueStationary,
  InvalidRate,
  NegativeRate,
  QuadratureFailure,
  NotDiagonalizable,
  MissingSampler,
  EmptySeries,
  InsideUnitCircle,
  GridHitsSpectralLine,
  SeriesTooShort,
  InvalidArgument,
  ParseError,
  UnsupportedRequest,
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace meromat
