#include "meromat/errors.hpp"

namespace meromat {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonSquare: return "NonSquare";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::ClusterAmbiguity: return "ClusterAmbiguity";
    case ErrorKind::ChainConstructionFailure: return "ChainConstructionFailure";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
    case ErrorKind::IndexNotOne: return "IndexNotOne";
    case ErrorKind::SpectrumHit: return "SpectrumHit";
    case ErrorKind::ContourContainsOtherEigenvalue: return "ContourContainsOtherEigenvalue";
    case ErrorKind::MissingEigenvalueData: return "MissingEigenvalueData";
    case ErrorKind::InsufficientLaurentDepth: return "InsufficientLaurentDepth";
    case ErrorKind::FunctionSingularAtEigenvalue: return "FunctionSingularAtEigenvalue";
    case ErrorKind::ZeroC: return "ZeroC";
    case ErrorKind::NotStochastic: return "NotStochastic";
    case ErrorKind::NotRateMatrix: return "NotRateMatrix";
    case ErrorKind::StationaryEigenvalueMissing: return "StationaryEigenvalueMissing";
    case ErrorKind::NonUniqueStationary: return "NonUniqueStationary";
    case ErrorKind::InvalidRate: return "InvalidRate";
    case ErrorKind::NegativeRate: return "NegativeRate";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::NotDiagonalizable: return "NotDiagonalizable";
    case ErrorKind::MissingSampler: return "MissingSampler";
    case ErrorKind::EmptySeries: return "EmptySeries";
    case ErrorKind::InsideUnitCircle: return "InsideUnitCircle";
    case ErrorKind::GridHitsSpectralLine: return "GridHitsSpectralLine";
    case ErrorKind::SeriesTooShort: return "SeriesTooShort";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::UnsupportedRequest: return "UnsupportedRequest";
  }
  return "Error";
}

}  // namespace meromat
