#include "daeref/error.hpp"

namespace daeref {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidMatrix: return "InvalidMatrix";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::UnstableMatrix: return "UnstableMatrix";
    case ErrorKind::NotStabilizable: return "NotStabilizable";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::InvalidPencil: return "InvalidPencil";
    case ErrorKind::SingularPencil: return "SingularPencil";
    case ErrorKind::IllConditionedPencil: return "IllConditionedPencil";
    case ErrorKind::InsufficientInputHorizon: return "InsufficientInputHorizon";
    case ErrorKind::NotConvertible: return "NotConvertible";
    case ErrorKind::DegenerateDrivingMatrix: return "DegenerateDrivingMatrix";
    case ErrorKind::NoFeasibleLambda: return "NoFeasibleLambda";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::CommonEigenvalues: return "CommonEigenvalues";
    case ErrorKind::RankDeficiency: return "RankDeficiency";
    case ErrorKind::NotWellPosed: return "NotWellPosed";
    case ErrorKind::MissingInterface: return "MissingInterface";
    case ErrorKind::InvalidCertificate: return "InvalidCertificate";
    case ErrorKind::UnstableInput: return "UnstableInput";
    case ErrorKind::OrderTooLarge: return "OrderTooLarge";
    case ErrorKind::InconsistentInitialState: return "InconsistentInitialState";
    case ErrorKind::HorizonMismatch: return "HorizonMismatch";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::InvalidSystemFile: return "InvalidSystemFile";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind) {}

}  // namespace daeref
