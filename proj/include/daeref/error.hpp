#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace daeref {

/// Domain failure categories. The CLI reports them by name, so the spelling of
/// to_string() is part of the external error contract.
enum class ErrorKind {
  InvalidMatrix,
  DimensionMismatch,
  UnstableMatrix,
  NotStabilizable,
  NoConvergence,
  InvalidPencil,
  SingularPencil,
  IllConditionedPencil,
  InsufficientInputHorizon,
  NotConvertible,
  DegenerateDrivingMatrix,
  NoFeasibleLambda,
  Infeasible,
  CommonEigenvalues,
  RankDeficiency,
  NotWellPosed,
  MissingInterface,
  InvalidCertificate,
  UnstableInput,
  OrderTooLarge,
  InconsistentInitialState,
  HorizonMismatch,
  IoFailure,
  InvalidSystemFile,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace daeref
