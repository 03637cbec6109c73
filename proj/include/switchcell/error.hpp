#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace switchcell {

enum class ErrorKind {
  // network_model
  DuplicateEdge,
  NodeWithoutTarget,
  MalformedLogic,
  UnknownNodeReference,
  // switching_params
  DimensionMismatch,
  NotRegular,
  MalformedParameter,
  // cell_complex
  NotThresholdRegular,
  NoSuchNeighbor,
  // combinatorial_dynamics
  UndefinedOnCell,
  NotLoopCharacteristic,
  // equilibrium_analysis / stability
  NotCandidate,
  RecordRootMismatch,
  GammaNotIdentity,
  Contradiction,
  // sigmoid_oracle
  AxiomViolated,
  NewtonDiverged,
  ConvergenceFailure,
  // cli
  UnsupportedDimension,
  Io,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DuplicateEdge: return "DuplicateEdge";
    case ErrorKind::NodeWithoutTarget: return "NodeWithoutTarget";
    case ErrorKind::MalformedLogic: return "MalformedLogic";
    case ErrorKind::UnknownNodeReference: return "UnknownNodeReference";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotRegular: return "NotRegular";
    case ErrorKind::MalformedParameter: return "MalformedParameter";
    case ErrorKind::NotThresholdRegular: return "NotThresholdRegular";
    case ErrorKind::NoSuchNeighbor: return "NoSuchNeighbor";
    case ErrorKind::UndefinedOnCell: return "UndefinedOnCell";
    case ErrorKind::NotLoopCharacteristic: return "NotLoopCharacteristic";
    case ErrorKind::NotCandidate: return "NotCandidate";
    case ErrorKind::RecordRootMismatch: return "RecordRootMismatch";
    case ErrorKind::GammaNotIdentity: return "GammaNotIdentity";
    case ErrorKind::Contradiction: return "Contradiction";
    case ErrorKind::AxiomViolated: return "AxiomViolated";
    case ErrorKind::NewtonDiverged: return "NewtonDiverged";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace switchcell
