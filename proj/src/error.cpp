#include "flexcert/error.hpp"

namespace flexcert {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotSymmetric: return "NotSymmetric";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NumericalBreakdown: return "NumericalBreakdown";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::TooFewSamples: return "TooFewSamples";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::Empty: return "Empty";
    case ErrorKind::DegenerateComponent: return "DegenerateComponent";
    case ErrorKind::TooManyComponents: return "TooManyComponents";
    case ErrorKind::Disconnected: return "Disconnected";
    case ErrorKind::SingularSusceptance: return "SingularSusceptance";
    case ErrorKind::BadDimension: return "BadDimension";
    case ErrorKind::InvalidCase: return "InvalidCase";
    case ErrorKind::InvalidCommitment: return "InvalidCommitment";
    case ErrorKind::InfeasibleInput: return "InfeasibleInput";
    case ErrorKind::RowExplosion: return "RowExplosion";
    case ErrorKind::EmptyBox: return "EmptyBox";
    case ErrorKind::SubproblemInfeasible: return "SubproblemInfeasible";
    case ErrorKind::NotMinimal: return "NotMinimal";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Config: return "Config";
    case ErrorKind::Io: return "Io";
    case ErrorKind::Internal: return "Internal";
  }
  return "Unknown";
}

bool is_input_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ShapeMismatch:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::BadDimension:
    case ErrorKind::InvalidCase:
    case ErrorKind::InvalidCommitment:
    case ErrorKind::InvalidArgument:
    case ErrorKind::Config:
    case ErrorKind::Io:
    case ErrorKind::IndexOutOfRange:
    case ErrorKind::TooManyComponents:
    case ErrorKind::Disconnected:
    case ErrorKind::TooFewSamples:
    case ErrorKind::Empty:
    case ErrorKind::EmptyBox:
      return true;
    default:
      return false;
  }
}

}  // namespace flexcert
