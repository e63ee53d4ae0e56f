#include "ecborrow/error.hpp"

namespace ecborrow {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::NonBinaryTreatment: return "NonBinaryTreatment";
    case ErrorCode::NonBinaryOutcome: return "NonBinaryOutcome";
    case ErrorCode::ArmMissing: return "ArmMissing";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::SingularDesign: return "SingularDesign";
    case ErrorCode::Nonconvergence: return "Nonconvergence";
    case ErrorCode::PerfectSeparation: return "PerfectSeparation";
    case ErrorCode::DegenerateKernel: return "DegenerateKernel";
    case ErrorCode::SingularHessian: return "SingularHessian";
    case ErrorCode::KOutOfRange: return "KOutOfRange";
    case ErrorCode::SelectionFailed: return "SelectionFailed";
    case ErrorCode::SourceMissing: return "SourceMissing";
    case ErrorCode::TooFewEcs: return "TooFewEcs";
    case ErrorCode::UnknownMechanism: return "UnknownMechanism";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

}  // namespace ecborrow
