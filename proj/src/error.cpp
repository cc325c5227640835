#include "critlab/error.hpp"

namespace critlab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::Sizing: return "SIZING_ERROR";
    case ErrorCode::DisconnectedSubset: return "DISCONNECTED_SUBSET";
    case ErrorCode::DegenerateProfile: return "DEGENERATE_PROFILE";
    case ErrorCode::DegenerateClass: return "DEGENERATE_CLASS";
    case ErrorCode::ConvergenceFailure: return "CONVERGENCE_FAILURE";
    case ErrorCode::EllipticityFailure: return "ELLIPTICITY_FAILURE";
    case ErrorCode::ConstantField: return "CONSTANT_FIELD";
    case ErrorCode::LoopExitsDomain: return "LOOP_EXITS_DOMAIN";
    case ErrorCode::LoopThroughZero: return "LOOP_THROUGH_ZERO";
    case ErrorCode::LevelOutOfRange: return "LEVEL_OUT_OF_RANGE";
    case ErrorCode::SplitLevels: return "SPLIT_LEVELS";
    case ErrorCode::PointOutsideDomain: return "POINT_OUTSIDE_DOMAIN";
    case ErrorCode::IntegrityFailure: return "INTEGRITY_FAILURE";
    case ErrorCode::Io: return "IO_ERROR";
  }
  return "UNKNOWN";
}

}  // namespace critlab
