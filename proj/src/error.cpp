#include "sdfap/error.hpp"

namespace sdfap {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyPattern: return "EmptyPattern";
    case ErrorCode::MixedNonZeroValues: return "MixedNonZeroValues";
    case ErrorCode::AllZero: return "AllZero";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::DuplicatePort: return "DuplicatePort";
    case ErrorCode::DanglingEdge: return "DanglingEdge";
    case ErrorCode::InconsistentRates: return "InconsistentRates";
    case ErrorCode::UnsupportedExpr: return "UnsupportedExpr";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::Deadlock: return "Deadlock";
    case ErrorCode::HorizonExceeded: return "HorizonExceeded";
    case ErrorCode::PipelineHazard: return "PipelineHazard";
    case ErrorCode::FifoOverflow: return "FifoOverflow";
    case ErrorCode::CapacityMissing: return "CapacityMissing";
    case ErrorCode::NameCollision: return "NameCollision";
    case ErrorCode::UnknownEdge: return "UnknownEdge";
    case ErrorCode::InvalidGraph: return "InvalidGraph";
  }
  return "Unknown";
}

}  // namespace sdfap
