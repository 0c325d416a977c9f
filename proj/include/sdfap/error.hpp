#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sdfap {

enum class ErrorCode {
  EmptyPattern,
  MixedNonZeroValues,
  AllZero,
  UnknownNode,
  DuplicatePort,
  DanglingEdge,
  InconsistentRates,
  UnsupportedExpr,
  ParseError,
  ShapeMismatch,
  Deadlock,
  HorizonExceeded,
  PipelineHazard,
  FifoOverflow,
  CapacityMissing,
  NameCollision,
  UnknownEdge,
  InvalidGraph,
};

std::string_view to_string(ErrorCode code);

// Domain error carrying a stable code; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

  ErrorCode code() const noexcept { return code_; }
  // Message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace sdfap
