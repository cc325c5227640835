#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace critlab {

enum class ErrorCode {
  InvalidArgument,
  Sizing,
  DisconnectedSubset,
  DegenerateProfile,
  DegenerateClass,
  ConvergenceFailure,
  EllipticityFailure,
  ConstantField,
  LoopExitsDomain,
  LoopThroughZero,
  LevelOutOfRange,
  SplitLevels,
  PointOutsideDomain,
  IntegrityFailure,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-readable code alongside the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

  ErrorCode code() const noexcept { return code_; }
  /// Message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

/// Newton did not reach the tolerance; keeps the residual history.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> history)
      : Error(ErrorCode::ConvergenceFailure, what), history_(std::move(history)) {}

  const std::vector<double>& history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

}  // namespace critlab
