#pragma once

#include <stdexcept>
#include <string>

namespace squidget {

enum class ErrorKind {
  kDegenerateCurve,
  kCountMismatch,
  kRankDeficient,
  kUnknownAttribute,
  kRangeViolation,
  kUnknownObject,
  kUnboundedAttribute,
  kNotAConnectGesture,
  kOutsideCanvas,
  kCycle,
  kDuplicateId,
  kInvalidArgument,
  kParse,
  kVersion,
  kMalformedLog,
};

/// Domain error raised by every module; `kind()` is stable, the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace squidget
