#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace batchlens {

enum class ErrorCode {
  InvalidArgument,
  NotFound,
  NotApplicable,
  OutOfRange,
  ZeroDenominator,
  CorruptBundle,
  MissingTable,
  EmptyTable,
  BadHeader,
  Unreadable,
  InvalidConfig,
};

std::string_view to_string(ErrorCode code);

// Thrown for contract violations and fatal conditions; row-level problems go
// into a ValidationReport instead.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace batchlens
