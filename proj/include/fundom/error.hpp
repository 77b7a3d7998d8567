#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fundom {

enum class ErrorCode {
  InvalidArgument,
  RationalInput,
  NotCertifiable,
  PrecisionExhausted,
  DisjointnessUndecided,
  BudgetExceeded,
  ToleranceNotMet,
  DepthTooLarge,
  ParseError,
};

std::string_view to_string(ErrorCode code);

// All construction failures surface as this exception; the CLI maps the code
// onto an exit status and a machine-readable error object.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fundom
