// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace reclab {

/// Machine-readable error categories. The CLI maps these onto exit codes.
enum class ErrorCode {
  Domain,          // point outside [0,1)^d, bad parameter value
  Kind,            // operation not defined for this map/model kind
  Overflow,        // |beta|^n would overflow the enumeration guard
  Range,           // parameter outside the range a formula is valid on
  Precondition,    // caller-side precondition violated
  Convergence,     // iterative solver gave up
  Infeasible,      // requested target cannot be reached
  Construction,    // a search (e.g. subshift) ran out of budget
  Validation,      // configuration schema/invariant violation
  Io,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace reclab
