// SPDX-License-Identifier: Apache-2.0
#include "reclab/error.hpp"

namespace reclab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Domain: return "domain_error";
    case ErrorCode::Kind: return "kind_error";
    case ErrorCode::Overflow: return "overflow_guard";
    case ErrorCode::Range: return "range_error";
    case ErrorCode::Precondition: return "precondition_error";
    case ErrorCode::Convergence: return "convergence_error";
    case ErrorCode::Infeasible: return "infeasible_error";
    case ErrorCode::Construction: return "construction_failure";
    case ErrorCode::Validation: return "validation_error";
    case ErrorCode::Io: return "io_error";
  }
  return "unknown_error";
}

}  // namespace reclab
