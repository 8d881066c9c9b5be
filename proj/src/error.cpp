#include "bairext/error.hpp"

namespace bairext {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ok: return "ok";
    case ErrorCode::config: return "config";
    case ErrorCode::invalid_input: return "invalid_input";
    case ErrorCode::not_covered: return "not_covered";
    case ErrorCode::refinement_failure: return "refinement_failure";
    case ErrorCode::undecided: return "undecided";
    case ErrorCode::missing_certificate: return "missing_certificate";
    case ErrorCode::misuse: return "misuse";
    case ErrorCode::unknown_scenario: return "unknown_scenario";
    case ErrorCode::io: return "io";
    case ErrorCode::internal: return "internal";
  }
  return "unknown";
}

} // namespace bairext
