#pragma once

#include <stdexcept>
#include <string>

namespace bairext {

// Numeric values are part of the C ABI (see bairext.h); do not renumber.
enum class ErrorCode : int {
  ok = 0,
  config = 1,
  invalid_input = 2,
  not_covered = 3,
  refinement_failure = 4,
  undecided = 5,
  missing_certificate = 6,
  misuse = 7,
  unknown_scenario = 8,
  io = 9,
  internal = 10,
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

const char* error_code_name(ErrorCode code) noexcept;

} // namespace bairext
