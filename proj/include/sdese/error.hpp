// Copyright 2026 The sdese Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <stdexcept>
#include <string>

namespace sdese {

// Numeric values are mirrored by sdese_status in sdese.h.
enum class ErrorCode : int {
  invalid_argument = 1,
  shape_mismatch = 2,
  domain = 3,
  overflow = 4,
  singularity = 5,
  diverged = 6,
  not_configured = 7,
  parse = 8,
  io = 9,
};

const char* to_string(ErrorCode code) noexcept;
// snake_case identifier, e.g. "not_configured".
const char* token(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by the reverse solver when the score returns non-finite values.
class DivergedError : public Error {
 public:
  DivergedError(double t, const std::string& what)
      : Error(ErrorCode::diverged, what), t_(t) {}
  double time() const noexcept { return t_; }

 private:
  double t_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

inline void require(bool cond, ErrorCode code, const char* what) {
  if (!cond) fail(code, what);
}

}  // namespace sdese
