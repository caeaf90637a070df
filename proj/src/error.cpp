// Copyright 2026 The sdese Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sdese/error.hpp"

namespace sdese {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::shape_mismatch: return "shape mismatch";
    case ErrorCode::domain: return "domain error";
    case ErrorCode::overflow: return "overflow";
    case ErrorCode::singularity: return "singularity";
    case ErrorCode::diverged: return "diverged trajectory";
    case ErrorCode::not_configured: return "not configured";
    case ErrorCode::parse: return "parse error";
    case ErrorCode::io: return "i/o error";
  }
  return "unknown error";
}

const char* token(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::shape_mismatch: return "shape_mismatch";
    case ErrorCode::domain: return "domain";
    case ErrorCode::overflow: return "overflow";
    case ErrorCode::singularity: return "singularity";
    case ErrorCode::diverged: return "diverged";
    case ErrorCode::not_configured: return "not_configured";
    case ErrorCode::parse: return "parse";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace sdese
