#pragma once

#include <stdexcept>
#include <string>

namespace depot3d {

/// Failure raised by any depot3d operation. `code()` is a stable
/// upper-case identifier (e.g. "MALFORMED", "PLY_TRUNCATED") that callers
/// and the HTTP layer switch on; `what()` carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

}  // namespace depot3d
