#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace depot3d::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kInvalid = 1;  // validation failure, bad usage, bad field or value
inline constexpr int kIoError = 2;  // file system or network trouble

/// Runs one depot3d command. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace depot3d::cli
