#pragma once

#include <iosfwd>
#include <stdexcept>

namespace sevrank::cli {

/// Bad invocation detected after flag parsing; maps to exit code 2.
class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Entry point for `sevrank <command> [flags]`. Never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sevrank::cli
