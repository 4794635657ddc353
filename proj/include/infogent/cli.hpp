#pragma once

#include <iosfwd>

namespace infogent {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFailure = 2;

/// Entry point of the `infogent` tool. Output goes to `out` and `err` so the
/// commands can be exercised in-process.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace infogent
