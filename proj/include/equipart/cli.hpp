#pragma once

// Command-line front end: solve, necklace, bounds, generate, probe, render.
// Exit codes: 0 success (solve: fair), 2 solve ended BestEffort, 1 input or
// other error.

#include <iosfwd>
#include <string>
#include <vector>

namespace equipart {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitBestEffort = 2;

// Results go to --out (or `out` when absent); diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace equipart
