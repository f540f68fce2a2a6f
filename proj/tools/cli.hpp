#pragma once

// Command-line front end. run_cli takes the arguments after the program name
// and returns the process exit code:
//   0  converged / all checks passed
//   1  numerical failure (non-finite iterate, inner solver out of sweeps)
//   2  iteration budget exhausted
//   3  precondition or validation failure
//   4  I/O, parse or usage error

#include <iosfwd>
#include <string>
#include <vector>

namespace fca::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitMaxIter = 2;
inline constexpr int kExitPrecondition = 3;
inline constexpr int kExitIo = 4;

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fca::cli
