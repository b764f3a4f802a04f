#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace charkern::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUnknownCommand = 1;
inline constexpr int kExitParse = 2;
inline constexpr int kExitSpaceMismatch = 3;
inline constexpr int kExitVerification = 4;
inline constexpr int kExitFailure = 5;

/// Runs one command line (without the program name) and returns its exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Worker count for parallel scoring: CHARKERN_THREADS when set and positive, else the hardware count.
unsigned thread_cap();

}  // namespace charkern::cli
