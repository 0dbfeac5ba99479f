#pragma once

#include <ostream>

namespace nmq::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFail = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

/// nmq-reduce <build|check|reduce|compare|bode> [flags]. Returns the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nmq::cli
