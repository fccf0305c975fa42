/**
 * @file cli.hpp
 * @brief `palm` command-line driver
 *
 * Exit codes: 0 success, 1 usage error, 2 runtime error.
 */
#pragma once

#include <iosfwd>

namespace palm {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace palm
