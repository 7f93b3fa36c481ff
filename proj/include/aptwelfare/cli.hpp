#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace aptw::cli {

// Exit codes: 0 success, 1 negative analysis verdict, 2 input error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerdict = 1;
inline constexpr int kExitInput = 2;

/// Runs one subcommand. args excludes the program name. JSON goes to out,
/// diagnostics to err.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace aptw::cli
