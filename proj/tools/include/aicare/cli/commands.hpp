#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace aicare::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand. `args` excludes the program name. Usage errors print
/// the usage text to `err` and return kExitUsage; runtime errors print
/// "error: ..." and return kExitFailure.
///
/// Subcommands: gen-synth, preprocess, train, calibrate, evaluate, popstats,
/// serve. Every artifact-producing subcommand writes manifest.json next to
/// its outputs.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace aicare::cli
