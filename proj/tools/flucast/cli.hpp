// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace flucast::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kDataError = 2;
inline constexpr int kTrainingError = 3;

/// Name of the environment variable holding the default config file path.
inline constexpr const char* kConfigEnv = "FLUCAST_CONFIG";

/// Runs one `flucast <command> ...` invocation. `args` excludes the program
/// name. Reports go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace flucast::cli
