// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Exit codes: 0 success, 1 runtime error, 2 usage
// error. Error lines on `err` start with "error:".
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sonotrack::cli {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

/// Environment variable naming the default HRIR manifest.
constexpr const char* kHrirEnv = "SONOTRACK_HRIR_MANIFEST";

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Convenience overload; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace sonotrack::cli
