#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace lesionkit::cli {

/// Exit codes: 0 success, 1 some cohort cases failed, 2 usage or input error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitPartial = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand (fuse, eval, phantom, report). `args` excludes the
/// program name. Errors are reported on `err` as "error: <code>: <detail>".
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lesionkit::cli
