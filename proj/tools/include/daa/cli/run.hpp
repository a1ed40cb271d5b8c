#pragma once

#include "daa/cli/config.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace daa::cli {

enum ExitCode : int {
    kSuccess = 0,
    kConfigError = 1,
    kPartialFailure = 2,
    kNumericalFailure = 3,
};

struct RunOutcome {
    int exit_code = kSuccess;
    std::vector<std::filesystem::path> files;
    std::string message;
};

/// Executes one experiment and writes its result table, metadata record and,
/// for 2-D scans, heatmap matrices into config.output.directory. Progress goes to `log`.
RunOutcome run(const RunConfig& config, const Provenance& provenance, std::ostream& log);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_number(double value);

} // namespace daa::cli
