#pragma once

#include "lrex/cli/config.hpp"
#include "lrex/error.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace lrex {

/// Exit codes, one per owning module.
enum ExitCode : int {
    kExitOk = 0,
    kExitAcceptanceFailed = 1,
    kExitConfig = 2,
    kExitKernel = 3,
    kExitSim = 4,
    kExitOracle = 5,
    kExitSpectral = 6,
    kExitAnalysis = 7,
    kExitIo = 8,
    kExitInternal = 9,
};

int exit_code_for(ErrorCode c);

struct RunResult {
    int exit_code = kExitOk;
    std::vector<std::filesystem::path> files;
};

/// Writes to a temporary sibling then renames over the target. Throws IoError.
void write_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

/// Dispatches on c.mode and writes manifest.txt plus the mode's CSVs under c.out.
/// Module errors propagate as lrex::Error; verify_all failures return kExitAcceptanceFailed.
RunResult run(const ExperimentConfig& c, std::ostream& log);

/// Splits a CSV with a one-line header into named numeric columns. Throws ParseError.
std::vector<double> csv_column(const std::string& csv, const std::string& name);

}  // namespace lrex
