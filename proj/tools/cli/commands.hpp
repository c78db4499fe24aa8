#pragma once

#include <string>
#include <vector>

namespace dissipate::cli {

enum ExitCode : int { kOk = 0, kNotDissipative = 1, kInputError = 2 };

struct CommandResult {
    int exit_code = kOk;
    std::string out;  // rendered report or help text
    std::string err;  // diagnostics
};

/// Parses and runs one command line (without the program name), e.g.
/// {"check", "specs/example1.json", "--p", "3"}.
CommandResult run_command(const std::vector<std::string>& args);

}  // namespace dissipate::cli
