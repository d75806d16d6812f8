#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace bosegas {

/// Parsed command line: either an executable action or an already-decided
/// exit code (help text printed, usage error, ...).  Exit codes: 0 success,
/// 1 numerical failure, 2 usage/configuration error.
struct CliInvocation {
    bool ready = false; // false: exit_code is final, action is empty
    int exit_code = 0;
    std::function<int(std::ostream& out, std::ostream& err)> action;
};

/// Parse argv (without the program name) into an invocation.  Usage errors
/// print to err and yield exit_code 2; --help prints to out with code 0.
CliInvocation parse_and_validate(const std::vector<std::string>& args, std::ostream& out,
                                 std::ostream& err);

/// Run the invocation, mapping exceptions to exit codes 1/2.
int execute(const CliInvocation& invocation, std::ostream& out, std::ostream& err);

/// parse_and_validate + execute.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace bosegas
