// cli.hpp: Subcommand dispatch for the heatrect executable

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "heatrect/config.hpp"
#include "heatrect/table.hpp"

namespace heatrect {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 1;
inline constexpr int config = 2;
inline constexpr int validation = 3;
inline constexpr int solver = 4;
inline constexpr int io = 5;
} // namespace exit_code

const std::vector<std::string>& subcommands();

struct CommandResult {
    ResultTable table;
    Json report;  // extra JSON content (oracle-check); null otherwise
    std::string trajectory_csv;
};

// Runs one subcommand on a fully resolved configuration. Throws heatrect errors.
CommandResult run_command(const std::string& subcommand, const RunConfig& cfg, unsigned workers, bool progress);

// Full CLI: argument parsing, env overrides, file output, error JSON on `err`. Returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int exit_code_for(ErrorKind kind);

} // namespace heatrect
