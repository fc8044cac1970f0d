#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace subkb::cli {

/// Runs one subcommand. `args` starts with the subcommand name (argv without
/// the program name). Returns 0 on success, 1 when the command failed and 2
/// for usage errors; diagnostics go to `err` as `error: <module>: <message>`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Names of the registered subcommands, in help order.
std::vector<std::string> subcommand_names();

}  // namespace subkb::cli
