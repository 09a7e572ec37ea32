#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"

namespace odtqc {

const std::vector<std::string>& command_names();
std::string usage_text();

// Runs one subcommand. Returns 0 on success, 1 on validation errors (bad
// arguments or configuration), 2 on I/O errors. Diagnostics go to `err`,
// progress and results to `out`.
int run_command(const std::string& name, const RunConfig& config, std::ostream& out, std::ostream& err);

// Same as run_command but lets errors propagate.
void dispatch_command(const std::string& name, const RunConfig& config, std::ostream& out);

}  // namespace odtqc
