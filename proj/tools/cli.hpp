#pragma once

#include <memory>
#include <ostream>
#include <string>
#include <vector>

namespace CLI {
class App;
}

namespace leosched::cli {

/// Runs one invocation. `args` excludes the program name. Returns the exit
/// status: 0 success, 1 runtime failure or replay mismatch, 2 bad input.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// The full command tree with handlers detached; used to audit the help text.
std::unique_ptr<CLI::App> describe();

}  // namespace leosched::cli
