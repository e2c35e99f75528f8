#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace noisyspell::cli {

/// Runs one subcommand. `args` excludes the program name. Returns the
/// process exit status.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

} // namespace noisyspell::cli
