#pragma once

#include <iosfwd>

namespace jggl {

/// Parses argv, runs the selected subcommand and returns the process exit code.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace jggl
