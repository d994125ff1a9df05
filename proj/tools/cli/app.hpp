#pragma once

#include <iosfwd>

#include "cli/config.hpp"

namespace sojourn::cli {

/// Parses argv, runs one subcommand and writes <out>/<command>.csv with
/// <out>/<command>.manifest.json. Returns the process exit code:
/// 0 ok, 1 unexpected failure, 2 configuration error, 3 numeric failure.
int run_cli(int argc, const char* const* argv, const EnvLookup& env, std::ostream& out, std::ostream& err);

/// Same with the process environment.
int run_cli(int argc, const char* const* argv);

}  // namespace sojourn::cli
