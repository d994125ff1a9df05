#pragma once

#include <string>
#include <vector>

#include "cli/config.hpp"

namespace sojourn::cli {

struct Table {
    std::string schema;  // e.g. "estimate-constant/v1"
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    [[nodiscard]] std::string to_csv() const;
};

struct CommandOutput {
    Table table;
    json details = json::object();  // command-specific manifest section
    std::vector<std::string> flags;
    std::vector<std::string> notes;
};

/// Runs a fully resolved command. Throws ConfigError / NumericError from the core.
[[nodiscard]] CommandOutput run_command(const ResolvedConfig& config);

/// Fixed-precision text for CSV cells (stable across runs and platforms).
[[nodiscard]] std::string format_number(double v);

}  // namespace sojourn::cli
