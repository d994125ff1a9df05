#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace sojourn::cli {

using json = nlohmann::json;

enum class FieldType { number, integer, boolean, string, numbers, seed };

struct Field {
    std::string key;
    FieldType type;
    json default_value;
    std::string help;
    std::vector<std::string> choices;  // strings only
};

struct CommandSchema {
    std::string name;
    std::string summary;
    std::vector<Field> fields;

    [[nodiscard]] const Field* find(std::string_view key) const noexcept;
};

[[nodiscard]] std::span<const CommandSchema> command_schemas();
/// Throws ConfigError for an unknown command.
[[nodiscard]] const CommandSchema& schema_for(std::string_view command);

/// Converts command-line or environment text into the field's JSON value.
/// Lists are comma separated ("0,0.2,0.5") or JSON arrays; numbers accept "p/q".
[[nodiscard]] json parse_field_text(const Field& field, std::string_view text);

/// Checks a JSON value against the field type; throws ConfigError naming the field.
void check_field(const Field& field, const json& value);

/// Reads a config file. A run manifest is accepted as well: its "config" object
/// is returned and its command must match `command`.
[[nodiscard]] json load_config_file(const std::string& path, std::string_view command);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Environment variable consulted for a key: SOJOURN_<KEY> in upper case.
[[nodiscard]] std::string env_name(std::string_view key);

struct ResolvedConfig {
    std::string command;
    json values;  // every schema key, fully typed
    bool seed_drawn = false;
};

/// Merges defaults < config file < environment < flags and validates the result.
[[nodiscard]] ResolvedConfig resolve_config(std::string_view command, const json& file_values,
                                            const EnvLookup& env, const std::map<std::string, std::string>& flags);

/// Draws a seed from the operating system's entropy source.
[[nodiscard]] std::uint64_t draw_seed();

}  // namespace sojourn::cli
