#include "cli/app.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "cli/commands.hpp"
#include "sojourn/errors.hpp"
#include "sojourn/version.hpp"

namespace sojourn::cli {

namespace {

std::string dashed(std::string key) {
    for (auto& ch : key)
        if (ch == '_') ch = '-';
    return key;
}

struct Subcommand {
    const CommandSchema* schema = nullptr;
    CLI::App* app = nullptr;
    std::map<std::string, CLI::Option*> options;
    CLI::Option* config = nullptr;
};

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + path.string() + "'");
    f << text;
    if (!f) throw ConfigError("failed writing '" + path.string() + "'");
}

json stream_description(const ResolvedConfig& cfg) {
    return {{"generator", "philox4x32-10"},
            {"key", "splitmix64(seed) mixed with the estimation purpose"},
            {"counter", "(chunk index, draw index within chunk)"},
            {"chunk_size", cfg.values.at("chunk_size")},
            {"seed", cfg.values.at("seed")},
            {"seed_drawn", cfg.seed_drawn},
            {"worker_independent", true}};
}

int execute(const Subcommand& sub, const EnvLookup& env, std::ostream& out) {
    const auto& name = sub.schema->name;
    json file_values = json::object();
    if (sub.config->count() > 0) file_values = load_config_file(sub.config->as<std::string>(), name);

    std::map<std::string, std::string> flags;
    for (const auto& [key, opt] : sub.options) {
        if (opt->count() == 0) continue;
        const auto& res = opt->results();
        flags[key] = res.empty() || res.back().empty() ? std::string("true") : res.back();
    }
    const ResolvedConfig cfg = resolve_config(name, file_values, env, flags);

    const auto t0 = std::chrono::steady_clock::now();
    CommandOutput result = run_command(cfg);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const std::filesystem::path dir = cfg.values.at("out").get<std::string>();
    std::filesystem::create_directories(dir);
    const auto csv_path = dir / (name + ".csv");
    const auto manifest_path = dir / (name + ".manifest.json");

    json manifest = {{"artifact", "sojourn-run"},
                     {"version", kVersionString},
                     {"command", name},
                     {"csv_schema", result.table.schema},
                     {"config", cfg.values},
                     {"stream", stream_description(cfg)},
                     {"wall_time_seconds", wall},
                     {"flags", result.flags},
                     {"notes", result.notes},
                     {"details", result.details},
                     {"outputs", {csv_path.filename().string()}}};
    write_file(csv_path, result.table.to_csv());
    write_file(manifest_path, manifest.dump(2) + "\n");

    out << "wrote " << csv_path.string() << " (" << result.table.rows.size() << " rows) and "
        << manifest_path.string() << "\n";
    for (const auto& f : result.flags) out << "flag: " << f << "\n";
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, const EnvLookup& env, std::ostream& out, std::ostream& err) {
    CLI::App app{"sojourn: sojourn-time constants and conditional sojourn experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersionString));
    app.footer("Every field FOO can also be set with the environment variable SOJOURN_FOO.\n"
               "Precedence: defaults < --config file < environment < flags.");

    std::vector<Subcommand> subs;
    for (const auto& schema : command_schemas()) {
        Subcommand s;
        s.schema = &schema;
        s.app = app.add_subcommand(schema.name, schema.summary);
        s.config = s.app->add_option("--config")->description("JSON config file or a previous run manifest");
        for (const auto& field : schema.fields) {
            std::string help = field.help;
            if (!field.default_value.is_null()) help += " [default: " + field.default_value.dump() + "]";
            auto* opt = s.app->add_option("--" + dashed(field.key))->description(help);
            if (field.type == FieldType::boolean) opt->expected(0, 1);
            s.options[field.key] = opt;
        }
        subs.push_back(std::move(s));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    try {
        for (const auto& s : subs)
            if (s.app->parsed()) return execute(s, env, out);
        err << "no subcommand\n";
        return 2;
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const nlohmann::json::exception& e) {
        err << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

int run_cli(int argc, const char* const* argv) {
    const EnvLookup env = [](const std::string& name) -> std::optional<std::string> {
        if (const char* v = std::getenv(name.c_str())) return std::string(v);
        return std::nullopt;
    };
    return run_cli(argc, argv, env, std::cout, std::cerr);
}

}  // namespace sojourn::cli
