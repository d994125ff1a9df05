#include "cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>

#include "sojourn/errors.hpp"

namespace sojourn::cli {

namespace {

Field num(std::string key, double def, std::string help) {
    return {std::move(key), FieldType::number, def, std::move(help), {}};
}
Field integer(std::string key, std::int64_t def, std::string help) {
    return {std::move(key), FieldType::integer, def, std::move(help), {}};
}
Field flag(std::string key, bool def, std::string help) {
    return {std::move(key), FieldType::boolean, def, std::move(help), {}};
}
Field nums(std::string key, std::vector<double> def, std::string help) {
    return {std::move(key), FieldType::numbers, def, std::move(help), {}};
}
Field choice(std::string key, std::string def, std::vector<std::string> choices, std::string help) {
    return {std::move(key), FieldType::string, def, std::move(help), std::move(choices)};
}

std::vector<Field> common(std::int64_t chunk_default) {
    return {
        {"seed", FieldType::seed, nullptr, "64-bit run seed; drawn and recorded when absent", {}},
        integer("workers", 1, "worker threads (0: all cores); never changes results"),
        {"out", FieldType::string, "sojourn-out", "output directory", {}},
        integer("chunk_size", chunk_default, "samples per RNG chunk (0: about 100 chunks)"),
    };
}

std::vector<Field> concat(std::vector<Field> a, std::vector<Field> b) {
    a.insert(a.end(), std::make_move_iterator(b.begin()), std::make_move_iterator(b.end()));
    return a;
}

std::vector<CommandSchema> build_schemas() {
    std::vector<CommandSchema> s;
    s.push_back({"estimate-constant", "Monte Carlo estimate of a Berman-type constant",
                 concat(common(0),
                        {
                            choice("family", "berman1d",
                                   {"berman1d", "berman1d-limit", "pickands", "berman2d", "berman2d-limit", "bhat"},
                                   "which constant to estimate"),
                            num("alpha", 1.0, "alpha (first axis)"),
                            num("alpha2", 1.0, "alpha of the second axis (2d families)"),
                            nums("alphas", {1.0, 1.0}, "alpha_1..alpha_m (bhat)"),
                            num("drift_b", 0.0, "drift coefficient b of h(t) = b |t|^beta"),
                            num("drift_beta", 1.0, "drift exponent beta"),
                            num("drift2_b", 0.0, "second-axis drift coefficient"),
                            num("drift2_beta", 1.0, "second-axis drift exponent"),
                            nums("x", {0.0}, "sojourn thresholds x"),
                            nums("interval", {0.0, 1.0}, "interval lo,hi (berman1d)"),
                            num("S", 1.0, "domain size S (berman2d)"),
                            nums("schedule", {4.0, 8.0, 16.0}, "S (or n_2..n_m) schedule for limits"),
                            num("n1", 2.0, "first-axis interval length (bhat)"),
                            num("grid_step", 1.0 / 64.0, "grid step in local units"),
                            integer("n_samples", 10000, "Monte Carlo samples (per S for limits)"),
                            choice("sampler", "tilted", {"tilted", "plain"}, "per-sample estimator"),
                            flag("antithetic", false, "average each path with its negation"),
                            flag("refine_check", false, "rerun at half the grid step and flag a shift"),
                        })});
    s.push_back({"run-experiment", "Conditional sojourn distribution against its limit",
                 concat(common(2000),
                        {
                            choice("family", "chi", {"stationary1d", "stationary2d", "onepoint2d", "chi", "queue"},
                                   "experiment family"),
                            num("a", 1.0, "a (a1)"),
                            num("alpha", 1.0, "alpha (alpha1)"),
                            num("a2", 1.0, "a2"),
                            num("alpha2", 1.0, "alpha2"),
                            num("b1", 1.0, "variance decay b1 (onepoint2d)"),
                            num("b2", 1.0, "variance decay b2 (onepoint2d)"),
                            num("beta1", 2.0, "variance exponent beta1 (onepoint2d)"),
                            num("beta2", 2.0, "variance exponent beta2 (onepoint2d)"),
                            integer("m", 1, "chi degree"),
                            num("c", 1.0, "queue drift c"),
                            choice("queue_case", "bounded", {"bounded", "growing"}, "queue window regime"),
                            num("horizon_mult", 5.0, "queue lookahead in units of tau* u"),
                            num("T1", 2.0, "domain size (first axis; queue: window in units of v(u))"),
                            num("T2", 2.0, "domain size (second axis)"),
                            num("delta", 0.05, "grid step in units of the local scale"),
                            nums("levels", {2.5, 3.0, 3.5}, "levels u"),
                            nums("x_grid", {0.0, 0.25, 0.5, 1.0, 2.0}, "x values"),
                            integer("n_target_conditioned", 2000, "conditioned replicates per level"),
                            integer("min_conditioned", 500, "below this a level is flagged low-confidence"),
                            integer("max_paths", 5000000, "path budget per level"),
                            integer("target_samples", 20000, "samples per S for the target constant"),
                            nums("target_schedule", {4.0, 8.0, 16.0}, "S schedule for the target constant"),
                            choice("target_sampler", "tilted", {"tilted", "plain"}, "target estimator"),
                        })});
    s.push_back({"double-sum", "Double-sum ratio over block partitions",
                 concat(common(0),
                        {
                            choice("family", "stationary1d", {"stationary1d", "stationary2d"}, "process family"),
                            num("a", 1.0, "a (a1)"),
                            num("alpha", 1.0, "alpha (alpha1)"),
                            num("a2", 1.0, "a2"),
                            num("alpha2", 1.0, "alpha2"),
                            num("u", 3.0, "level u"),
                            num("T", 4.0, "domain [0, T] (per axis)"),
                            nums("n_schedule", {2.0, 4.0, 8.0}, "block sides in local units"),
                            num("delta", 0.05, "grid step in local units"),
                            integer("n_paths", 100000, "simulated paths"),
                            flag("independent_blocks", false, "simulate blocks independently (control)"),
                        })});
    s.push_back({"oracle", "Deterministic alpha = 2 reference values",
                 concat(common(0),
                        {
                            num("alpha", 2.0, "only alpha = 2 has a closed-form oracle"),
                            nums("x", {0.0}, "sojourn thresholds x"),
                            nums("S", {1.0}, "interval lengths S"),
                            integer("order", 200, "Gauss-Legendre nodes per panel"),
                        })});
    s.push_back({"convergence", "Grid, domain and queue-level convergence tables",
                 concat(common(0),
                        {
                            choice("mode", "grid", {"grid", "limit", "queue"}, "which study"),
                            num("alpha", 1.0, "alpha"),
                            nums("x", {0.0}, "sojourn thresholds x"),
                            num("S", 1.0, "interval [0, S] (grid mode)"),
                            nums("grid_steps", {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128}, "grid steps (grid mode)"),
                            nums("schedule", {4.0, 8.0, 16.0}, "S schedule (limit mode)"),
                            num("grid_step", 1.0 / 64.0, "grid step (limit mode)"),
                            integer("n_samples", 10000, "samples per estimate"),
                            choice("sampler", "tilted", {"tilted", "plain"}, "per-sample estimator"),
                            num("c", 1.0, "queue drift c"),
                            nums("levels", {4.0, 6.0, 8.0}, "queue levels u"),
                            num("n", 2.0, "queue window length in units of v(u)"),
                            num("step", 1.0 / 512.0, "queue grid step in units of v(u)"),
                            integer("bhat_samples", 100000, "samples for B_alpha(x, [0, n])"),
                        })});
    return s;
}

std::string trim(std::string_view t) {
    while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front()))) t.remove_prefix(1);
    while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.remove_suffix(1);
    return std::string(t);
}

[[noreturn]] void bad(const Field& f, const std::string& what) {
    throw ConfigError("field '" + f.key + "': " + what);
}

double parse_number(const Field& f, std::string_view text) {
    const std::string t = trim(text);
    const auto slash = t.find('/');
    if (slash != std::string::npos) {
        Field part = f;
        const double p = parse_number(part, std::string_view(t).substr(0, slash));
        const double q = parse_number(part, std::string_view(t).substr(slash + 1));
        if (q == 0.0) bad(f, "division by zero in '" + t + "'");
        return p / q;
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) bad(f, "expected a number, got '" + t + "'");
    return v;
}

}  // namespace

const Field* CommandSchema::find(std::string_view key) const noexcept {
    for (const auto& f : fields)
        if (f.key == key) return &f;
    return nullptr;
}

std::span<const CommandSchema> command_schemas() {
    static const std::vector<CommandSchema> schemas = build_schemas();
    return schemas;
}

const CommandSchema& schema_for(std::string_view command) {
    for (const auto& s : command_schemas())
        if (s.name == command) return s;
    throw ConfigError("unknown command '" + std::string(command) + "'");
}

json parse_field_text(const Field& f, std::string_view text) {
    const std::string t = trim(text);
    switch (f.type) {
        case FieldType::number:
            return parse_number(f, t);
        case FieldType::integer: {
            std::int64_t v = 0;
            const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
            if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
                bad(f, "expected an integer, got '" + t + "'");
            return v;
        }
        case FieldType::seed: {
            if (t == "auto" || t == "null") return nullptr;
            std::uint64_t v = 0;
            const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
            if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
                bad(f, "expected an unsigned 64-bit integer, got '" + t + "'");
            return v;
        }
        case FieldType::boolean:
            if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
            if (t == "false" || t == "0" || t == "no" || t == "off") return false;
            bad(f, "expected true or false, got '" + t + "'");
        case FieldType::string:
            return t;
        case FieldType::numbers: {
            if (!t.empty() && t.front() == '[') {
                json j;
                try {
                    j = json::parse(t);
                } catch (const json::exception&) {
                    bad(f, "malformed list '" + t + "'");
                }
                check_field(f, j);
                return j;
            }
            json arr = json::array();
            std::string_view rest = t;
            while (true) {
                const auto comma = rest.find(',');
                arr.push_back(parse_number(f, rest.substr(0, comma)));
                if (comma == std::string_view::npos) break;
                rest.remove_prefix(comma + 1);
            }
            return arr;
        }
    }
    bad(f, "unsupported type");
}

void check_field(const Field& f, const json& v) {
    switch (f.type) {
        case FieldType::number:
            if (!v.is_number() || !std::isfinite(v.get<double>())) bad(f, "expected a finite number");
            return;
        case FieldType::integer:
            if (!v.is_number_integer()) bad(f, "expected an integer");
            if (v.get<std::int64_t>() < 0) bad(f, "must be >= 0");
            return;
        case FieldType::seed:
            if (!v.is_null() && !v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
                bad(f, "expected an unsigned 64-bit integer or null");
            return;
        case FieldType::boolean:
            if (!v.is_boolean()) bad(f, "expected a boolean");
            return;
        case FieldType::string:
            if (!v.is_string()) bad(f, "expected a string");
            if (!f.choices.empty() &&
                std::find(f.choices.begin(), f.choices.end(), v.get<std::string>()) == f.choices.end()) {
                std::string list;
                for (const auto& c : f.choices) list += (list.empty() ? "" : ", ") + c;
                bad(f, "'" + v.get<std::string>() + "' is not one of {" + list + "}");
            }
            return;
        case FieldType::numbers:
            if (!v.is_array() || v.empty()) bad(f, "expected a non-empty list of numbers");
            for (const auto& e : v)
                if (!e.is_number() || !std::isfinite(e.get<double>())) bad(f, "expected a list of finite numbers");
            return;
    }
}

json load_config_file(const std::string& path, std::string_view command) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config file '" + path + "' must hold a JSON object");
    if (j.contains("config") && j.contains("command")) {
        if (j["command"] != command)
            throw ConfigError("manifest '" + path + "' was written by '" + j["command"].get<std::string>() +
                              "', not '" + std::string(command) + "'");
        j = j["config"];
    }
    return j;
}

std::string env_name(std::string_view key) {
    std::string name = "SOJOURN_";
    for (char ch : key) name += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    return name;
}

std::uint64_t draw_seed() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

ResolvedConfig resolve_config(std::string_view command, const json& file_values, const EnvLookup& env,
                              const std::map<std::string, std::string>& flags) {
    const auto& schema = schema_for(command);
    ResolvedConfig rc;
    rc.command = schema.name;
    rc.values = json::object();
    for (const auto& f : schema.fields) rc.values[f.key] = f.default_value;

    if (!file_values.is_null()) {
        for (const auto& [key, value] : file_values.items()) {
            const Field* f = schema.find(key);
            if (!f) throw ConfigError("field '" + key + "': unknown for command '" + schema.name + "'");
            check_field(*f, value);
            rc.values[key] = value;
        }
    }
    if (env) {
        for (const auto& f : schema.fields)
            if (auto text = env(env_name(f.key))) rc.values[f.key] = parse_field_text(f, *text);
    }
    for (const auto& [key, text] : flags) {
        const Field* f = schema.find(key);
        if (!f) throw ConfigError("field '" + key + "': unknown for command '" + schema.name + "'");
        rc.values[key] = parse_field_text(*f, text);
    }
    for (const auto& f : schema.fields) check_field(f, rc.values[f.key]);
    if (rc.values["seed"].is_null()) {
        rc.values["seed"] = draw_seed();
        rc.seed_drawn = true;
    }
    return rc;
}

}  // namespace sojourn::cli
