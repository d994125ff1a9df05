#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli/app.hpp"
#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "sojourn/errors.hpp"

namespace sojourn::cli {
namespace {

namespace fs = std::filesystem;

const EnvLookup kNoEnv = [](const std::string&) -> std::optional<std::string> { return std::nullopt; };

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args, const EnvLookup& env = kNoEnv) {
    args.insert(args.begin(), "sojourn");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), env, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("sojourn_cli_test_" + name);
    fs::remove_all(p);
    return p;
}

TEST(Config, DefaultsAndFlags) {
    const auto rc = resolve_config("oracle", json::object(), kNoEnv, {{"x", "0,1/4,0.5"}, {"seed", "9"}});
    EXPECT_EQ(rc.values["x"], json({0.0, 0.25, 0.5}));
    EXPECT_EQ(rc.values["seed"], 9u);
    EXPECT_FALSE(rc.seed_drawn);
    EXPECT_EQ(rc.values["order"], 200);
}

TEST(Config, PrecedenceFileEnvFlag) {
    const json file = {{"order", 10}, {"alpha", 2.0}};
    const EnvLookup env = [](const std::string& n) -> std::optional<std::string> {
        if (n == "SOJOURN_ORDER") return std::string("20");
        return std::nullopt;
    };
    EXPECT_EQ(resolve_config("oracle", file, kNoEnv, {}).values["order"], 10);
    EXPECT_EQ(resolve_config("oracle", file, env, {}).values["order"], 20);
    EXPECT_EQ(resolve_config("oracle", file, env, {{"order", "30"}}).values["order"], 30);
}

TEST(Config, SeedIsDrawnAndRecorded) {
    const auto rc = resolve_config("oracle", json::object(), kNoEnv, {});
    EXPECT_TRUE(rc.seed_drawn);
    EXPECT_TRUE(rc.values["seed"].is_number_unsigned());
}

TEST(Config, UnknownFieldIsAnError) {
    EXPECT_THROW((void)resolve_config("oracle", json{{"bogus", 1}}, kNoEnv, {}), ConfigError);
    EXPECT_THROW((void)resolve_config("oracle", json::object(), kNoEnv, {{"bogus", "1"}}), ConfigError);
}

TEST(Config, TypeErrorsNameTheField) {
    try {
        (void)resolve_config("estimate-constant", json::object(), kNoEnv, {{"n_samples", "many"}});
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("n_samples"), std::string::npos);
    }
    EXPECT_THROW((void)resolve_config("estimate-constant", json::object(), kNoEnv, {{"sampler", "fancy"}}),
                 ConfigError);
    EXPECT_THROW((void)resolve_config("oracle", json{{"x", json::array()}}, kNoEnv, {}), ConfigError);
}

TEST(Config, EnvNames) { EXPECT_EQ(env_name("n_samples"), "SOJOURN_N_SAMPLES"); }

TEST(Cli, OracleWritesCsvAndManifest) {
    const auto dir = scratch("oracle");
    const auto r = run({"oracle", "--x", "0", "--S", "1", "--seed", "1", "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(slurp(dir / "oracle.csv"), "x,S,value\n0,1,1.56418958355\n");
    const auto m = json::parse(slurp(dir / "oracle.manifest.json"));
    EXPECT_EQ(m["command"], "oracle");
    EXPECT_EQ(m["csv_schema"], "oracle/v1");
    EXPECT_EQ(m["config"]["seed"], 1u);
    EXPECT_EQ(m["stream"]["generator"], "philox4x32-10");
}

TEST(Cli, OracleAtXEqualSIsZero) {
    const auto dir = scratch("oracle_zero");
    ASSERT_EQ(run({"oracle", "--x", "1", "--S", "1", "--seed", "1", "--out", dir.string()}).code, 0);
    EXPECT_EQ(slurp(dir / "oracle.csv"), "x,S,value\n1,1,0\n");
}

TEST(Cli, OracleWithoutClosedFormIsAConfigError) {
    const auto r = run({"oracle", "--alpha", "1", "--out", scratch("oracle_a1").string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("no closed-form oracle; use --family brownian-sup checks"), std::string::npos);
}

TEST(Cli, ParseErrorsExitWithTwo) {
    EXPECT_EQ(run({"oracle", "--no-such-flag", "1"}).code, 2);
    EXPECT_EQ(run({"nonsense"}).code, 2);
    EXPECT_EQ(run({"estimate-constant", "--n-samples", "-3"}).code, 2);
}

TEST(Cli, DegenerateScheduleIsAConfigError) {
    const auto r = run({"estimate-constant", "--family", "pickands", "--schedule", "4,4,4", "--n-samples", "200",
                        "--seed", "1", "--out", scratch("schedule").string()});
    EXPECT_EQ(r.code, 2) << r.err;
}

TEST(Cli, EnvironmentOverridesDefaults) {
    const auto dir = scratch("env");
    const EnvLookup env = [&](const std::string& n) -> std::optional<std::string> {
        if (n == "SOJOURN_S") return std::string("2");
        if (n == "SOJOURN_OUT") return dir.string();
        return std::nullopt;
    };
    ASSERT_EQ(run({"oracle", "--seed", "1"}, env).code, 0);
    EXPECT_EQ(slurp(dir / "oracle.csv"), "x,S,value\n0,2,2.1283791671\n");
}

TEST(Cli, RerunFromManifestIsByteIdentical) {
    const auto a = scratch("rerun_a"), b = scratch("rerun_b");
    ASSERT_EQ(run({"estimate-constant", "--family", "berman1d", "--alpha", "1.5", "--x", "0,0.3", "--n-samples",
                   "600", "--seed", "42", "--out", a.string()})
                  .code,
              0);
    ASSERT_EQ(run({"estimate-constant", "--config", (a / "estimate-constant.manifest.json").string(), "--workers",
                   "3", "--out", b.string()})
                  .code,
              0);
    EXPECT_EQ(slurp(a / "estimate-constant.csv"), slurp(b / "estimate-constant.csv"));
}

TEST(Cli, ManifestOfAnotherCommandIsRejected) {
    const auto a = scratch("wrong_cmd");
    ASSERT_EQ(run({"oracle", "--seed", "1", "--out", a.string()}).code, 0);
    EXPECT_EQ(run({"double-sum", "--config", (a / "oracle.manifest.json").string()}).code, 2);
}

TEST(Table, CsvFormatting) {
    Table t{"x/v1", {"a", "b"}, {{"1", "2"}, {"3", "4"}}};
    EXPECT_EQ(t.to_csv(), "a,b\n1,2\n3,4\n");
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
}

}  // namespace
}  // namespace sojourn::cli
