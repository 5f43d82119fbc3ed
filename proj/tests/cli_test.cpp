#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fairmapf/cli.hpp"

using namespace fairmapf;

namespace {

std::string data(const std::string& name) { return std::string(FAIRMAPF_TEST_DATA) + "/" + name; }

struct Run
{
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args)
{
    args.insert(args.begin(), "fairmapf");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Cli, SolveCrossing)
{
    const auto r = run({"solve", "--map", data("crossing-2-2.map"), "--scen", data("crossing-2-2.scen"), "--agents", "2",
                        "--epsilon", "1", "--algo", "both"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = Json::parse(r.out);
    ASSERT_EQ(doc["results"].size(), 2u);
    EXPECT_EQ(doc["results"][0]["status"], "solved");
    EXPECT_NEAR(doc["results"][0]["social_welfare"].get<double>(), doc["results"][1]["social_welfare"].get<double>(),
                1e-9);
}

TEST(Cli, SolveNoFairPlan)
{
    const auto r = run({"solve", "--map", data("corridor-1-3.map"), "--scen", data("corridor-1-3.scen"), "--agents", "2",
                        "--max-steps", "6"});
    EXPECT_EQ(r.code, 2) << r.err;
    EXPECT_EQ(Json::parse(r.out)["plan"], nullptr);
}

TEST(Cli, SolveWithoutRuntimeIsReproducible)
{
    const std::vector<std::string> args{"solve", "--map", data("empty-16-16.map"), "--agents", "3", "--seed", "5",
                                        "--no-runtime"};
    const auto a = run(args), b = run(args);
    EXPECT_EQ(a.code, b.code);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.out.find("runtime"), std::string::npos);
}

TEST(Cli, UsageErrors)
{
    EXPECT_EQ(run({"solve"}).code, 1);
    EXPECT_EQ(run({"solve", "--map", data("does-not-exist.map")}).code, 1);
    EXPECT_EQ(run({"frobnicate"}).code, 1);
    EXPECT_EQ(run({"solve", "--map", data("bad-char.map")}).code, 1);
    EXPECT_EQ(run({"solve", "--map", data("empty-16-16.map"), "--fairness", "envy,zen"}).code, 1);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, ParseErrorNamesLine)
{
    const auto r = run({"solve", "--map", data("bad-row-length.map")});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("line 6"), std::string::npos) << r.err;
}

TEST(Cli, MechanismFixtureIsFlagged)
{
    const auto r = run({"mechanism", "--fixture", "non-monotone"});
    EXPECT_EQ(r.code, 4);
    const auto doc = Json::parse(r.out);
    EXPECT_NEAR(doc["outcome"]["critical_values"][0].get<double>(), 0.1, 1e-6);
    EXPECT_NEAR(doc["outcome"]["payments"][0].get<double>(), 0.2, 1e-6);
    EXPECT_EQ(doc["outcome"]["payments"][1], nullptr);
    EXPECT_EQ(doc["report"]["monotonicity_violations"], 1);
}

TEST(Cli, MechanismOnSolvedInstance)
{
    const auto r = run({"mechanism", "--map", data("crossing-2-2.map"), "--scen", data("crossing-2-2.scen"), "--agents",
                        "2", "--epsilon", "1"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(Json::parse(r.out)["report"]["ir_violations"], 0);
}

TEST(Cli, OracleCheck)
{
    const auto r = run({"oracle-check", "--instances", "20", "--max-steps", "5"});
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_TRUE(Json::parse(r.out)["mismatches"].empty());
}

TEST(Cli, BenchCsvWithSummary)
{
    const auto dir = std::filesystem::temp_directory_path() / "fairmapf_cli_test";
    std::filesystem::create_directories(dir);
    const auto csv = dir / "b.csv";
    const std::vector<std::string> args{"bench", "--map", data("empty-16-16.map"), "--agents", "2,3", "--epsilons",
                                        "0.5", "--runs", "3", "--time-limit", "30", "--out", csv.string()};
    ASSERT_EQ(run(args).code, 0);
    const std::string text = slurp(csv);
    EXPECT_EQ(text.rfind(std::string(kCsvHeader) + "\n", 0), 0u);
    std::size_t lines = 0;
    for (char c : text) lines += c == '\n';
    EXPECT_EQ(lines, 1u + 2u * 2u * 3u);
    const auto side = Json::parse(slurp(csv.string() + ".summary.json"));
    EXPECT_EQ(side["summary"].size(), 4u);
    EXPECT_FALSE(side["plots"].empty());
    std::filesystem::remove_all(dir);
}

TEST(Cli, ConfigFile)
{
    const auto dir = std::filesystem::temp_directory_path() / "fairmapf_cli_cfg";
    std::filesystem::create_directories(dir);
    const auto cfg = dir / "solve.toml";
    {
        std::ofstream f(cfg);
        f << "[solve]\nmap = \"" << data("crossing-2-2.map") << "\"\nscen = \"" << data("crossing-2-2.scen")
          << "\"\nagents = 2\nepsilon = 1\n";
    }
    const auto r = run({"--config", cfg.string(), "solve"});
    EXPECT_EQ(r.code, 0) << r.err;
    std::filesystem::remove_all(dir);
}
