#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "fairmapf/bench.hpp"
#include "fairmapf/json_io.hpp"

using namespace fairmapf;

namespace {

BenchRecord record(SolveStatus s, double runtime, double sw = std::nan(""))
{
    BenchRecord r;
    r.map = "m";
    r.algorithm = "icts";
    r.agents = 2;
    r.epsilon = 0.5;
    r.status = s;
    r.runtime_s = runtime;
    r.social_welfare = sw;
    return r;
}

BenchConfig small_config()
{
    BenchConfig c;
    c.map_name = "empty-16-16";
    c.map = load_map(std::string(FAIRMAPF_TEST_DATA) + "/empty-16-16.map");
    c.agent_counts = {2, 3};
    c.epsilons = {0.2, 1.0};
    c.runs = 4;
    c.time_limit_s = 30.0;
    return c;
}

std::string csv_without_runtime(const std::vector<BenchRecord>& rs)
{
    auto copy = rs;
    for (auto& r : copy) r.runtime_s = 0.0;
    std::ostringstream os;
    write_csv(os, copy);
    return os.str();
}

}  // namespace

TEST(Summarize, SuccessFraction)
{
    const std::vector<BenchRecord> rs{record(SolveStatus::Solved, 1.0, 0.5), record(SolveStatus::Solved, 2.0, 0.7),
                                      record(SolveStatus::Solved, 3.0, 0.9), record(SolveStatus::NoFairPlan, 4.0)};
    const auto rows = summarize(rs);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_DOUBLE_EQ(rows[0].success_fraction, 0.75);
    EXPECT_DOUBLE_EQ(rows[0].mean_runtime_s, 2.5);
    EXPECT_DOUBLE_EQ(rows[0].median_runtime_s, 2.5);
    EXPECT_DOUBLE_EQ(rows[0].mean_runtime_solved_s, 2.0);
    EXPECT_NEAR(rows[0].mean_social_welfare_solved, 0.7, 1e-12);
}

TEST(Summarize, AllTimeouts)
{
    const std::vector<BenchRecord> rs{record(SolveStatus::Timeout, 10.0), record(SolveStatus::Timeout, 10.0)};
    const auto rows = summarize(rs);
    EXPECT_EQ(rows[0].success_fraction, 0.0);
    EXPECT_EQ(rows[0].mean_runtime_s, 10.0);
    EXPECT_TRUE(std::isnan(rows[0].mean_runtime_solved_s));
    EXPECT_THROW(summarize({}), ContractViolation);
}

TEST(RunOne, TimeoutRecordsTheLimit)
{
    BenchConfig c = small_config();
    c.time_limit_s = 1e-9;
    const auto r = run_one(c, "icts", 3, 0.0, 0);
    if (r.status == SolveStatus::Timeout) {
        EXPECT_EQ(r.runtime_s, c.time_limit_s);
    }
}

TEST(Validate, RejectsBadConfigs)
{
    BenchConfig c = small_config();
    c.runs = 0;
    EXPECT_THROW(validate(c), ContractViolation);
    c = small_config();
    c.algorithms = {"astar"};
    EXPECT_THROW(validate(c), ContractViolation);
    c = small_config();
    c.epsilons = {-1.0};
    EXPECT_THROW(validate(c), ContractViolation);
}

TEST(RunBenchmark, SharedInstancesAcrossEpsilonAndAlgorithm)
{
    EXPECT_EQ(instance_seed(1, 4, 3), instance_seed(1, 4, 3));
    EXPECT_NE(instance_seed(1, 4, 3), instance_seed(1, 4, 2));
    const auto rs = run_benchmark(small_config());
    ASSERT_EQ(rs.size(), 2u * 2u * 2u * 4u);
    // Agreement between solvers on solved runs.
    for (std::size_t i = 0; i < rs.size() / 2; ++i) {
        const auto& a = rs[i];
        const auto& b = rs[i + rs.size() / 2];
        ASSERT_EQ(a.agents, b.agents);
        ASSERT_EQ(a.run, b.run);
        if (a.status == SolveStatus::Solved && b.status == SolveStatus::Solved) {
            EXPECT_NEAR(a.social_welfare, b.social_welfare, 1e-9);
        }
    }
}

TEST(RunBenchmark, DeterministicModuloRuntime)
{
    BenchConfig c = small_config();
    const auto a = run_benchmark(c);
    c.workers = 3;
    const auto b = run_benchmark(c);
    EXPECT_EQ(csv_without_runtime(a), csv_without_runtime(b));
    EXPECT_EQ(bench_document(a, false)["records"].dump(), bench_document(b, false)["records"].dump());
}

TEST(WriteCsv, HeaderAndEmptyFields)
{
    std::ostringstream os;
    write_csv(os, {record(SolveStatus::NoFairPlan, 0.25)});
    EXPECT_EQ(os.str(), std::string(kCsvHeader) + "\nm,icts,2,0.5,0,no-fair-plan,0.250000,,\n");
}

TEST(PlotData, OnePanelSeriesPerGroup)
{
    std::vector<BenchRecord> rs;
    for (int agents : {2, 4}) {
        auto r = record(SolveStatus::Solved, 1.0, 1.0);
        r.agents = agents;
        rs.push_back(r);
    }
    const auto plots = plot_data(summarize(rs));
    ASSERT_EQ(plots.size(), 6u);
    EXPECT_EQ(plots[0]["panel"], "success_vs_agents");
    EXPECT_EQ(plots[0]["x"].size(), 2u);
}
