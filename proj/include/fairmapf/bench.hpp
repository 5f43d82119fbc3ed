#ifndef FAIRMAPF_BENCH_HPP
#define FAIRMAPF_BENCH_HPP

// Repeated randomized solver runs with success-fraction and runtime summaries.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "fairmapf/cbs.hpp"
#include "fairmapf/icts.hpp"
#include "fairmapf/map_io.hpp"
#include "fairmapf/rng.hpp"
#include "fairmapf/solve.hpp"

namespace fairmapf {

/// Benchmarks only need the selected plan, so one plan per step vector is kept.
inline SolveOptions bench_solve_options()
{
    SolveOptions o;
    o.retention = PlanRetention::OnePerStepVector;
    return o;
}

struct BenchConfig
{
    std::string map_name;
    GridGraph map;
    std::vector<int> agent_counts;
    int runs = 25;
    double time_limit_s = 10.0;
    std::vector<double> epsilons{0.5};
    std::vector<std::string> algorithms{"icts", "cbs"};
    std::uint64_t seed = 1;
    unsigned workers = 1;
    SolveOptions solve = bench_solve_options();
};

inline BenchConfig desk_preset()
{
    BenchConfig c;
    c.runs = 25;
    c.time_limit_s = 10.0;
    return c;
}

inline BenchConfig full_preset()
{
    BenchConfig c;
    c.runs = 100;
    c.time_limit_s = 60.0;
    return c;
}

inline void validate(const BenchConfig& c)
{
    if (c.runs < 1) throw ContractViolation("runs must be >= 1");
    if (!(c.time_limit_s > 0)) throw ContractViolation("time limit must be > 0");
    if (c.agent_counts.empty()) throw ContractViolation("agent count list is empty");
    if (c.epsilons.empty()) throw ContractViolation("epsilon list is empty");
    if (c.algorithms.empty()) throw ContractViolation("algorithm list is empty");
    for (int a : c.agent_counts)
        if (a < 1) throw ContractViolation("agent counts must be >= 1");
    for (double e : c.epsilons)
        if (!(e >= 0)) throw ContractViolation("epsilons must be >= 0");
    for (const auto& a : c.algorithms)
        if (a != "icts" && a != "cbs") throw ContractViolation("unknown algorithm '" + a + "'");
}

struct BenchRecord
{
    std::string map;
    std::string algorithm;
    int agents = 0;
    double epsilon = 0.0;
    int run = 0;
    SolveStatus status = SolveStatus::Error;
    double runtime_s = 0.0;
    /// NaN unless solved.
    double social_welfare = std::numeric_limits<double>::quiet_NaN();
    double welfare_spread = std::numeric_limits<double>::quiet_NaN();
    /// Wall clock exceeded the limit by more than 10%.
    bool overrun = false;
};

inline std::uint64_t instance_seed(std::uint64_t base, int agents, int run)
{
    return derive_seed(base, static_cast<std::uint64_t>(agents), static_cast<std::uint64_t>(run));
}

inline SolveResult solve_with(const std::string& algorithm, const InstanceSpec& inst, const SolveOptions& opts)
{
    if (algorithm == "icts") return fair_icts_solve(inst, opts);
    if (algorithm == "cbs") return fair_cbs_solve(inst, opts);
    throw ContractViolation("unknown algorithm '" + algorithm + "'");
}

inline BenchRecord run_one(const BenchConfig& cfg, const std::string& algorithm, int agents, double epsilon, int run)
{
    BenchRecord r;
    r.map = cfg.map_name;
    r.algorithm = algorithm;
    r.agents = agents;
    r.epsilon = epsilon;
    r.run = run;
    SolveOptions opts = cfg.solve;
    opts.limits.time_limit_s = cfg.time_limit_s;
    const Deadline clock(0);
    try {
        InstanceSpec inst;
        inst.map = cfg.map;
        inst.seed = instance_seed(cfg.seed, agents, run);
        inst.epsilon = epsilon;
        inst.agents = sample_agents(cfg.map, agents, inst.seed);
        const SolveResult res = solve_with(algorithm, inst, opts);
        r.status = res.status;
        r.runtime_s = res.stats.runtime_s;
        if (res.status == SolveStatus::Solved) {
            r.social_welfare = res.social_welfare;
            const auto [lo, hi] = std::minmax_element(res.welfare.begin(), res.welfare.end());
            r.welfare_spread = *hi - *lo;
        }
    } catch (const Error&) {
        r.status = SolveStatus::Error;
        r.runtime_s = clock.elapsed();
    }
    r.overrun = clock.elapsed() > 1.1 * cfg.time_limit_s;
    if (r.status == SolveStatus::Timeout) r.runtime_s = cfg.time_limit_s;
    return r;
}

/// One record per (algorithm, agents, epsilon, run) in that order. Instances
/// depend only on (seed, agents, run), so every algorithm and epsilon sees
/// the same instances.
inline std::vector<BenchRecord> run_benchmark(const BenchConfig& cfg)
{
    validate(cfg);
    struct Task
    {
        std::string algorithm;
        int agents;
        double epsilon;
        int run;
    };
    std::vector<Task> tasks;
    for (const auto& alg : cfg.algorithms)
        for (int a : cfg.agent_counts)
            for (double e : cfg.epsilons)
                for (int r = 0; r < cfg.runs; ++r) tasks.push_back({alg, a, e, r});

    std::vector<BenchRecord> records(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            const auto& t = tasks[i];
            records[i] = run_one(cfg, t.algorithm, t.agents, t.epsilon, t.run);
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(cfg.workers, static_cast<unsigned>(tasks.size())));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned k = 0; k < n; ++k) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return records;
}

struct SummaryRow
{
    std::string algorithm;
    int agents = 0;
    double epsilon = 0.0;
    int runs = 0;
    int solved = 0;
    double success_fraction = 0.0;
    double mean_runtime_s = 0.0;
    double median_runtime_s = 0.0;
    /// NaN when nothing was solved.
    double mean_runtime_solved_s = std::numeric_limits<double>::quiet_NaN();
    double mean_social_welfare_solved = std::numeric_limits<double>::quiet_NaN();
};

inline double median(std::vector<double> xs)
{
    if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(xs.begin(), xs.end());
    const std::size_t m = xs.size() / 2;
    return xs.size() % 2 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

inline double mean(const std::vector<double>& xs)
{
    if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

/// Rows in (algorithm, agents, epsilon) order of first appearance.
inline std::vector<SummaryRow> summarize(const std::vector<BenchRecord>& records)
{
    if (records.empty()) throw ContractViolation("summarize: no records");
    std::vector<std::tuple<std::string, int, double>> order;
    std::map<std::tuple<std::string, int, double>, std::vector<const BenchRecord*>> groups;
    for (const auto& r : records) {
        const auto key = std::make_tuple(r.algorithm, r.agents, r.epsilon);
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted) order.push_back(key);
        it->second.push_back(&r);
    }
    std::vector<SummaryRow> out;
    for (const auto& key : order) {
        const auto& g = groups.at(key);
        SummaryRow row;
        std::tie(row.algorithm, row.agents, row.epsilon) = key;
        row.runs = static_cast<int>(g.size());
        std::vector<double> all, solved_rt, solved_sw;
        for (const auto* r : g) {
            all.push_back(r->runtime_s);
            if (r->status == SolveStatus::Solved) {
                solved_rt.push_back(r->runtime_s);
                solved_sw.push_back(r->social_welfare);
            }
        }
        row.solved = static_cast<int>(solved_rt.size());
        row.success_fraction = static_cast<double>(row.solved) / static_cast<double>(row.runs);
        row.mean_runtime_s = mean(all);
        row.median_runtime_s = median(all);
        row.mean_runtime_solved_s = mean(solved_rt);
        row.mean_social_welfare_solved = mean(solved_sw);
        out.push_back(row);
    }
    return out;
}

inline std::string format_real(double x, int digits = 12)
{
    if (std::isnan(x)) return "";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

inline constexpr const char* kCsvHeader = "map,algorithm,agents,epsilon,run,status,runtime_s,social_welfare,welfare_spread";

inline void write_csv(std::ostream& os, const std::vector<BenchRecord>& records)
{
    os << kCsvHeader << '\n';
    for (const auto& r : records) {
        char rt[32];
        std::snprintf(rt, sizeof rt, "%.6f", r.runtime_s);
        os << r.map << ',' << r.algorithm << ',' << r.agents << ',' << format_real(r.epsilon) << ',' << r.run << ','
           << to_string(r.status) << ',' << rt << ',' << format_real(r.social_welfare) << ','
           << format_real(r.welfare_spread) << '\n';
    }
}

}  // namespace fairmapf

#endif  // FAIRMAPF_BENCH_HPP
