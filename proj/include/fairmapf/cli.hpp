#ifndef FAIRMAPF_CLI_HPP
#define FAIRMAPF_CLI_HPP

// Command-line front end: solve, bench, oracle-check, mechanism.
//
// Exit codes: 0 success, 1 usage or I/O error, 2 no fair plan, 3 timeout or
// truncated search, 4 verification failure (mechanism violations, oracle
// mismatches). Requires CLI11 and nlohmann/json on the include path.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fairmapf/bench.hpp"
#include "fairmapf/cbs.hpp"
#include "fairmapf/icts.hpp"
#include "fairmapf/json_io.hpp"
#include "fairmapf/map_io.hpp"
#include "fairmapf/mechanism.hpp"
#include "fairmapf/oracle.hpp"

namespace fairmapf {

namespace cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNoFairPlan = 2;
inline constexpr int kExitLimit = 3;
inline constexpr int kExitViolation = 4;

inline int exit_code(SolveStatus s)
{
    switch (s) {
    case SolveStatus::Solved: return kExitOk;
    case SolveStatus::NoFairPlan: return kExitNoFairPlan;
    case SolveStatus::Timeout:
    case SolveStatus::Truncated: return kExitLimit;
    case SolveStatus::Error: return kExitUsage;
    }
    return kExitUsage;
}

struct InstanceArgs
{
    std::string map_path;
    std::string scen_path;
    int agents = 2;
    double epsilon = 0.5;
    std::uint64_t seed = 1;
    std::string fairness = "envy,maxmin,prop";
    double time_limit = 60.0;
    int max_steps = -1;
    std::string out_path;
};

inline void add_instance_options(CLI::App* cmd, InstanceArgs& a, bool map_required)
{
    auto* m = cmd->add_option("--map", a.map_path, "Grid map file");
    if (map_required) m->required();
    m->check(CLI::ExistingFile);
    cmd->add_option("--scen", a.scen_path, "Scenario file (starts and goals from its first rows)")->check(CLI::ExistingFile);
    cmd->add_option("--agents", a.agents, "Number of agents")->check(CLI::PositiveNumber);
    cmd->add_option("--epsilon", a.epsilon, "Envy-freeness threshold")->check(CLI::NonNegativeNumber);
    cmd->add_option("--seed", a.seed, "Seed for all sampling");
    cmd->add_option("--fairness", a.fairness, "Comma-separated subset of envy,maxmin,prop");
    cmd->add_option("--time-limit", a.time_limit, "Seconds per solve")->check(CLI::PositiveNumber);
    cmd->add_option("--max-steps", a.max_steps, "Per-agent path length horizon (default: shortest + 2(W+H))");
    cmd->add_option("--out", a.out_path, "Output file (default: stdout)");
}

/// Applies a --fairness list to solver options; throws on unknown names.
inline void apply_fairness(const std::string& list, SolveOptions& o)
{
    o.envy = o.max_min = o.proportional = false;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item == "envy")
            o.envy = true;
        else if (item == "maxmin")
            o.max_min = true;
        else if (item == "prop")
            o.proportional = true;
        else if (!item.empty())
            throw ContractViolation("unknown fairness notion '" + item + "'");
    }
}

inline InstanceSpec load_instance(const InstanceArgs& a)
{
    InstanceSpec inst;
    inst.map = load_map(a.map_path);
    inst.seed = a.seed;
    inst.epsilon = a.epsilon;
    if (!a.scen_path.empty())
        inst.agents = agents_from_scenario(inst.map, load_scen(a.scen_path), a.agents, a.seed);
    else
        inst.agents = sample_agents(inst.map, a.agents, a.seed);
    return inst;
}

inline SolveOptions solve_options(const InstanceArgs& a)
{
    SolveOptions o;
    apply_fairness(a.fairness, o);
    o.limits.time_limit_s = a.time_limit;
    o.limits.max_steps = a.max_steps;
    return o;
}

/// Writes to `path`, or to `out` when path is empty.
inline void emit(const std::string& path, const std::string& text, std::ostream& out)
{
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open output file '" + path + "'");
    f << text;
    if (!f) throw Error("write failed for '" + path + "'");
}

inline std::vector<std::string> algorithms_of(const std::string& algo)
{
    if (algo == "both") return {"icts", "cbs"};
    return {algo};
}

}  // namespace cli

/// Entry point shared by the binary and the tests.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    using namespace cli;
    CLI::App app{"Fair multi-agent path finding: Fair-ICTS, Fair-CBS, mechanism and benchmarks"};
    app.set_config("--config", "", "TOML/INI configuration file (flags take precedence)");
    app.require_subcommand(1);

    // solve
    InstanceArgs solve_args;
    std::string solve_algo = "icts";
    bool solve_no_runtime = false;
    std::string solve_format = "json";
    auto* solve = app.add_subcommand("solve", "Solve one instance");
    add_instance_options(solve, solve_args, true);
    solve->add_option("--algo", solve_algo, "icts, cbs or both")->check(CLI::IsMember({"icts", "cbs", "both"}));
    solve->add_option("--format", solve_format, "Output format (json)")->check(CLI::IsMember({"json"}));
    solve->add_flag("--no-runtime", solve_no_runtime, "Omit wall-clock fields");

    // bench
    std::string bench_map;
    std::vector<int> bench_agents;
    std::vector<double> bench_eps{0.5};
    std::string bench_algo = "both";
    std::string bench_preset = "desk";
    std::string bench_format = "csv";
    std::string bench_out;
    std::string bench_fairness = "envy,maxmin,prop";
    BenchConfig bench_cfg = desk_preset();
    auto* bench = app.add_subcommand("bench", "Run the benchmark protocol");
    bench->add_option("--map", bench_map, "Grid map file")->required()->check(CLI::ExistingFile);
    bench->add_option("--agents", bench_agents, "Comma-separated agent counts")->delimiter(',')->required();
    bench->add_option("--epsilons,--epsilon", bench_eps, "Comma-separated epsilon values")->delimiter(',');
    bench->add_option("--algo", bench_algo, "icts, cbs or both")->check(CLI::IsMember({"icts", "cbs", "both"}));
    bench->add_option("--preset", bench_preset, "desk (25 runs, 10 s) or full (100 runs, 60 s)")
        ->check(CLI::IsMember({"desk", "full"}));
    auto* runs_opt = bench->add_option("--runs", bench_cfg.runs, "Runs per setting")->check(CLI::PositiveNumber);
    auto* limit_opt = bench->add_option("--time-limit", bench_cfg.time_limit_s, "Seconds per solve")
                          ->check(CLI::PositiveNumber);
    bench->add_option("--seed", bench_cfg.seed, "Base seed");
    bench->add_option("--workers", bench_cfg.workers, "Parallel runs")->check(CLI::PositiveNumber);
    bench->add_option("--fairness", bench_fairness, "Comma-separated subset of envy,maxmin,prop");
    bench->add_option("--out", bench_out, "Output file (default: stdout)");
    bench->add_option("--format", bench_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    // oracle-check
    int oc_instances = 50;
    std::uint64_t oc_seed = 1;
    int oc_max_steps = 6;
    std::string oc_out;
    auto* oracle = app.add_subcommand("oracle-check", "Compare both solvers with brute force on small random instances");
    oracle->add_option("--instances", oc_instances, "Number of random instances")->check(CLI::PositiveNumber);
    oracle->add_option("--seed", oc_seed, "Base seed");
    oracle->add_option("--max-steps", oc_max_steps, "Per-agent horizon")->check(CLI::Range(0, 8));
    oracle->add_option("--out", oc_out, "Output file (default: stdout)");

    // mechanism
    InstanceArgs mech_args;
    std::size_t mech_misreports = 20;
    std::string mech_fixture;
    auto* mech = app.add_subcommand("mechanism", "Solve, run the payment mechanism and certify truthfulness");
    add_instance_options(mech, mech_args, false);
    mech->add_option("--misreports", mech_misreports, "Sampled misreports per agent")->check(CLI::PositiveNumber);
    mech->add_option("--fixture", mech_fixture, "")->check(CLI::IsMember({"non-monotone"}))->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*solve) {
            const InstanceSpec inst = load_instance(solve_args);
            const SolveOptions opts = solve_options(solve_args);
            Json doc;
            int code = kExitOk;
            std::vector<SolveResult> results;
            for (const auto& alg : algorithms_of(solve_algo)) {
                results.push_back(solve_with(alg, inst, opts));
                if (code == kExitOk) code = exit_code(results.back().status);
            }
            if (results.size() == 1) {
                doc = to_json(inst, results.front(), !solve_no_runtime);
            } else {
                doc["results"] = Json::array();
                for (const auto& r : results) doc["results"].push_back(to_json(inst, r, !solve_no_runtime));
            }
            emit(solve_args.out_path, doc.dump(2) + "\n", out);
            return code;
        }

        if (*bench) {
            if (bench_preset == "full") {
                const BenchConfig p = full_preset();
                if (runs_opt->count() == 0) bench_cfg.runs = p.runs;
                if (limit_opt->count() == 0) bench_cfg.time_limit_s = p.time_limit_s;
            }
            bench_cfg.map = load_map(bench_map);
            bench_cfg.map_name = std::filesystem::path(bench_map).stem().string();
            bench_cfg.agent_counts = bench_agents;
            bench_cfg.epsilons = bench_eps;
            bench_cfg.algorithms = algorithms_of(bench_algo);
            apply_fairness(bench_fairness, bench_cfg.solve);
            validate(bench_cfg);
            const auto records = run_benchmark(bench_cfg);
            if (bench_format == "csv") {
                std::ostringstream csv;
                write_csv(csv, records);
                emit(bench_out, csv.str(), out);
                if (!bench_out.empty()) {
                    const Json doc = bench_document(records);
                    Json side{{"summary", doc["summary"]}, {"plots", doc["plots"]}};
                    emit(bench_out + ".summary.json", side.dump(2) + "\n", out);
                }
            } else {
                emit(bench_out, bench_document(records).dump(2) + "\n", out);
            }
            return kExitOk;
        }

        if (*oracle) {
            Json mismatches = Json::array();
            std::size_t compared = 0, skipped = 0, no_fair = 0;
            for (int k = 0; k < oc_instances; ++k) {
                const InstanceSpec inst = small_random_instance(derive_seed(oc_seed, static_cast<std::uint64_t>(k)));
                SolveOptions o;
                o.limits.max_steps = oc_max_steps;
                const auto truth = oracle_fair_optimum(inst, oc_max_steps);
                if (truth.result.status == SolveStatus::NoFairPlan) ++no_fair;
                for (const auto& alg : {"icts", "cbs"}) {
                    const SolveResult r = solve_with(alg, inst, o);
                    if (r.status == SolveStatus::Timeout || r.status == SolveStatus::Truncated) {
                        ++skipped;
                        continue;
                    }
                    ++compared;
                    const bool same = r.status == truth.result.status &&
                                      (r.status != SolveStatus::Solved ||
                                       std::abs(r.social_welfare - truth.result.social_welfare) <= 1e-9);
                    if (!same)
                        mismatches.push_back({{"instance", k},
                                              {"algorithm", alg},
                                              {"status", std::string(to_string(r.status))},
                                              {"social_welfare", real_or_null(r.social_welfare)},
                                              {"oracle_status", std::string(to_string(truth.result.status))},
                                              {"oracle_social_welfare", real_or_null(truth.result.social_welfare)}});
                }
            }
            const Json doc{{"instances", oc_instances}, {"comparisons", compared}, {"skipped_limit", skipped},
                           {"oracle_no_fair_plan", no_fair}, {"mismatches", mismatches}};
            emit(oc_out, doc.dump(2) + "\n", out);
            return mismatches.empty() ? kExitOk : kExitViolation;
        }

        if (*mech) {
            InstanceSpec inst;
            PlanSet plans;
            Json solve_doc = nullptr;
            if (mech_fixture == "non-monotone") {
                auto f = two_plan_fixture();
                inst = f.instance;
                plans = f.plans;
            } else {
                if (mech_args.map_path.empty()) throw CLI::RequiredError("--map");
                inst = load_instance(mech_args);
                const SolveResult r = fair_icts_solve(inst, solve_options(mech_args));
                solve_doc = to_json(inst, r, false);
                if (r.status != SolveStatus::Solved) {
                    emit(mech_args.out_path, Json{{"solve", solve_doc}}.dump(2) + "\n", out);
                    return exit_code(r.status);
                }
                plans = r.fair_plans;
            }
            const auto outcome = run_mechanism(plans, inst.agents, BidProfile::truthful(inst.agents),
                                               ViolationPolicy::Record);
            CertifyOptions copt;
            copt.misreport_samples = mech_misreports;
            const auto report = certify_truthfulness(inst, plans, derive_seed(mech_args.seed, 0xce27), copt);
            const Json doc{{"solve", solve_doc}, {"outcome", to_json(outcome)}, {"report", to_json(report)}};
            emit(mech_args.out_path, doc.dump(2) + "\n", out);
            return report.clean() ? kExitOk : kExitViolation;
        }
    } catch (const CLI::Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace fairmapf

#endif  // FAIRMAPF_CLI_HPP
