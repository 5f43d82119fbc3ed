// Acceptance runner: prints one PASS/FAIL line per criterion.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fairmapf/bench.hpp"
#include "fairmapf/cbs.hpp"
#include "fairmapf/icts.hpp"
#include "fairmapf/map_io.hpp"
#include "fairmapf/mechanism.hpp"
#include "fairmapf/oracle.hpp"

using namespace fairmapf;

namespace {

constexpr double kWelfareTol = 1e-9;
constexpr double kRegretTol = 1e-9;
constexpr double kCriticalTol = 1e-6;

constexpr int kOracleInstances = 200;
constexpr int kOracleHorizon = 6;
constexpr int kDagCases = 50;
constexpr int kMechanismInstances = 100;
constexpr std::size_t kMisreports = 20;
constexpr std::size_t kBidGrid = 100;

std::string data(const std::string& name) { return std::string(FAIRMAPF_TEST_DATA) + "/" + name; }

struct Verdict
{
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... xs)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, xs...);
    return buf;
}

bool completed(const SolveResult& r) { return r.status == SolveStatus::Solved || r.status == SolveStatus::NoFairPlan; }

/// The seeded small corpus shared by criteria 1-3.
struct SmallRun
{
    InstanceSpec inst;
    SolveResult icts;
    SolveResult cbs;
    OracleResult oracle;
};

const std::vector<SmallRun>& small_corpus()
{
    static const std::vector<SmallRun> runs = [] {
        std::vector<SmallRun> out;
        SolveOptions o;
        o.limits.max_steps = kOracleHorizon;
        for (int k = 0; k < kOracleInstances; ++k) {
            SmallRun r;
            r.inst = small_random_instance(derive_seed(1001, static_cast<std::uint64_t>(k)));
            r.icts = fair_icts_solve(r.inst, o);
            r.cbs = fair_cbs_solve(r.inst, o);
            r.oracle = oracle_fair_optimum(r.inst, kOracleHorizon, OracleMode::Candidate, o);
            out.push_back(std::move(r));
        }
        return out;
    }();
    return runs;
}

Verdict criterion1()
{
    int compared = 0, mismatches = 0, skipped = 0, fair_empty = 0;
    std::string first;
    for (std::size_t k = 0; k < small_corpus().size(); ++k) {
        const auto& r = small_corpus()[k];
        const auto& ref = r.oracle.result;
        if (ref.status == SolveStatus::NoFairPlan) ++fair_empty;
        for (const SolveResult* s : {&r.icts, &r.cbs}) {
            if (!completed(*s)) {
                ++skipped;
                continue;
            }
            ++compared;
            bool ok = s->status == ref.status;
            if (ok && s->status == SolveStatus::Solved) ok = std::abs(s->social_welfare - ref.social_welfare) <= kWelfareTol;
            if (!ok) {
                ++mismatches;
                if (first.empty())
                    first = fmt(" first: case %zu %s %s sw=%.12g vs oracle %s sw=%.12g", k, s->algorithm.c_str(),
                                std::string(to_string(s->status)).c_str(), s->social_welfare,
                                std::string(to_string(ref.status)).c_str(), ref.social_welfare);
            }
        }
    }
    const bool ok = mismatches == 0 && compared >= kOracleInstances;
    return {ok, fmt("%d instances, %d solver runs compared, %d skipped (truncated/timeout), %d mismatches, %d with empty "
                    "fair set",
                    kOracleInstances, compared, skipped, mismatches, fair_empty) +
                    first};
}

Verdict criterion2()
{
    int both = 0, disagree = 0;
    for (const auto& r : small_corpus()) {
        if (!completed(r.icts) || !completed(r.cbs)) continue;
        ++both;
        if (r.icts.status != r.cbs.status ||
            (r.icts.status == SolveStatus::Solved && std::abs(r.icts.social_welfare - r.cbs.social_welfare) > kWelfareTol))
            ++disagree;
    }
    return {disagree == 0 && both > 0, fmt("%d instances where both complete, %d disagreements", both, disagree)};
}

bool output_ok(const InstanceSpec& inst, const SolveResult& r, std::string& why)
{
    if (r.status != SolveStatus::Solved) return true;
    if (!r.plan) {
        why = "solved without a plan";
        return false;
    }
    for (std::size_t i = 0; i < inst.agents.size(); ++i)
        if (!is_valid_path(inst.map, inst.agents[i], r.plan->paths[i])) {
            why = "invalid path";
            return false;
        }
    if (!check_feasible(*r.plan).empty()) {
        why = "conflict in returned plan";
        return false;
    }
    const double eps = fairness_config(inst.epsilon, SolveOptions{}).effective_epsilon();
    if (!is_envy_free(welfare_vector(*r.plan, inst.agents), eps)) {
        why = "returned plan is not envy-free";
        return false;
    }
    return true;
}

Verdict criterion3()
{
    int checked = 0, bad = 0;
    std::string why;
    for (const auto& r : small_corpus())
        for (const SolveResult* s : {&r.icts, &r.cbs}) {
            checked += s->status == SolveStatus::Solved;
            bad += !output_ok(r.inst, *s, why);
        }
    // Benchmark-scale instances on every corpus map.
    SolveOptions o = bench_solve_options();
    o.limits.time_limit_s = 2.0;
    for (const char* name : {"empty-16-16.map", "random-32-32-20.map", "empty-48-48.map", "den312d.map"}) {
        const GridGraph map = load_map(data(name));
        for (int agents : {2, 3, 4})
            for (double eps : {0.2, 1.0})
                for (int run = 0; run < 3; ++run) {
                    InstanceSpec inst;
                    inst.map = map;
                    inst.epsilon = eps;
                    inst.agents = sample_agents(map, agents, instance_seed(77, agents, run));
                    for (const auto& s : {fair_icts_solve(inst, o), fair_cbs_solve(inst, o)}) {
                        checked += s.status == SolveStatus::Solved;
                        bad += !output_ok(inst, s, why);
                    }
                }
    }
    return {bad == 0 && checked > 0, fmt("%d solved outputs checked, %d failures", checked, bad) + (why.empty() ? "" : " (" + why + ")")};
}

Verdict criterion4()
{
    int unequal = 0, paths = 0;
    for (int k = 0; k < kDagCases; ++k) {
        const InstanceSpec inst = small_random_instance(derive_seed(1004, static_cast<std::uint64_t>(k)));
        Rng rng(derive_seed(1005, static_cast<std::uint64_t>(k)));
        const auto& a = inst.agents[rng.below(inst.agents.size())];
        const int s = static_cast<int>(rng.below(7));
        std::set<std::vector<Vertex>> dag, walks;
        for (const auto& p : build_dag(inst.map, a, s).paths()) dag.insert(p.vertices);
        for (const auto& p : enumerate_walks_of_length(inst.map, a, s)) walks.insert(p.vertices);
        paths += static_cast<int>(walks.size());
        unequal += dag != walks;
    }
    return {unequal == 0, fmt("%d cases, %d total walks, %d unequal path sets", kDagCases, paths, unequal)};
}

Verdict criterion5()
{
    CertifyOptions co;
    co.misreport_samples = kMisreports;
    co.monotonicity_grid = kBidGrid;
    SolveOptions o;
    o.limits.max_steps = 5;
    int used = 0;
    std::size_t ir = 0, ir_unpaid = 0, clamped_negative = 0, mono = 0;
    double regret = 0.0;
    for (std::uint64_t k = 0; used < kMechanismInstances && k < 100 * kMechanismInstances; ++k) {
        const InstanceSpec inst = small_random_instance(derive_seed(1006, k));
        const auto r = fair_icts_solve(inst, o);
        if (r.fair_plans.empty()) continue;
        ++used;
        const auto rep = certify_truthfulness(inst, r.fair_plans, derive_seed(1007, k), co);
        regret = std::max(regret, rep.max_regret);
        ir += rep.ir_violations;
        mono += rep.monotonicity_violations;
        for (const auto& a : rep.agents) {
            ir_unpaid += !a.ir_ok && a.payment == 0.0;
            clamped_negative += a.truthful_utility < 0.0;
        }
    }
    const auto f = two_plan_fixture();
    const auto planted = certify_truthfulness(f.instance, f.plans, 1, co);
    const bool flagged = planted.monotonicity_violations > 0;
    const bool ok = used >= kMechanismInstances && regret <= kRegretTol && ir == 0 && mono == 0 && flagged;
    return {ok, fmt("%d instances x %zu misreports/agent, max regret %.3g, %zu monotonicity violations, planted fixture "
                    "%s; IR (pre-clamp u-c*k-p >= -1e-9): %zu violations, %zu of them with zero payment; clamped "
                    "utilities below 0: %zu",
                    used, kMisreports, regret, mono, flagged ? "flagged" : "NOT flagged", ir, ir_unpaid,
                    clamped_negative)};
}

Verdict criterion6()
{
    const auto f = two_plan_fixture();
    const double r1 = critical_value(f.plans, f.instance.agents, 0, BidProfile::truthful(f.instance.agents));
    const auto out = run_mechanism(f.plans, f.instance.agents, BidProfile::truthful(f.instance.agents),
                                   ViolationPolicy::Record);
    const double p1 = out.payments[0];
    const bool ok = std::abs(r1 - 0.1) <= kCriticalTol && std::abs(p1 - 0.2) <= kCriticalTol;
    return {ok, fmt("r1 = %.9f (expect 0.1), p1 = %.9f (expect 0.2)", r1, p1)};
}

Verdict criterion7()
{
    BenchConfig cfg = desk_preset();
    cfg.map_name = "empty-16-16";
    cfg.map = load_map(data("empty-16-16.map"));
    cfg.agent_counts = {2, 4, 6};
    cfg.epsilons = {0.1, 0.5, 1.0};
    cfg.seed = 1;
    const auto records = run_benchmark(cfg);

    std::map<std::tuple<std::string, int, double>, double> frac;
    for (const auto& row : summarize(records)) frac[{row.algorithm, row.agents, row.epsilon}] = row.success_fraction;

    std::string notes;
    bool agents_ok = true, eps_ok = true;
    for (const auto& algo : cfg.algorithms) {
        for (double e : cfg.epsilons)
            for (std::size_t i = 1; i < cfg.agent_counts.size(); ++i)
                if (frac[{algo, cfg.agent_counts[i], e}] > frac[{algo, cfg.agent_counts[i - 1], e}]) {
                    agents_ok = false;
                    notes += fmt(" [%s eps=%g: n=%d above n=%d]", algo.c_str(), e, cfg.agent_counts[i],
                                 cfg.agent_counts[i - 1]);
                }
        for (int n : cfg.agent_counts)
            for (std::size_t i = 1; i < cfg.epsilons.size(); ++i)
                if (frac[{algo, n, cfg.epsilons[i]}] < frac[{algo, n, cfg.epsilons[i - 1]}]) {
                    eps_ok = false;
                    notes += fmt(" [%s n=%d: eps=%g below eps=%g]", algo.c_str(), n, cfg.epsilons[i], cfg.epsilons[i - 1]);
                }
    }

    // Runtime ordering on instances both algorithms solved, per cell.
    std::map<std::tuple<int, double, int>, std::pair<const BenchRecord*, const BenchRecord*>> pairs;
    for (const auto& r : records) {
        auto& slot = pairs[{r.agents, r.epsilon, r.run}];
        (r.algorithm == "icts" ? slot.first : slot.second) = &r;
    }
    std::map<std::pair<int, double>, std::pair<std::vector<double>, std::vector<double>>> cell;
    for (const auto& [key, p] : pairs)
        if (p.first && p.second && p.first->status == SolveStatus::Solved && p.second->status == SolveStatus::Solved) {
            auto& c = cell[{std::get<0>(key), std::get<1>(key)}];
            c.first.push_back(p.first->runtime_s);
            c.second.push_back(p.second->runtime_s);
        }
    // Pass condition: pooled means over all jointly solved runs. Per-cell inversions are reported only.
    std::vector<double> icts_rt, cbs_rt;
    std::string inversions;
    for (const auto& [key, c] : cell) {
        icts_rt.insert(icts_rt.end(), c.first.begin(), c.first.end());
        cbs_rt.insert(cbs_rt.end(), c.second.begin(), c.second.end());
        if (mean(c.first) > mean(c.second))
            inversions += fmt(" [n=%d eps=%g: icts %.3gs > cbs %.3gs]", key.first, key.second, mean(c.first), mean(c.second));
    }
    const bool runtime_ok = !icts_rt.empty() && mean(icts_rt) <= mean(cbs_rt);
    notes += fmt("; runtime over %zu jointly solved runs: icts %.3gs, cbs %.3gs; per-cell inversions (informative):%s",
                 icts_rt.size(), mean(icts_rt), mean(cbs_rt), inversions.empty() ? " none" : inversions.c_str());
    std::string table;
    for (int n : cfg.agent_counts)
        for (double e : cfg.epsilons)
            table += fmt(" n=%d/eps=%g:%.2f|%.2f", n, e, frac[{"icts", n, e}], frac[{"cbs", n, e}]);
    return {agents_ok && eps_ok && runtime_ok,
            fmt("(a) agents %s, (b) epsilon %s, (c) runtime %s; success icts|cbs:", agents_ok ? "ok" : "violated",
                eps_ok ? "ok" : "violated", runtime_ok ? "ok" : "violated") +
                table + notes};
}

int map_error_line(const std::string& name)
{
    try {
        load_map(data(name));
    } catch (const ParseError& e) {
        return e.line();
    }
    return -1;
}

int scen_error_line(const std::string& name)
{
    try {
        load_scen(data(name));
    } catch (const ParseError& e) {
        return e.line();
    }
    return -1;
}

Verdict criterion8()
{
    struct Header
    {
        const char* file;
        int width;
        int height;
    };
    int bad = 0;
    std::string notes;
    for (const Header& h : {Header{"empty-16-16.map", 16, 16}, Header{"random-32-32-20.map", 32, 32},
                            Header{"empty-48-48.map", 48, 48}, Header{"den312d.map", 65, 81}}) {
        const GridGraph g = load_map(data(h.file));
        if (g.width() != h.width || g.height() != h.height) {
            ++bad;
            notes += fmt(" [%s is %dx%d]", h.file, g.width(), g.height());
        }
    }
    struct Corrupt
    {
        const char* file;
        int line;
        bool map;
    };
    for (const Corrupt& c : {Corrupt{"bad-header.map", 2, true}, Corrupt{"bad-row-length.map", 6, true},
                             Corrupt{"bad-char.map", 6, true}, Corrupt{"missing-rows.map", 7, true},
                             Corrupt{"bad-fields.scen", 3, false}, Corrupt{"bad-number.scen", 2, false},
                             Corrupt{"goal-outside.scen", 2, false}}) {
        const int got = c.map ? map_error_line(c.file) : scen_error_line(c.file);
        if (got != c.line) {
            ++bad;
            notes += fmt(" [%s: line %d, expected %d]", c.file, got, c.line);
        }
    }
    return {bad == 0, fmt("4 map headers, 7 corrupted fixtures, %d failures", bad) + notes};
}

std::string csv_without_runtime(std::vector<BenchRecord> rs)
{
    for (auto& r : rs) r.runtime_s = 0.0;
    std::ostringstream os;
    write_csv(os, rs);
    return os.str();
}

Verdict criterion9()
{
    BenchConfig cfg;
    cfg.map_name = "empty-16-16";
    cfg.map = load_map(data("empty-16-16.map"));
    cfg.agent_counts = {2, 3, 4};
    cfg.epsilons = {0.5, 1.0};
    cfg.runs = 5;
    cfg.time_limit_s = 30.0;
    cfg.seed = 9;
    const auto a = run_benchmark(cfg);
    const auto b = run_benchmark(cfg);
    int timeouts = 0;
    for (const auto* rs : {&a, &b})
        for (const auto& r : *rs) timeouts += r.status == SolveStatus::Timeout;
    const bool same = csv_without_runtime(a) == csv_without_runtime(b);
    return {same, fmt("%zu records per run, CSVs %s with runtime zeroed, %d timeouts", a.size(),
                      same ? "identical" : "DIFFER", timeouts)};
}

}  // namespace

int main(int argc, char** argv)
{
    const std::vector<std::function<Verdict()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                         criterion6, criterion7, criterion8, criterion9};
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::stoi(argv[i]));
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!selected.empty() && !selected.count(id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[i]();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %d: %s (%.1fs) %s\n", id, v.pass ? "PASS" : "FAIL", s, v.detail.c_str());
        std::fflush(stdout);
        failed += !v.pass;
    }
    return failed == 0 ? 0 : 1;
}
