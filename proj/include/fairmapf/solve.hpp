#ifndef FAIRMAPF_SOLVE_HPP
#define FAIRMAPF_SOLVE_HPP

// Types and helpers shared by the Fair-ICTS and Fair-CBS drivers.

#include <chrono>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairmapf/core.hpp"
#include "fairmapf/fairness.hpp"
#include "fairmapf/map_io.hpp"
#include "fairmapf/sassp.hpp"

namespace fairmapf {

enum class SolveStatus { Solved, NoFairPlan, Timeout, Truncated, Error };

inline std::string_view to_string(SolveStatus s) noexcept
{
    switch (s) {
    case SolveStatus::Solved: return "solved";
    case SolveStatus::NoFairPlan: return "no-fair-plan";
    case SolveStatus::Timeout: return "timeout";
    case SolveStatus::Truncated: return "truncated";
    case SolveStatus::Error: return "error";
    }
    return "error";
}

/// Plans kept per explored step vector. Fairness and welfare depend on step
/// counts only, so one representative per vector yields the same outcome; the
/// mechanism needs every plan because winning sets compare concrete paths.
enum class PlanRetention { All, OnePerStepVector };

struct SolveLimits
{
    double time_limit_s = 60.0;
    /// Absolute per-agent path-length horizon; negative selects max_extra_steps.
    int max_steps = -1;
    /// Horizon above each agent's shortest path; negative means 2 * (width + height).
    int max_extra_steps = -1;
    /// Largest cost bound the ICTS deepening may reach.
    double max_bound = std::numeric_limits<double>::infinity();
    std::size_t max_plans_per_node = 1'000'000;
    std::size_t max_ct_nodes = 100'000;
};

struct SolveOptions
{
    SolveLimits limits;
    bool envy = true;
    bool max_min = true;
    bool proportional = true;
    double welfare_floor = 1e-9;
    PlanRetention retention = PlanRetention::All;
    /// Keep searching past the first cost level with candidates (ICTS: every
    /// bound up to the horizon; CBS: until the frontier is empty).
    bool exhaustive = false;
};

inline FairnessConfig fairness_config(double epsilon, const SolveOptions& opts)
{
    FairnessConfig cfg;
    cfg.epsilon = epsilon;
    cfg.welfare_floor = opts.welfare_floor;
    cfg.envy = opts.envy;
    cfg.max_min = opts.max_min;
    cfg.proportional = opts.proportional;
    validate(cfg);
    return cfg;
}

struct SolveStats
{
    std::size_t nodes_generated = 0;
    std::size_t nodes_expanded = 0;
    std::size_t iterations = 0;
    std::size_t plans_enumerated = 0;
    std::size_t candidates = 0;
    std::size_t fair_candidates = 0;
    std::size_t clamp_events = 0;
    double final_bound = 0.0;
    double runtime_s = 0.0;
    /// The search space within the horizon was covered without finding candidates.
    bool exhausted = false;
    std::string limit;
};

struct SolveResult
{
    SolveStatus status = SolveStatus::Error;
    std::string algorithm;
    std::optional<JointPlan> plan;
    WelfareVector welfare;
    double social_welfare = 0.0;
    double total_cost = 0.0;
    /// Envy-free conflict-free plans collected by the search (before set filtering).
    PlanSet candidates;
    /// Candidates passing the set-relative predicates.
    PlanSet fair_plans;
    SolveStats stats;
};

/// Costs closer than this are treated as one cost level.
inline constexpr double kCostTolerance = 1e-9;

class Deadline
{
public:
    explicit Deadline(double seconds)
        : start_(std::chrono::steady_clock::now()),
          end_(seconds > 0 && seconds < 1e9
                   ? start_ + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                  std::chrono::duration<double>(seconds))
                   : std::chrono::steady_clock::time_point::max())
    {}

    bool expired() const { return std::chrono::steady_clock::now() >= end_; }

    double elapsed() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
    std::chrono::steady_clock::time_point end_;
};

/// Throws UnreachableError (setup error) when any goal is unreachable.
inline std::vector<int> shortest_step_vector(const InstanceSpec& inst)
{
    std::vector<int> s;
    s.reserve(inst.agents.size());
    for (const auto& a : inst.agents) {
        validate_agent(inst.map, a);
        s.push_back(shortest_steps(inst.map, a.start, a.goal));
    }
    return s;
}

inline std::vector<int> horizons(const InstanceSpec& inst, const std::vector<int>& shortest, const SolveLimits& lim)
{
    std::vector<int> h;
    h.reserve(shortest.size());
    for (int s : shortest) {
        if (lim.max_steps >= 0)
            h.push_back(lim.max_steps);
        else
            h.push_back(s + (lim.max_extra_steps >= 0 ? lim.max_extra_steps : 2 * (inst.map.width() + inst.map.height())));
    }
    return h;
}

/// Every welfare only falls with extra steps, so if one agent's lowest reachable
/// welfare already exceeds another's highest by more than epsilon, no step
/// vector within the horizons is envy-free.
inline bool envy_free_reachable(std::span<const AgentType> agents, const std::vector<int>& shortest,
                                const std::vector<int>& horizon, double epsilon)
{
    double highest_floor = -std::numeric_limits<double>::infinity();
    double lowest_ceiling = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < agents.size(); ++i) {
        if (shortest[i] > horizon[i]) return false;
        highest_floor = std::max(highest_floor, welfare(agents[i], static_cast<std::size_t>(horizon[i])));
        lowest_ceiling = std::min(lowest_ceiling, welfare(agents[i], static_cast<std::size_t>(shortest[i])));
    }
    return highest_floor - lowest_ceiling <= epsilon + kFairnessTolerance;
}

/// Applies the set filter to result.candidates and selects the welfare
/// maximizer; the first plan in candidate order wins ties.
inline void select_fair_plan(SolveResult& result, std::span<const AgentType> agents, const FairnessConfig& cfg)
{
    result.stats.candidates = result.candidates.size();
    if (result.candidates.empty()) {
        result.status = SolveStatus::NoFairPlan;
        return;
    }
    auto filtered = filter_fair(result.candidates, agents, cfg);
    result.fair_plans = std::move(filtered.kept);
    result.stats.clamp_events = filtered.clamp_events;
    result.stats.fair_candidates = result.fair_plans.size();
    if (result.fair_plans.empty()) {
        result.status = SolveStatus::NoFairPlan;
        return;
    }
    std::size_t best = 0;
    double best_sw = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < result.fair_plans.size(); ++i) {
        const double sw = social_welfare(result.fair_plans[i], agents);
        if (sw > best_sw) {
            best_sw = sw;
            best = i;
        }
    }
    result.plan = result.fair_plans[best];
    result.welfare = welfare_vector(*result.plan, agents);
    result.social_welfare = best_sw;
    result.total_cost = plan_cost(*result.plan, agents);
    result.status = SolveStatus::Solved;
}

}  // namespace fairmapf

#endif  // FAIRMAPF_SOLVE_HPP
