#ifndef FAIRMAPF_ORACLE_HPP
#define FAIRMAPF_ORACLE_HPP

// Brute-force ground truth for tiny instances.
//
// Walks come from enumerating every sequence of the five actions and keeping
// the ones that stay on passable cells and end at the goal. Joint feasibility is
// decided per step vector by backtracking with a direct pairwise conflict test.
// Nothing here calls the DAG, the space-time A* or the conflict checker.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "fairmapf/core.hpp"
#include "fairmapf/fairness.hpp"
#include "fairmapf/map_io.hpp"
#include "fairmapf/rng.hpp"
#include "fairmapf/solve.hpp"

namespace fairmapf {

class OracleRefused : public Error
{
public:
    using Error::Error;
};

struct OracleGuard
{
    std::size_t max_agents = 4;
    int max_width = 5;
    int max_height = 5;
    int max_steps = 8;
};

inline void check_oracle_guard(const InstanceSpec& inst, int max_steps, const OracleGuard& guard = {})
{
    if (inst.agents.size() > guard.max_agents) throw OracleRefused("oracle: too many agents");
    if (inst.map.width() > guard.max_width || inst.map.height() > guard.max_height)
        throw OracleRefused("oracle: map too large");
    if (max_steps > guard.max_steps || max_steps < 0) throw OracleRefused("oracle: max_steps out of range");
}

/// Every walk start -> goal of exactly 0..max_steps timesteps, grouped by length.
/// Element [s] lists the walks of length s in action order (up, down, left, right, wait).
inline std::vector<std::vector<Path>> enumerate_walks(const GridGraph& g, const AgentType& agent, int max_steps)
{
    std::vector<std::vector<Path>> out(static_cast<std::size_t>(std::max(max_steps, 0)) + 1);
    if (!g.passable(agent.start) || !g.passable(agent.goal)) return out;
    static constexpr int dx[5] = {0, 0, -1, 1, 0};
    static constexpr int dy[5] = {-1, 1, 0, 0, 0};
    std::vector<Vertex> cur{agent.start};
    std::function<void()> rec = [&] {
        const int depth = static_cast<int>(cur.size()) - 1;
        if (cur.back() == agent.goal) out[static_cast<std::size_t>(depth)].push_back(Path{cur});
        if (depth == max_steps) return;
        const Cell c = g.cell(cur.back());
        for (int a = 0; a < 5; ++a) {
            const Cell n{c.x + dx[a], c.y + dy[a]};
            if (!g.passable(n)) continue;
            cur.push_back(g.vertex(n));
            rec();
            cur.pop_back();
        }
    };
    rec();
    return out;
}

/// All walks of exactly s timesteps (flattened helper for DAG comparisons).
inline std::vector<Path> enumerate_walks_of_length(const GridGraph& g, const AgentType& agent, int s)
{
    if (s < 0) return {};
    return enumerate_walks(g, agent, s)[static_cast<std::size_t>(s)];
}

/// Direct reading of the conflict rules: same vertex at a time both exist, or
/// an exchange of positions between two consecutive times both exist.
inline bool oracle_pair_conflicts(const Path& a, const Path& b)
{
    const std::size_t la = a.vertices.size(), lb = b.vertices.size();
    const std::size_t both = std::min(la, lb);
    for (std::size_t t = 0; t < both; ++t) {
        if (a.vertices[t] == b.vertices[t]) return true;
        if (t + 1 < both && a.vertices[t] == b.vertices[t + 1] && a.vertices[t + 1] == b.vertices[t]) return true;
    }
    return false;
}

namespace detail {

struct OracleWalks
{
    std::vector<std::vector<std::vector<Path>>> by_agent;  // [agent][length]
    std::vector<int> shortest;                             // -1 when no walk within max_steps
};

inline OracleWalks oracle_walks(const InstanceSpec& inst, int max_steps)
{
    OracleWalks w;
    for (const auto& a : inst.agents) {
        w.by_agent.push_back(enumerate_walks(inst.map, a, max_steps));
        int s = -1;
        for (std::size_t k = 0; k < w.by_agent.back().size(); ++k)
            if (!w.by_agent.back()[k].empty()) {
                s = static_cast<int>(k);
                break;
            }
        w.shortest.push_back(s);
    }
    return w;
}

/// Calls `visit` for every step vector with s_i in [shortest_i, max_steps].
inline void for_each_step_vector(const std::vector<int>& lo, int hi, const std::function<void(const StepVector&)>& visit)
{
    StepVector s = lo;
    for (int v : lo)
        if (v < 0 || v > hi) return;
    while (true) {
        visit(s);
        std::size_t i = 0;
        while (i < s.size() && s[i] == hi) {
            s[i] = lo[i];
            ++i;
        }
        if (i == s.size()) return;
        ++s[i];
    }
}

/// Depth-first choice of one walk per agent with pairwise conflict pruning.
/// `emit` returns false to stop.
inline bool oracle_backtrack(const OracleWalks& w, const StepVector& s, std::vector<const Path*>& chosen, std::size_t i,
                             const std::function<bool(const std::vector<const Path*>&)>& emit)
{
    if (i == s.size()) return emit(chosen);
    for (const auto& p : w.by_agent[i][static_cast<std::size_t>(s[i])]) {
        bool ok = true;
        for (std::size_t j = 0; j < i && ok; ++j) ok = !oracle_pair_conflicts(*chosen[j], p);
        if (!ok) continue;
        chosen[i] = &p;
        if (!oracle_backtrack(w, s, chosen, i + 1, emit)) return false;
    }
    return true;
}

inline JointPlan to_plan(const std::vector<const Path*>& chosen)
{
    JointPlan p;
    for (const auto* c : chosen) p.paths.push_back(*c);
    return p;
}

}  // namespace detail

/// Every conflict-free joint plan with each agent taking at most max_steps
/// timesteps. Refuses above `cap` plans.
inline PlanSet enumerate_feasible(const InstanceSpec& inst, int max_steps, std::size_t cap = 1'000'000)
{
    check_oracle_guard(inst, max_steps);
    const auto w = detail::oracle_walks(inst, max_steps);
    PlanSet out;
    std::vector<const Path*> chosen(inst.agents.size(), nullptr);
    detail::for_each_step_vector(w.shortest, max_steps, [&](const StepVector& s) {
        detail::oracle_backtrack(w, s, chosen, 0, [&](const std::vector<const Path*>& c) {
            if (out.size() >= cap) throw OracleRefused("oracle: feasible set exceeds cap");
            out.push_back(detail::to_plan(c));
            return true;
        });
    });
    return out;
}

/// One representative conflict-free plan per feasible step vector.
inline std::map<StepVector, JointPlan> feasible_step_vectors(const InstanceSpec& inst, int max_steps)
{
    check_oracle_guard(inst, max_steps);
    const auto w = detail::oracle_walks(inst, max_steps);
    std::map<StepVector, JointPlan> out;
    std::vector<const Path*> chosen(inst.agents.size(), nullptr);
    detail::for_each_step_vector(w.shortest, max_steps, [&](const StepVector& s) {
        detail::oracle_backtrack(w, s, chosen, 0, [&](const std::vector<const Path*>& c) {
            out.emplace(s, detail::to_plan(c));
            return false;
        });
    });
    return out;
}

/// Which set the max-min and proportional tests compare against.
/// Candidate: the cheapest envy-free cost level, i.e. what a solver stopping
/// at its first nonempty cost level collects. Feasible: every envy-free
/// feasible plan within the horizon.
enum class OracleMode { Candidate, Feasible };

struct OracleResult
{
    SolveResult result;
    /// Best social welfare over all feasible plans, fairness ignored (nullopt if none).
    std::optional<double> d_star;
    std::size_t feasible_vectors = 0;
    std::size_t envy_free_vectors = 0;
};

inline OracleResult oracle_fair_optimum(const InstanceSpec& inst, int max_steps, OracleMode mode = OracleMode::Candidate,
                                        const SolveOptions& opts = {})
{
    const FairnessConfig cfg = fairness_config(inst.epsilon, opts);
    const auto vectors = feasible_step_vectors(inst, max_steps);

    OracleResult out;
    out.result.algorithm = "oracle";
    out.feasible_vectors = vectors.size();
    PlanSet envy_free;
    std::vector<double> costs;
    for (const auto& [s, plan] : vectors) {
        const double sw = social_welfare(plan, inst.agents);
        if (!out.d_star || sw > *out.d_star) out.d_star = sw;
        if (is_envy_free(welfare_vector(s, inst.agents), cfg.effective_epsilon())) {
            envy_free.push_back(plan);
            costs.push_back(plan_cost(s, inst.agents));
        }
    }
    out.envy_free_vectors = envy_free.size();

    if (mode == OracleMode::Candidate && !envy_free.empty()) {
        const double cheapest = *std::min_element(costs.begin(), costs.end());
        PlanSet level;
        for (std::size_t i = 0; i < envy_free.size(); ++i)
            if (costs[i] <= cheapest + kCostTolerance) level.push_back(envy_free[i]);
        envy_free = std::move(level);
    }
    out.result.candidates = std::move(envy_free);
    select_fair_plan(out.result, inst.agents, cfg);
    out.result.stats.exhausted = out.result.candidates.empty();
    return out;
}

struct SmallInstanceOptions
{
    int min_side = 2;
    int max_side = 4;
    int min_agents = 2;
    int max_agents = 3;
    double obstacle_density = 0.15;
    std::vector<double> epsilons{0.0, 0.05, 0.1, 0.2, 0.5, 1.0};
};

/// Random oracle-sized instance, deterministic in `seed`. Draws are repeated
/// with derived seeds until the agents can be placed.
inline InstanceSpec small_random_instance(std::uint64_t seed, const SmallInstanceOptions& opt = {})
{
    for (std::uint64_t attempt = 0;; ++attempt) {
        Rng rng(derive_seed(seed, attempt, 0x5eed));
        const auto span = static_cast<std::uint64_t>(opt.max_side - opt.min_side + 1);
        const int w = opt.min_side + static_cast<int>(rng.below(span));
        const int h = opt.min_side + static_cast<int>(rng.below(span));
        std::vector<std::uint8_t> cells(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 1);
        for (auto& c : cells)
            if (rng.next_unit() < opt.obstacle_density) c = 0;
        const int n = opt.min_agents + static_cast<int>(rng.below(static_cast<std::uint64_t>(opt.max_agents - opt.min_agents + 1)));
        InstanceSpec inst;
        inst.map = GridGraph(w, h, cells);
        inst.seed = rng.next_u64();
        inst.epsilon = opt.epsilons[rng.below(opt.epsilons.size())];
        try {
            inst.agents = sample_agents(inst.map, n, inst.seed);
        } catch (const GenerationError&) {
            continue;
        }
        return inst;
    }
}

}  // namespace fairmapf

#endif  // FAIRMAPF_ORACLE_HPP
