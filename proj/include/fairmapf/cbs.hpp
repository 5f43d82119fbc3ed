#ifndef FAIRMAPF_CBS_HPP
#define FAIRMAPF_CBS_HPP

// Fair Conflict-Based Search.
//
// Best-first search over a constraint tree ordered by sum of individual costs.
// Conflict-free leaves that are envy-free are accumulated. A conflict-free
// leaf also spawns one "length child" per agent demanding a strictly longer
// path for that agent, so step vectors above the unconstrained optimum stay
// reachable when the cheaper ones are unfair.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "fairmapf/core.hpp"
#include "fairmapf/fairness.hpp"
#include "fairmapf/sassp.hpp"
#include "fairmapf/solve.hpp"

namespace fairmapf {

/// How a swap conflict is split. Destination: each child forbids one agent's
/// arrival vertex. Edge: each child forbids one agent's traversal.
enum class SwapEncoding { Destination, Edge };

struct CtNode
{
    JointPlan solution;
    std::vector<SpaceTimeConstraint> constraints;
    std::vector<EdgeConstraint> edge_constraints;
    /// Per-agent lower bound on path length (0 = none).
    std::vector<int> min_lengths;
    double cost = 0.0;
};

/// Earliest conflict; ties by lowest agent pair, then vertex before swap.
inline std::optional<Conflict> find_conflict(const JointPlan& plan)
{
    auto all = check_feasible(plan);
    if (all.empty()) return std::nullopt;
    return all.front();
}

/// Read-only data shared by every node of one search.
struct CbsContext
{
    const GridGraph* map = nullptr;
    std::vector<AgentType> agents;
    std::vector<int> horizon;
    std::vector<std::vector<int>> goal_distances;
    SwapEncoding swap_encoding = SwapEncoding::Edge;

    CbsContext(const GridGraph& g, std::vector<AgentType> as, std::vector<int> h,
               SwapEncoding enc = SwapEncoding::Edge)
        : map(&g), agents(std::move(as)), horizon(std::move(h)), swap_encoding(enc)
    {
        if (horizon.size() != agents.size()) throw ContractViolation("CbsContext: horizon arity mismatch");
        for (const auto& a : agents) goal_distances.push_back(distance_map(g, a.goal));
    }

    /// Constrained A* for one agent under the node's constraints and length bound.
    std::optional<Path> replan(const CtNode& node, std::size_t agent) const
    {
        std::vector<SpaceTimeConstraint> own;
        for (const auto& c : node.constraints)
            if (c.agent == static_cast<int>(agent)) own.push_back(c);
        std::vector<EdgeConstraint> own_edges;
        for (const auto& c : node.edge_constraints)
            if (c.agent == static_cast<int>(agent)) own_edges.push_back(c);
        LowLevelQuery q;
        q.horizon = horizon[agent];
        q.min_length = node.min_lengths.empty() ? 0 : node.min_lengths[agent];
        q.goal_distances = &goal_distances[agent];
        q.edge_constraints = own_edges;
        AgentType a = agents[agent];
        a.id = static_cast<int>(agent);
        return constrained_shortest_path(*map, a, own, q);
    }

    double cost(const JointPlan& plan) const { return plan_cost(plan, agents); }

    std::optional<CtNode> root() const
    {
        CtNode n;
        n.min_lengths.assign(agents.size(), 0);
        for (std::size_t i = 0; i < agents.size(); ++i) {
            auto p = replan(n, i);
            if (!p) return std::nullopt;
            n.solution.paths.push_back(std::move(*p));
        }
        n.cost = cost(n.solution);
        return n;
    }
};

namespace detail {

inline std::optional<CtNode> child_with(const CbsContext& ctx, const CtNode& parent, std::size_t agent,
                                        std::optional<SpaceTimeConstraint> vc, std::optional<EdgeConstraint> ec,
                                        int min_length = -1)
{
    CtNode child;
    child.constraints = parent.constraints;
    child.edge_constraints = parent.edge_constraints;
    child.min_lengths = parent.min_lengths;
    if (child.min_lengths.empty()) child.min_lengths.assign(ctx.agents.size(), 0);
    if (vc) {
        child.constraints.insert(std::upper_bound(child.constraints.begin(), child.constraints.end(), *vc), *vc);
    }
    if (ec) {
        child.edge_constraints.insert(
            std::upper_bound(child.edge_constraints.begin(), child.edge_constraints.end(), *ec), *ec);
    }
    if (min_length >= 0) child.min_lengths[agent] = min_length;
    auto p = ctx.replan(child, agent);
    if (!p) return std::nullopt;
    child.solution = parent.solution;
    child.solution.paths[agent] = std::move(*p);
    child.cost = ctx.cost(child.solution);
    return child;
}

}  // namespace detail

/// Splits on `conflict`: one child per participating agent, each replanning
/// only that agent. Children whose replanning fails are dropped.
inline std::vector<CtNode> expand(const CbsContext& ctx, const CtNode& node, const Conflict& conflict)
{
    std::vector<CtNode> out;
    const auto a = static_cast<std::size_t>(conflict.first);
    const auto b = static_cast<std::size_t>(conflict.second);
    std::optional<CtNode> c1, c2;
    if (conflict.kind == Conflict::Kind::Vertex) {
        c1 = detail::child_with(ctx, node, a, SpaceTimeConstraint{conflict.first, conflict.v, conflict.time}, {});
        c2 = detail::child_with(ctx, node, b, SpaceTimeConstraint{conflict.second, conflict.v, conflict.time}, {});
    } else if (ctx.swap_encoding == SwapEncoding::Destination) {
        c1 = detail::child_with(ctx, node, a, SpaceTimeConstraint{conflict.first, conflict.w, conflict.time}, {});
        c2 = detail::child_with(ctx, node, b, SpaceTimeConstraint{conflict.second, conflict.v, conflict.time}, {});
    } else {
        c1 = detail::child_with(ctx, node, a, {}, EdgeConstraint{conflict.first, conflict.v, conflict.w, conflict.time});
        c2 = detail::child_with(ctx, node, b, {}, EdgeConstraint{conflict.second, conflict.w, conflict.v, conflict.time});
    }
    if (c1) out.push_back(std::move(*c1));
    if (c2) out.push_back(std::move(*c2));
    return out;
}

/// For a conflict-free node: one child per agent requiring a path at least one
/// step longer than its current one, within that agent's horizon.
inline std::vector<CtNode> lengthen(const CbsContext& ctx, const CtNode& node)
{
    std::vector<CtNode> out;
    for (std::size_t i = 0; i < ctx.agents.size(); ++i) {
        const int m = static_cast<int>(node.solution.paths[i].length()) + 1;
        if (m > ctx.horizon[i]) continue;
        if (auto c = detail::child_with(ctx, node, i, {}, {}, m)) out.push_back(std::move(*c));
    }
    return out;
}

class FairCbs
{
public:
    FairCbs(const InstanceSpec& inst, SolveOptions opts, SwapEncoding enc = SwapEncoding::Edge)
        : inst_(inst), opts_(std::move(opts)), cfg_(fairness_config(inst.epsilon, opts_)),
          deadline_(opts_.limits.time_limit_s), shortest_(shortest_step_vector(inst_)),
          ctx_(inst_.map, inst_.agents, horizons(inst_, shortest_, opts_.limits), enc)
    {}

    SolveResult solve()
    {
        SolveResult result;
        result.algorithm = "cbs";
        const double eps = cfg_.effective_epsilon();
        if (!envy_free_reachable(inst_.agents, shortest_, ctx_.horizon, eps)) {
            result.status = SolveStatus::NoFairPlan;
            result.stats.exhausted = true;
            result.stats.runtime_s = deadline_.elapsed();
            return result;
        }

        auto root = ctx_.root();
        if (root) push(std::move(*root));

        std::optional<double> level;
        std::set<std::vector<std::vector<Vertex>>> seen_plans;
        bool halted = false;
        bool timed_out = false;
        while (!frontier_.empty()) {
            if (deadline_.expired()) {
                halted = timed_out = true;
                stats_.limit = "time";
                break;
            }
            if (level && !opts_.exhaustive && frontier_.top().cost > *level + kCostTolerance) break;
            const std::size_t id = frontier_.top().id;
            frontier_.pop();
            CtNode node = std::move(nodes_[id]);
            nodes_[id] = CtNode{};
            ++stats_.nodes_expanded;

            const auto conflict = find_conflict(node.solution);
            std::vector<CtNode> children;
            if (!conflict) {
                if (is_envy_free(welfare_vector(node.solution, inst_.agents), eps)) {
                    std::vector<std::vector<Vertex>> key;
                    for (const auto& p : node.solution.paths) key.push_back(p.vertices);
                    if (seen_plans.insert(std::move(key)).second) accumulator_.push_back(node.solution);
                    if (!level) level = node.cost;
                }
                children = lengthen(ctx_, node);
            } else {
                children = expand(ctx_, node, *conflict);
            }
            for (auto& c : children) push(std::move(c));
            if (nodes_.size() > opts_.limits.max_ct_nodes) {
                halted = true;
                stats_.limit = "ct-nodes";
                break;
            }
        }

        result.candidates = std::move(accumulator_);
        result.stats = stats_;
        result.stats.final_bound = level.value_or(0.0);
        if (halted) {
            result.status = timed_out ? SolveStatus::Timeout : SolveStatus::Truncated;
            result.stats.candidates = result.candidates.size();
        } else {
            result.stats.exhausted = result.candidates.empty();
            select_fair_plan(result, inst_.agents, cfg_);
        }
        result.stats.runtime_s = deadline_.elapsed();
        return result;
    }

private:
    struct Entry
    {
        double cost;
        std::size_t id;
    };
    struct Later
    {
        bool operator()(const Entry& a, const Entry& b) const noexcept
        {
            if (a.cost != b.cost) return a.cost > b.cost;
            return a.id > b.id;
        }
    };

    /// Path lengths only grow down the tree, so a node whose lengths already
    /// rule out every envy-free completion within the horizon is dropped.
    bool hopeless(const CtNode& n) const
    {
        const auto lengths = step_counts(n.solution);
        return !envy_free_reachable(inst_.agents, lengths, ctx_.horizon, cfg_.effective_epsilon());
    }

    void push(CtNode n)
    {
        ++stats_.nodes_generated;
        if (hopeless(n)) return;
        if (!seen_nodes_.emplace(n.constraints, n.edge_constraints, n.min_lengths).second) return;
        frontier_.push({n.cost, nodes_.size()});
        nodes_.push_back(std::move(n));
    }

    const InstanceSpec& inst_;
    SolveOptions opts_;
    FairnessConfig cfg_;
    Deadline deadline_;
    StepVector shortest_;
    CbsContext ctx_;
    std::vector<CtNode> nodes_;
    std::priority_queue<Entry, std::vector<Entry>, Later> frontier_;
    std::set<std::tuple<std::vector<SpaceTimeConstraint>, std::vector<EdgeConstraint>, std::vector<int>>> seen_nodes_;
    PlanSet accumulator_;
    SolveStats stats_;
};

/// Runs the constraint tree best-first until the cost level of the first
/// envy-free conflict-free leaf is complete, then filters and returns the
/// welfare maximizer.
inline SolveResult fair_cbs_solve(const InstanceSpec& inst, const SolveOptions& opts = {},
                                  SwapEncoding enc = SwapEncoding::Edge)
{
    FairCbs search(inst, opts, enc);
    return search.solve();
}

}  // namespace fairmapf

#endif  // FAIRMAPF_CBS_HPP
