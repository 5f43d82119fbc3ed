#ifndef FAIRMAPF_ICTS_HPP
#define FAIRMAPF_ICTS_HPP

// Fair Increasing Cost Tree Search.
//
// The high level is an IDA* over joint step vectors: a node fixes how many
// timesteps every agent uses, its children extend exactly one agent by one
// step, and f = g + h with g the extra cost above the shortest-path vector.
// The low level builds one time-expanded DAG per agent (all walks of exactly
// s_i steps, waits included) and streams the conflict-free members of their
// product.

#include <algorithm>
#include <array>
#include <cstdint>
#include <cmath>
#include <cstring>
#include <functional>
#include <limits>
#include <map>
#include <memory_resource>
#include <optional>
#include <queue>
#include <set>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "fairmapf/core.hpp"
#include "fairmapf/fairness.hpp"
#include "fairmapf/solve.hpp"

namespace fairmapf {

// ---------------------------------------------------------------------------
// Per-agent DAG
// ---------------------------------------------------------------------------

/// Layer t holds the vertices an agent can occupy at time t on some walk of
/// exactly `steps` timesteps from start to goal. successors[t][k] indexes into
/// layers[t + 1]. An empty DAG (no layers) means no such walk exists.
struct TimeExpandedDag
{
    int steps = -1;
    std::vector<std::vector<Vertex>> layers;
    std::vector<std::vector<std::vector<std::uint32_t>>> successors;

    bool empty() const noexcept { return layers.empty(); }

    /// Root-to-leaf path count, saturating at uint64 max.
    std::uint64_t path_count() const
    {
        if (empty()) return 0;
        std::vector<std::uint64_t> below(layers.back().size(), 1);
        for (int t = steps - 1; t >= 0; --t) {
            std::vector<std::uint64_t> here(layers[static_cast<std::size_t>(t)].size(), 0);
            for (std::size_t k = 0; k < here.size(); ++k)
                for (auto s : successors[static_cast<std::size_t>(t)][k]) {
                    const std::uint64_t add = below[s];
                    here[k] = here[k] > std::numeric_limits<std::uint64_t>::max() - add
                                  ? std::numeric_limits<std::uint64_t>::max()
                                  : here[k] + add;
                }
            below = std::move(here);
        }
        return below.front();
    }

    /// Every root-to-leaf path in lexicographic vertex order.
    std::vector<Path> paths() const
    {
        std::vector<Path> out;
        if (empty()) return out;
        Path cur;
        cur.vertices.resize(static_cast<std::size_t>(steps) + 1);
        std::function<void(std::size_t, std::uint32_t)> walk = [&](std::size_t t, std::uint32_t k) {
            cur.vertices[t] = layers[t][k];
            if (t == static_cast<std::size_t>(steps)) {
                out.push_back(cur);
                return;
            }
            for (auto s : successors[t][k]) walk(t + 1, s);
        };
        walk(0, 0);
        return out;
    }
};

/// Forward layer expansion from (start, 0) over N(v) and the wait action, then
/// leaves other than (goal, s) are pruned back to the root. With
/// `goal_distances` (distance_map to the goal), the forward pass already skips
/// cells too far from the goal to arrive in time; the result is the same DAG.
inline TimeExpandedDag build_dag(const GridGraph& g, const AgentType& agent, int s,
                                 const std::vector<int>* goal_distances = nullptr)
{
    TimeExpandedDag dag;
    dag.steps = s;
    if (s < 0 || !g.passable(agent.start) || !g.passable(agent.goal)) return dag;

    std::vector<std::vector<Vertex>> layers(static_cast<std::size_t>(s) + 1);
    layers[0] = {agent.start};
    std::vector<std::uint8_t> seen(g.size(), 0);
    std::array<Vertex, 4> nb{};
    for (std::size_t t = 0; t < static_cast<std::size_t>(s); ++t) {
        std::fill(seen.begin(), seen.end(), std::uint8_t{0});
        auto& next = layers[t + 1];
        for (Vertex v : layers[t]) {
            const std::size_t n = g.neighbors(v, nb);
            for (std::size_t k = 0; k <= n; ++k) {
                const Vertex w = k < n ? nb[k] : v;
                if (goal_distances != nullptr &&
                    (*goal_distances)[static_cast<std::size_t>(w)] > s - static_cast<int>(t) - 1)
                    continue;
                if (!seen[static_cast<std::size_t>(w)]) {
                    seen[static_cast<std::size_t>(w)] = 1;
                    next.push_back(w);
                }
            }
        }
        std::sort(next.begin(), next.end());
    }

    // Backward pruning: alive[t][k] iff layers[t][k] reaches (goal, s).
    std::vector<std::vector<std::uint8_t>> alive(layers.size());
    for (std::size_t t = 0; t < layers.size(); ++t) alive[t].assign(layers[t].size(), 0);
    for (std::size_t k = 0; k < layers.back().size(); ++k) alive.back()[k] = layers.back()[k] == agent.goal;
    for (std::size_t t = layers.size() - 1; t-- > 0;) {
        std::fill(seen.begin(), seen.end(), std::uint8_t{0});
        for (std::size_t k = 0; k < layers[t + 1].size(); ++k)
            if (alive[t + 1][k]) seen[static_cast<std::size_t>(layers[t + 1][k])] = 1;
        for (std::size_t k = 0; k < layers[t].size(); ++k) {
            const Vertex v = layers[t][k];
            bool any = seen[static_cast<std::size_t>(v)] != 0;
            const std::size_t n = g.neighbors(v, nb);
            for (std::size_t j = 0; j < n && !any; ++j) any = seen[static_cast<std::size_t>(nb[j])] != 0;
            alive[t][k] = any;
        }
    }
    if (!alive[0][0]) return dag;

    dag.layers.resize(layers.size());
    std::vector<std::vector<std::uint32_t>> remap(layers.size());
    for (std::size_t t = 0; t < layers.size(); ++t) {
        remap[t].assign(layers[t].size(), std::numeric_limits<std::uint32_t>::max());
        for (std::size_t k = 0; k < layers[t].size(); ++k)
            if (alive[t][k]) {
                remap[t][k] = static_cast<std::uint32_t>(dag.layers[t].size());
                dag.layers[t].push_back(layers[t][k]);
            }
    }
    dag.successors.resize(layers.size() - 1);
    std::vector<std::uint32_t> index_of(g.size(), std::numeric_limits<std::uint32_t>::max());
    for (std::size_t t = 0; t + 1 < dag.layers.size(); ++t) {
        for (std::size_t k = 0; k < dag.layers[t + 1].size(); ++k)
            index_of[static_cast<std::size_t>(dag.layers[t + 1][k])] = static_cast<std::uint32_t>(k);
        auto& succ = dag.successors[t];
        succ.resize(dag.layers[t].size());
        for (std::size_t k = 0; k < dag.layers[t].size(); ++k) {
            const Vertex v = dag.layers[t][k];
            const std::size_t n = g.neighbors(v, nb);
            for (std::size_t j = 0; j <= n; ++j) {
                const Vertex w = j < n ? nb[j] : v;
                const auto idx = index_of[static_cast<std::size_t>(w)];
                if (idx != std::numeric_limits<std::uint32_t>::max()) succ[k].push_back(idx);
            }
            std::sort(succ[k].begin(), succ[k].end());
        }
        for (Vertex v : dag.layers[t + 1]) index_of[static_cast<std::size_t>(v)] = std::numeric_limits<std::uint32_t>::max();
    }
    return dag;
}

// ---------------------------------------------------------------------------
// Joint product with conflict pruning
// ---------------------------------------------------------------------------

/// Streams every conflict-free joint plan of a DAG product. Agents whose DAG
/// is shorter than the current layer have already disappeared and take no part
/// in conflicts. Joint nodes shown to have no conflict-free completion are
/// remembered and never re-entered.
class JointProduct
{
public:
    enum class Outcome { Complete, Stopped, TimedOut };

    explicit JointProduct(std::vector<const TimeExpandedDag*> dags, const Deadline* deadline = nullptr)
        : dags_(std::move(dags)), deadline_(deadline)
    {
        for (const auto* d : dags_) horizon_ = std::max(horizon_, d->steps);
        movers_.resize(static_cast<std::size_t>(std::max(horizon_, 0)) + 1);
        for (int t = 0; t < horizon_; ++t)
            for (std::size_t i = 0; i < dags_.size(); ++i)
                if (active(i, t + 1)) movers_[static_cast<std::size_t>(t)].push_back(i);
        next_.assign(movers_.size(), std::vector<std::uint32_t>(dags_.size(), 0));
    }

    /// `emit` returns false to stop the stream.
    Outcome enumerate(const std::function<bool(const JointPlan&)>& emit)
    {
        emit_ = &emit;
        outcome_ = Outcome::Complete;
        for (const auto* d : dags_)
            if (d->empty()) return outcome_;
        const std::size_t n = dags_.size();
        plan_.paths.assign(n, Path{});
        for (std::size_t i = 0; i < n; ++i) plan_.paths[i].vertices.assign(static_cast<std::size_t>(dags_[i]->steps) + 1, 0);
        std::vector<std::uint32_t> idx(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            plan_.paths[i].vertices[0] = dags_[i]->layers[0][0];
            for (std::size_t j = 0; j < i; ++j)
                if (plan_.paths[i].vertices[0] == plan_.paths[j].vertices[0]) return outcome_;
        }
        descend(0, idx);
        return outcome_;
    }

    std::size_t dead_states() const noexcept { return dead_.size(); }

private:
    enum class Walk { Dead, Alive, Halt };

    bool active(std::size_t agent, int t) const noexcept { return dags_[agent]->steps >= t; }

    std::string key(int t, const std::vector<std::uint32_t>& idx) const
    {
        std::string k(sizeof(int) + idx.size() * sizeof(std::uint32_t), '\0');
        std::memcpy(k.data(), &t, sizeof(int));
        std::memcpy(k.data() + sizeof(int), idx.data(), idx.size() * sizeof(std::uint32_t));
        return k;
    }

    Walk descend(int t, std::vector<std::uint32_t>& idx)
    {
        if ((++calls_ & 1023u) == 0 && deadline_ != nullptr && deadline_->expired()) {
            outcome_ = Outcome::TimedOut;
            return Walk::Halt;
        }
        if (t == horizon_) return (*emit_)(plan_) ? Walk::Alive : (outcome_ = Outcome::Stopped, Walk::Halt);
        const std::string k = key(t, idx);
        if (dead_.contains(k)) return Walk::Dead;

        // Agents still present at t + 1 choose successors one after another.
        auto& next = next_[static_cast<std::size_t>(t)];
        next = idx;
        const Walk w = choose(t, idx, next, movers_[static_cast<std::size_t>(t)], 0);
        if (w == Walk::Dead) dead_.insert(k);
        return w;
    }

    Walk choose(int t, const std::vector<std::uint32_t>& idx, std::vector<std::uint32_t>& next,
                const std::vector<std::size_t>& movers, std::size_t m)
    {
        if (m == movers.size()) return descend(t + 1, next);
        const std::size_t i = movers[m];
        const auto ts = static_cast<std::size_t>(t);
        const Vertex from = dags_[i]->layers[ts][idx[i]];
        Walk result = Walk::Dead;
        for (std::uint32_t s : dags_[i]->successors[ts][idx[i]]) {
            const Vertex to = dags_[i]->layers[ts + 1][s];
            bool clash = false;
            for (std::size_t q = 0; q < m && !clash; ++q) {
                const std::size_t j = movers[q];
                const Vertex jfrom = plan_.paths[j].vertices[ts];
                const Vertex jto = plan_.paths[j].vertices[ts + 1];
                clash = jto == to || (jfrom == to && jto == from);
            }
            if (clash) continue;
            next[i] = s;
            plan_.paths[i].vertices[ts + 1] = to;
            const Walk w = choose(t, idx, next, movers, m + 1);
            if (w == Walk::Halt) return w;
            if (w == Walk::Alive) result = Walk::Alive;
        }
        return result;
    }

    std::vector<const TimeExpandedDag*> dags_;
    const Deadline* deadline_ = nullptr;
    int horizon_ = 0;
    JointPlan plan_;
    const std::function<bool(const JointPlan&)>* emit_ = nullptr;
    Outcome outcome_ = Outcome::Complete;
    std::unordered_set<std::string> dead_;
    std::vector<std::vector<std::size_t>> movers_;
    std::vector<std::vector<std::uint32_t>> next_;
    std::uint32_t calls_ = 0;
};

/// Materializes the conflict-free product (small inputs only).
inline PlanSet joint_product_paths(std::span<const TimeExpandedDag> dags)
{
    std::vector<const TimeExpandedDag*> ptrs;
    for (const auto& d : dags) ptrs.push_back(&d);
    PlanSet out;
    JointProduct(ptrs).enumerate([&](const JointPlan& p) {
        out.push_back(p);
        return true;
    });
    return out;
}

// ---------------------------------------------------------------------------
// High level
// ---------------------------------------------------------------------------

struct SearchNode
{
    StepVector steps;
    double g = 0.0;
    double h = 0.0;
    double f() const noexcept { return g + h; }
};

using HeuristicEstimate = std::function<double(const StepVector&)>;

inline double zero_heuristic(const StepVector&) { return 0.0; }

struct DepthBoundResult
{
    bool found = false;
    double min_exceeding = std::numeric_limits<double>::infinity();
};

class FairIcts
{
public:
    FairIcts(const InstanceSpec& inst, SolveOptions opts, HeuristicEstimate heuristic = zero_heuristic)
        : inst_(inst), opts_(std::move(opts)), cfg_(fairness_config(inst.epsilon, opts_)),
          heuristic_(std::move(heuristic)), deadline_(opts_.limits.time_limit_s)
    {
        shortest_ = shortest_step_vector(inst_);
        horizon_ = horizons(inst_, shortest_, opts_.limits);
    }

    const StepVector& root_steps() const noexcept { return shortest_; }
    const std::vector<int>& horizon() const noexcept { return horizon_; }

    SearchNode node(const StepVector& s) const
    {
        double g = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i)
            g += static_cast<double>(s[i] - shortest_[i]) * inst_.agents[i].step_cost;
        return {s, g, heuristic_(s)};
    }

    SearchNode root() const { return node(shortest_); }

    /// One bounded pass over the step-vector tree. Nodes with f <= bound are
    /// visited once each; envy-free nodes above `harvested_below` contribute
    /// their conflict-free plans to the accumulator.
    DepthBoundResult depth_bound_search(double bound, double harvested_below = -std::numeric_limits<double>::infinity())
    {
        bound_ = bound;
        harvested_below_ = harvested_below;
        reset_visited();
        DepthBoundResult r;
        if (within_horizon(shortest_)) {
            const auto* stored = mark(shortest_);
            r.found = visit(shortest_, stored, r.min_exceeding);
        }
        while (!fringe_.empty()) {
            r.min_exceeding = std::min(r.min_exceeding, fringe_.top().f);
            fringe_.pop();
        }
        return r;
    }

    SolveResult solve()
    {
        SolveResult result;
        result.algorithm = "icts";
        const double eps = cfg_.effective_epsilon();
        if (!envy_free_reachable(inst_.agents, shortest_, horizon_, eps)) {
            result.status = SolveStatus::NoFairPlan;
            result.stats.exhausted = true;
            result.stats.runtime_s = deadline_.elapsed();
            return result;
        }

        // Each pass resumes from the nodes the previous pass stopped at, so a
        // node is expanded once over the whole search.
        reset_visited();
        bound_ = root().f();
        harvested_below_ = -std::numeric_limits<double>::infinity();
        if (within_horizon(shortest_)) fringe_.push({root().f(), mark(shortest_)});
        while (true) {
            ++stats_.iterations;
            stats_.final_bound = bound_;
            double min_exceeding = std::numeric_limits<double>::infinity();
            while (!fringe_.empty() && !halted_ && fringe_.top().f <= bound_ + kCostTolerance) {
                const StepVector s(fringe_.top().steps->begin(), fringe_.top().steps->end());
                fringe_.pop();
                expand(s, min_exceeding);
            }
            if (!fringe_.empty()) min_exceeding = std::min(min_exceeding, fringe_.top().f);
            if (halted_) break;
            if (!opts_.exhaustive && !accumulator_.empty()) break;
            if (min_exceeding == std::numeric_limits<double>::infinity() || min_exceeding > opts_.limits.max_bound) {
                stats_.exhausted = accumulator_.empty();
                break;
            }
            bound_ = min_exceeding;
        }

        result.candidates = std::move(accumulator_);
        result.stats = stats_;
        if (halted_) {
            result.status = timed_out_ ? SolveStatus::Timeout : SolveStatus::Truncated;
            result.stats.candidates = result.candidates.size();
        } else {
            select_fair_plan(result, inst_.agents, cfg_);
        }
        result.stats.runtime_s = deadline_.elapsed();
        return result;
    }

    const PlanSet& accumulator() const noexcept { return accumulator_; }
    const SolveStats& stats() const noexcept { return stats_; }

private:
    using StoredSteps = std::pmr::vector<int>;
    struct FringeEntry
    {
        double f;
        const StoredSteps* steps;
        bool operator>(const FringeEntry& o) const { return f != o.f ? f > o.f : *steps > *o.steps; }
    };
    struct StepsHash
    {
        using is_transparent = void;
        std::size_t operator()(std::span<const int> s) const noexcept
        {
            std::uint64_t h = 0x9e3779b97f4a7c15ull;
            for (int v : s) h = (h ^ static_cast<std::uint64_t>(v)) * 0x100000001b3ull;
            return static_cast<std::size_t>(h ^ (h >> 29));
        }
    };
    struct StepsEqual
    {
        using is_transparent = void;
        bool operator()(std::span<const int> a, std::span<const int> b) const noexcept
        {
            return std::ranges::equal(a, b);
        }
    };
    using VisitedSet = std::pmr::unordered_set<StoredSteps, StepsHash, StepsEqual>;

    /// Visited step vectors live in one pool that is released wholesale.
    void reset_visited()
    {
        fringe_ = {};
        visited_.reset();
        pool_.release();
        visited_.emplace(0, StepsHash{}, StepsEqual{}, &pool_);
    }

    /// Stored copy of `s`, or nullptr if it was already visited.
    const StoredSteps* mark(const StepVector& s)
    {
        if (visited_->find(std::span<const int>(s)) != visited_->end()) return nullptr;
        return &*visited_->emplace(s.begin(), s.end()).first;
    }

    bool within_horizon(const StepVector& s) const
    {
        for (std::size_t i = 0; i < s.size(); ++i)
            if (s[i] > horizon_[i]) return false;
        return true;
    }

    /// Nodes above the bound go to the fringe for a later pass.
    bool visit(const StepVector& s, const StoredSteps* stored, double& min_exceeding)
    {
        const SearchNode n = node(s);
        ++stats_.nodes_generated;
        if (n.f() > bound_ + kCostTolerance) {
            min_exceeding = std::min(min_exceeding, n.f());
            fringe_.push({n.f(), stored});
            return false;
        }
        return expand(s, min_exceeding, n.f());
    }

    bool expand(const StepVector& s, double& min_exceeding,
                double f = std::numeric_limits<double>::quiet_NaN())
    {
        if (deadline_.expired()) {
            halt(true, "time");
            return false;
        }
        if (std::isnan(f)) f = node(s).f();
        ++stats_.nodes_expanded;
        if (f > harvested_below_ + kCostTolerance) harvest(s);
        if (halted_) return false;

        bool found = !accumulator_.empty();
        StepVector child = s;
        for (std::size_t i = 0; i < s.size() && !halted_; ++i) {
            if (child[i] + 1 > horizon_[i]) continue;
            ++child[i];
            if (const auto* stored = mark(child); stored && visit(child, stored, min_exceeding)) found = true;
            --child[i];
        }
        return found;
    }

    void harvest(const StepVector& s)
    {
        const WelfareVector w = welfare_vector(s, inst_.agents);
        if (!is_envy_free(w, cfg_.effective_epsilon())) return;
        std::vector<const TimeExpandedDag*> dags;
        for (std::size_t i = 0; i < s.size(); ++i) {
            const TimeExpandedDag& d = dag(i, s[i]);
            if (d.empty()) return;
            dags.push_back(&d);
        }
        std::size_t emitted = 0;
        const auto outcome = JointProduct(dags, &deadline_).enumerate([&](const JointPlan& p) {
            ++stats_.plans_enumerated;
            if (++emitted > opts_.limits.max_plans_per_node) {
                halt(false, "plans-per-node");
                return false;
            }
            accumulator_.push_back(p);
            return opts_.retention == PlanRetention::All;
        });
        if (outcome == JointProduct::Outcome::TimedOut) halt(true, "time");
    }

    const TimeExpandedDag& dag(std::size_t agent, int s)
    {
        auto [it, inserted] = dags_.try_emplace({agent, s});
        if (inserted) {
            if (goal_distances_.empty())
                for (const auto& a : inst_.agents) goal_distances_.push_back(distance_map(inst_.map, a.goal));
            it->second = build_dag(inst_.map, inst_.agents[agent], s, &goal_distances_[agent]);
        }
        return it->second;
    }

    void halt(bool timeout, const char* why)
    {
        halted_ = true;
        timed_out_ = timeout;
        stats_.limit = why;
    }

    const InstanceSpec& inst_;
    SolveOptions opts_;
    FairnessConfig cfg_;
    HeuristicEstimate heuristic_;
    Deadline deadline_;
    StepVector shortest_;
    std::vector<int> horizon_;
    double bound_ = 0.0;
    double harvested_below_ = -std::numeric_limits<double>::infinity();
    std::pmr::monotonic_buffer_resource pool_;
    std::optional<VisitedSet> visited_;
    std::priority_queue<FringeEntry, std::vector<FringeEntry>, std::greater<>> fringe_;
    std::vector<std::vector<int>> goal_distances_;
    std::map<std::pair<std::size_t, int>, TimeExpandedDag> dags_;
    PlanSet accumulator_;
    SolveStats stats_;
    bool halted_ = false;
    bool timed_out_ = false;
};

/// Deepens the cost bound until a complete pass leaves envy-free conflict-free
/// plans in the accumulator, then filters them and returns the welfare maximizer.
inline SolveResult fair_icts_solve(const InstanceSpec& inst, const SolveOptions& opts = {})
{
    FairIcts search(inst, opts);
    return search.solve();
}

}  // namespace fairmapf

#endif  // FAIRMAPF_ICTS_HPP
