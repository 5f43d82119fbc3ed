#ifndef FAIRMAPF_SASSP_HPP
#define FAIRMAPF_SASSP_HPP

// Single-agent space-time shortest paths.

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <unordered_set>
#include <vector>

#include "fairmapf/core.hpp"

namespace fairmapf {

inline constexpr int kUnreachable = std::numeric_limits<int>::max();

/// BFS distances from `source` to every vertex (kUnreachable where blocked or cut off).
/// The grid is undirected, so this also serves as the reverse search from a goal.
inline std::vector<int> distance_map(const GridGraph& g, Vertex source)
{
    std::vector<int> dist(g.size(), kUnreachable);
    if (!g.passable(source)) return dist;
    std::vector<Vertex> frontier{source};
    dist[static_cast<std::size_t>(source)] = 0;
    std::array<Vertex, 4> nb{};
    for (std::size_t head = 0; head < frontier.size(); ++head) {
        const Vertex v = frontier[head];
        const std::size_t n = g.neighbors(v, nb);
        for (std::size_t k = 0; k < n; ++k) {
            auto& d = dist[static_cast<std::size_t>(nb[k])];
            if (d == kUnreachable) {
                d = dist[static_cast<std::size_t>(v)] + 1;
                frontier.push_back(nb[k]);
            }
        }
    }
    return dist;
}

/// Minimal timesteps from start to goal ignoring other agents.
inline int shortest_steps(const GridGraph& g, Vertex start, Vertex goal)
{
    if (!g.passable(start) || !g.passable(goal)) throw ContractViolation("shortest_steps: endpoint is not passable");
    const int d = distance_map(g, goal)[static_cast<std::size_t>(start)];
    if (d == kUnreachable) throw UnreachableError("goal is unreachable from start");
    return d;
}

struct SpaceTimeConstraint
{
    int agent = 0;
    Vertex vertex = 0;
    int timestamp = 0;

    friend bool operator==(const SpaceTimeConstraint&, const SpaceTimeConstraint&) = default;
    friend auto operator<=>(const SpaceTimeConstraint&, const SpaceTimeConstraint&) = default;
};

/// Forbids moving from `from` to `to` so as to arrive at `timestamp`.
struct EdgeConstraint
{
    int agent = 0;
    Vertex from = 0;
    Vertex to = 0;
    int timestamp = 0;

    friend bool operator==(const EdgeConstraint&, const EdgeConstraint&) = default;
    friend auto operator<=>(const EdgeConstraint&, const EdgeConstraint&) = default;
};

/// Options for the constrained search beyond the constraint set itself.
struct LowLevelQuery
{
    /// Longest admissible path (timesteps). Negative: shortest_steps + 2 * (width + height).
    int horizon = -1;
    /// Paths shorter than this are rejected. Lets callers ask for "at least k steps".
    int min_length = 0;
    /// Precomputed distance_map(g, agent.goal); computed on demand when empty.
    const std::vector<int>* goal_distances = nullptr;
    std::span<const EdgeConstraint> edge_constraints;
};

inline int default_horizon(const GridGraph& g, int shortest) { return shortest + 2 * (g.width() + g.height()); }

/// Space-time A* from the agent's start to its goal that never occupies a
/// constrained (vertex, timestamp) while present. The agent vanishes on arrival,
/// so constraints after the arrival time do not apply.
///
/// Heuristic: true distance to goal (reverse BFS), lifted by min_length - t.
/// Ties prefer larger g, then smaller vertex index.
inline std::optional<Path> constrained_shortest_path(const GridGraph& g, const AgentType& agent,
                                                     std::span<const SpaceTimeConstraint> constraints,
                                                     const LowLevelQuery& query = {})
{
    std::vector<int> own_distances;
    const std::vector<int>* dist = query.goal_distances;
    if (dist == nullptr) {
        own_distances = distance_map(g, agent.goal);
        dist = &own_distances;
    }
    const int d0 = (*dist)[static_cast<std::size_t>(agent.start)];
    if (d0 == kUnreachable) return std::nullopt;
    const int horizon = query.horizon >= 0 ? query.horizon : default_horizon(g, d0);
    if (std::max(d0, query.min_length) > horizon) return std::nullopt;

    const std::size_t n = g.size();
    auto key = [n](Vertex v, int t) { return static_cast<std::uint64_t>(t) * n + static_cast<std::uint64_t>(v); };

    std::unordered_set<std::uint64_t> blocked;
    for (const auto& c : constraints) {
        if (c.agent != agent.id)
            throw ContractViolation("constraint references agent " + std::to_string(c.agent) + " while planning " +
                                    std::to_string(agent.id));
        if (c.timestamp >= 0 && c.timestamp <= horizon && g.contains(c.vertex)) blocked.insert(key(c.vertex, c.timestamp));
    }
    if (blocked.contains(key(agent.start, 0))) return std::nullopt;
    std::set<std::tuple<Vertex, Vertex, int>> blocked_moves;
    for (const auto& c : query.edge_constraints) {
        if (c.agent != agent.id)
            throw ContractViolation("edge constraint references agent " + std::to_string(c.agent) + " while planning " +
                                    std::to_string(agent.id));
        blocked_moves.emplace(c.from, c.to, c.timestamp);
    }

    auto h = [&](Vertex v, int t) { return std::max((*dist)[static_cast<std::size_t>(v)], query.min_length - t); };

    struct Node
    {
        int f;
        int g;
        Vertex v;
        std::uint32_t index;
    };
    struct Worse
    {
        bool operator()(const Node& a, const Node& b) const noexcept
        {
            if (a.f != b.f) return a.f > b.f;
            if (a.g != b.g) return a.g < b.g;
            return a.v > b.v;
        }
    };

    // Parent links live in a flat arena; each state is expanded at most once.
    std::vector<std::pair<Vertex, std::int32_t>> arena;
    std::unordered_set<std::uint64_t> closed;
    std::priority_queue<Node, std::vector<Node>, Worse> open;
    arena.emplace_back(agent.start, -1);
    open.push({h(agent.start, 0), 0, agent.start, 0});

    std::array<Vertex, 4> nb{};
    while (!open.empty()) {
        const Node cur = open.top();
        open.pop();
        if (!closed.insert(key(cur.v, cur.g)).second) continue;
        if (cur.v == agent.goal && cur.g >= query.min_length) {
            Path p;
            p.vertices.resize(static_cast<std::size_t>(cur.g) + 1);
            std::int32_t idx = static_cast<std::int32_t>(cur.index);
            for (int t = cur.g; t >= 0; --t) {
                p.vertices[static_cast<std::size_t>(t)] = arena[static_cast<std::size_t>(idx)].first;
                idx = arena[static_cast<std::size_t>(idx)].second;
            }
            return p;
        }
        const int t1 = cur.g + 1;
        if (t1 > horizon) continue;
        std::size_t cnt = g.neighbors(cur.v, nb);
        std::array<Vertex, 5> moves{};
        for (std::size_t k = 0; k < cnt; ++k) moves[k] = nb[k];
        moves[cnt++] = cur.v;
        for (std::size_t k = 0; k < cnt; ++k) {
            const Vertex nv = moves[k];
            const int hv = h(nv, t1);
            if (hv == kUnreachable || t1 + hv > horizon) continue;
            if (blocked.contains(key(nv, t1)) || closed.contains(key(nv, t1))) continue;
            if (!blocked_moves.empty() && blocked_moves.contains({cur.v, nv, t1})) continue;
            arena.emplace_back(nv, static_cast<std::int32_t>(cur.index));
            open.push({t1 + hv, t1, nv, static_cast<std::uint32_t>(arena.size() - 1)});
        }
    }
    return std::nullopt;
}

}  // namespace fairmapf

#endif  // FAIRMAPF_SASSP_HPP
