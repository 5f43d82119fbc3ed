#ifndef FAIRMAPF_CORE_HPP
#define FAIRMAPF_CORE_HPP

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace fairmapf {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition (endpoint mismatch, arity, ...).
class ContractViolation : public Error
{
public:
    using Error::Error;
};

class UnreachableError : public Error
{
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Grid
// ---------------------------------------------------------------------------

/// Vertices are row-major cell indices: v = y * width + x.
using Vertex = std::int32_t;

struct Cell
{
    int x = 0;
    int y = 0;
    friend bool operator==(const Cell&, const Cell&) = default;
};

/// 4-connected grid. Waiting is an action, never a self-loop edge.
class GridGraph
{
public:
    GridGraph() = default;

    GridGraph(int width, int height, std::vector<std::uint8_t> passable)
        : width_(width), height_(height), passable_(std::move(passable))
    {
        if (width <= 0 || height <= 0)
            throw ContractViolation("grid dimensions must be positive");
        if (passable_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
            throw ContractViolation("passable mask size does not match width * height");
    }

    static GridGraph open(int width, int height)
    {
        return GridGraph(width, height,
                         std::vector<std::uint8_t>(static_cast<std::size_t>(width) * height, 1));
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return passable_.size(); }

    bool contains(Cell c) const noexcept { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }
    bool contains(Vertex v) const noexcept { return v >= 0 && static_cast<std::size_t>(v) < passable_.size(); }

    Vertex vertex(Cell c) const noexcept { return c.y * width_ + c.x; }
    Vertex vertex(int x, int y) const noexcept { return y * width_ + x; }
    Cell cell(Vertex v) const noexcept { return {v % width_, v / width_}; }

    bool passable(Vertex v) const noexcept { return contains(v) && passable_[static_cast<std::size_t>(v)] != 0; }
    bool passable(Cell c) const noexcept { return contains(c) && passable_[static_cast<std::size_t>(vertex(c))] != 0; }

    std::size_t passable_count() const noexcept
    {
        return static_cast<std::size_t>(std::count(passable_.begin(), passable_.end(), std::uint8_t{1}));
    }

    /// Passable orthogonal neighbors in ascending vertex order. Returns the count written.
    std::size_t neighbors(Vertex v, std::array<Vertex, 4>& out) const noexcept
    {
        std::size_t n = 0;
        const Cell c = cell(v);
        if (c.y > 0 && passable_[static_cast<std::size_t>(v - width_)]) out[n++] = v - width_;
        if (c.x > 0 && passable_[static_cast<std::size_t>(v - 1)]) out[n++] = v - 1;
        if (c.x + 1 < width_ && passable_[static_cast<std::size_t>(v + 1)]) out[n++] = v + 1;
        if (c.y + 1 < height_ && passable_[static_cast<std::size_t>(v + width_)]) out[n++] = v + width_;
        return n;
    }

    bool adjacent(Vertex a, Vertex b) const noexcept
    {
        const Cell ca = cell(a), cb = cell(b);
        return std::abs(ca.x - cb.x) + std::abs(ca.y - cb.y) == 1;
    }

    const std::vector<std::uint8_t>& mask() const noexcept { return passable_; }

    friend bool operator==(const GridGraph&, const GridGraph&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> passable_;
};

// ---------------------------------------------------------------------------
// Agents, paths, plans
// ---------------------------------------------------------------------------

struct AgentType
{
    int id = 0;
    Vertex start = 0;
    Vertex goal = 0;
    double utility = 0.0;
    double step_cost = 1.0;

    friend bool operator==(const AgentType&, const AgentType&) = default;
};

inline void validate_agent(const GridGraph& g, const AgentType& a)
{
    if (!(a.step_cost > 0.0)) throw ContractViolation("agent " + std::to_string(a.id) + ": step_cost must be > 0");
    if (!(a.utility >= 0.0)) throw ContractViolation("agent " + std::to_string(a.id) + ": utility must be >= 0");
    if (!g.passable(a.start) || !g.passable(a.goal))
        throw ContractViolation("agent " + std::to_string(a.id) + ": start and goal must be passable");
}

/// Vertex occupied at each timestamp 0..length(). |path| counts timesteps, so a
/// path listing s+1 vertices has length s.
struct Path
{
    std::vector<Vertex> vertices;

    std::size_t length() const noexcept { return vertices.empty() ? 0 : vertices.size() - 1; }
    Vertex at(std::size_t t) const { return vertices.at(t); }
    Vertex front() const { return vertices.front(); }
    Vertex back() const { return vertices.back(); }

    /// An agent is present from t = 0 through its arrival and disappears afterwards.
    bool active_at(std::size_t t) const noexcept { return !vertices.empty() && t <= length(); }

    friend bool operator==(const Path&, const Path&) = default;
    friend auto operator<=>(const Path&, const Path&) = default;
};

inline bool is_valid_path(const GridGraph& g, const AgentType& agent, const Path& p)
{
    if (p.vertices.empty() || p.front() != agent.start || p.back() != agent.goal) return false;
    for (std::size_t t = 0; t < p.vertices.size(); ++t) {
        if (!g.passable(p.vertices[t])) return false;
        if (t > 0 && p.vertices[t] != p.vertices[t - 1] && !g.adjacent(p.vertices[t], p.vertices[t - 1]))
            return false;
    }
    return true;
}

struct JointPlan
{
    std::vector<Path> paths;

    std::size_t agent_count() const noexcept { return paths.size(); }
    std::size_t makespan() const noexcept
    {
        std::size_t m = 0;
        for (const auto& p : paths) m = std::max(m, p.length());
        return m;
    }

    friend bool operator==(const JointPlan&, const JointPlan&) = default;
    friend auto operator<=>(const JointPlan&, const JointPlan&) = default;
};

using PlanSet = std::vector<JointPlan>;
using WelfareVector = std::vector<double>;
using StepVector = std::vector<int>;

inline StepVector step_counts(const JointPlan& plan)
{
    StepVector k;
    k.reserve(plan.paths.size());
    for (const auto& p : plan.paths) k.push_back(static_cast<int>(p.length()));
    return k;
}

// ---------------------------------------------------------------------------
// Welfare
// ---------------------------------------------------------------------------

/// W = u - length * c_step. Negative values are allowed.
inline double welfare(const AgentType& agent, std::size_t length) noexcept
{
    return agent.utility - static_cast<double>(length) * agent.step_cost;
}

inline double welfare(const AgentType& agent, const Path& path)
{
    if (path.vertices.empty() || path.front() != agent.start || path.back() != agent.goal)
        throw ContractViolation("path endpoints do not match agent " + std::to_string(agent.id));
    return welfare(agent, path.length());
}

inline void require_arity(const JointPlan& plan, std::span<const AgentType> agents)
{
    if (plan.paths.size() != agents.size())
        throw ContractViolation("plan has " + std::to_string(plan.paths.size()) + " paths for " +
                                std::to_string(agents.size()) + " agents");
}

inline WelfareVector welfare_vector(const JointPlan& plan, std::span<const AgentType> agents)
{
    require_arity(plan, agents);
    WelfareVector w;
    w.reserve(agents.size());
    for (std::size_t i = 0; i < agents.size(); ++i) w.push_back(welfare(agents[i], plan.paths[i]));
    return w;
}

inline WelfareVector welfare_vector(const StepVector& steps, std::span<const AgentType> agents)
{
    WelfareVector w;
    w.reserve(agents.size());
    for (std::size_t i = 0; i < agents.size(); ++i)
        w.push_back(welfare(agents[i], static_cast<std::size_t>(steps[i])));
    return w;
}

inline double sum(std::span<const double> xs) noexcept
{
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
}

inline double social_welfare(const JointPlan& plan, std::span<const AgentType> agents)
{
    const WelfareVector w = welfare_vector(plan, agents);
    return sum(w);
}

/// Sum of individual costs, sum_i |pi_i| * c_i.
inline double plan_cost(const StepVector& steps, std::span<const AgentType> agents) noexcept
{
    double c = 0.0;
    for (std::size_t i = 0; i < agents.size(); ++i) c += static_cast<double>(steps[i]) * agents[i].step_cost;
    return c;
}

inline double plan_cost(const JointPlan& plan, std::span<const AgentType> agents)
{
    require_arity(plan, agents);
    return plan_cost(step_counts(plan), agents);
}

// ---------------------------------------------------------------------------
// Conflicts
// ---------------------------------------------------------------------------

struct Conflict
{
    enum class Kind { Vertex, Swap };

    Kind kind = Kind::Vertex;
    int first = 0;   // lower agent id
    int second = 0;  // higher agent id
    /// Vertex conflict: the shared vertex. Swap: where `first` was at time - 1.
    Vertex v = 0;
    /// Swap only: where `first` is at `time` (and `second` was at time - 1).
    Vertex w = 0;
    /// Vertex conflict: the shared timestamp. Swap: the arrival timestamp t + 1.
    int time = 0;

    friend bool operator==(const Conflict&, const Conflict&) = default;
};

/// Earliest first; ties by agent pair, then vertex before swap.
inline bool conflict_before(const Conflict& a, const Conflict& b) noexcept
{
    return std::tuple(a.time, a.first, a.second, static_cast<int>(a.kind), a.v, a.w) <
           std::tuple(b.time, b.first, b.second, static_cast<int>(b.kind), b.v, b.w);
}

/// Conflicts between mutually active agents. Agents occupy nothing before t = 0
/// and vanish after arrival.
inline std::vector<Conflict> check_feasible(const JointPlan& plan)
{
    std::vector<Conflict> out;
    const auto& ps = plan.paths;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        for (std::size_t j = i + 1; j < ps.size(); ++j) {
            const std::size_t shared = std::min(ps[i].length(), ps[j].length());
            if (ps[i].vertices.empty() || ps[j].vertices.empty()) continue;
            for (std::size_t t = 0; t <= shared; ++t) {
                if (ps[i].vertices[t] == ps[j].vertices[t])
                    out.push_back({Conflict::Kind::Vertex, static_cast<int>(i), static_cast<int>(j),
                                   ps[i].vertices[t], ps[i].vertices[t], static_cast<int>(t)});
                if (t < shared) {
                    const Vertex a0 = ps[i].vertices[t], a1 = ps[i].vertices[t + 1];
                    const Vertex b0 = ps[j].vertices[t], b1 = ps[j].vertices[t + 1];
                    if (a0 != a1 && a0 == b1 && a1 == b0)
                        out.push_back({Conflict::Kind::Swap, static_cast<int>(i), static_cast<int>(j), a0, a1,
                                       static_cast<int>(t + 1)});
                }
            }
        }
    }
    std::sort(out.begin(), out.end(), conflict_before);
    return out;
}

inline bool is_conflict_free(const JointPlan& plan) { return check_feasible(plan).empty(); }

}  // namespace fairmapf

#endif  // FAIRMAPF_CORE_HPP
