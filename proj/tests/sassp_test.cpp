#include <gtest/gtest.h>

#include <set>
#include <tuple>

#include "fairmapf/oracle.hpp"
#include "fairmapf/sassp.hpp"

using namespace fairmapf;

namespace {

bool respects(const Path& p, const std::vector<SpaceTimeConstraint>& vc, const std::vector<EdgeConstraint>& ec)
{
    for (const auto& c : vc)
        if (static_cast<std::size_t>(c.timestamp) <= p.length() && p.vertices[static_cast<std::size_t>(c.timestamp)] == c.vertex)
            return false;
    for (const auto& c : ec) {
        const auto t = static_cast<std::size_t>(c.timestamp);
        if (t >= 1 && t <= p.length() && p.vertices[t - 1] == c.from && p.vertices[t] == c.to) return false;
    }
    return true;
}

/// Shortest admissible walk length by exhaustive walk enumeration, -1 if none.
int brute_length(const GridGraph& g, const AgentType& a, const std::vector<SpaceTimeConstraint>& vc,
                 const std::vector<EdgeConstraint>& ec, int horizon, int min_length)
{
    const auto walks = enumerate_walks(g, a, horizon);
    for (int s = min_length; s <= horizon; ++s)
        for (const auto& p : walks[static_cast<std::size_t>(s)])
            if (respects(p, vc, ec)) return s;
    return -1;
}

}  // namespace

TEST(ShortestSteps, ManhattanOnOpenGrid)
{
    const GridGraph g = GridGraph::open(5, 5);
    EXPECT_EQ(shortest_steps(g, g.vertex(0, 0), g.vertex(3, 4)), 7);
    EXPECT_EQ(shortest_steps(g, g.vertex(2, 2), g.vertex(2, 2)), 0);
}

TEST(ShortestSteps, EnclosedGoal)
{
    // Goal (2,2) walled in on all four sides.
    GridGraph g(5, 5, std::vector<std::uint8_t>(25, 1));
    std::vector<std::uint8_t> m = g.mask();
    for (auto [x, y] : {std::pair{2, 1}, std::pair{1, 2}, std::pair{3, 2}, std::pair{2, 3}}) m[static_cast<std::size_t>(y * 5 + x)] = 0;
    g = GridGraph(5, 5, m);
    EXPECT_THROW(shortest_steps(g, g.vertex(0, 0), g.vertex(2, 2)), UnreachableError);
}

TEST(ConstrainedShortestPath, Unconstrained)
{
    const GridGraph g = GridGraph::open(4, 4);
    const AgentType a{0, g.vertex(0, 0), g.vertex(3, 2), 1.0, 0.1};
    const auto p = constrained_shortest_path(g, a, {});
    ASSERT_TRUE(p);
    EXPECT_EQ(p->length(), 5u);
    EXPECT_TRUE(is_valid_path(g, a, *p));
}

TEST(ConstrainedShortestPath, BlockedArrivalCostsOneWait)
{
    // Blocking the goal at t = d is escaped by waiting once, so the answer is d + 1.
    const GridGraph g = GridGraph::open(4, 4);
    const AgentType a{0, g.vertex(0, 0), g.vertex(1, 1), 1.0, 0.1};
    const std::vector<SpaceTimeConstraint> vc{{0, a.goal, 2}};
    const auto p = constrained_shortest_path(g, a, vc);
    ASSERT_TRUE(p);
    EXPECT_EQ(p->length(), 3u);
    EXPECT_EQ(brute_length(g, a, vc, {}, 6, 0), 3);
}

TEST(ConstrainedShortestPath, FullBarrier)
{
    const GridGraph g = GridGraph::open(3, 3);
    const AgentType a{0, g.vertex(0, 0), g.vertex(2, 2), 1.0, 0.1};
    std::vector<SpaceTimeConstraint> vc;
    for (int t = 0; t <= 12; ++t)
        for (int y = 0; y < 3; ++y) vc.push_back({0, g.vertex(1, y), t});
    LowLevelQuery q;
    q.horizon = 12;
    EXPECT_FALSE(constrained_shortest_path(g, a, vc, q));
}

TEST(ConstrainedShortestPath, MinLength)
{
    const GridGraph g = GridGraph::open(3, 3);
    const AgentType a{0, g.vertex(0, 0), g.vertex(1, 0), 1.0, 0.1};
    LowLevelQuery q;
    q.min_length = 4;
    const auto p = constrained_shortest_path(g, a, {}, q);
    ASSERT_TRUE(p);
    EXPECT_EQ(p->length(), 4u);
    q.horizon = 3;
    EXPECT_FALSE(constrained_shortest_path(g, a, {}, q));
}

TEST(ConstrainedShortestPath, ForeignConstraintRejected)
{
    const GridGraph g = GridGraph::open(2, 2);
    const AgentType a{0, 0, 3, 1.0, 0.1};
    const std::vector<SpaceTimeConstraint> vc{{1, 1, 1}};
    EXPECT_THROW(constrained_shortest_path(g, a, vc), ContractViolation);
}

TEST(ConstrainedShortestPath, MatchesBruteForceOnRandomConstraints)
{
    int compared = 0;
    for (std::uint64_t k = 0; k < 300; ++k) {
        Rng rng(derive_seed(17, k));
        const int w = 2 + static_cast<int>(rng.below(3)), h = 2 + static_cast<int>(rng.below(3));
        std::vector<std::uint8_t> m(static_cast<std::size_t>(w * h), 1);
        for (auto& c : m)
            if (rng.next_unit() < 0.15) c = 0;
        const GridGraph g(w, h, m);
        std::vector<Vertex> open;
        for (Vertex v = 0; v < static_cast<Vertex>(g.size()); ++v)
            if (g.passable(v)) open.push_back(v);
        if (open.size() < 2) continue;
        const AgentType a{0, open[rng.below(open.size())], open[rng.below(open.size())], 1.0, 0.1};
        if (distance_map(g, a.goal)[static_cast<std::size_t>(a.start)] == kUnreachable) continue;
        const int horizon = 6;
        std::vector<SpaceTimeConstraint> vc;
        std::vector<EdgeConstraint> ec;
        const auto nv = rng.below(6), ne = rng.below(4);
        for (std::uint64_t i = 0; i < nv; ++i)
            vc.push_back({0, open[rng.below(open.size())], 1 + static_cast<int>(rng.below(horizon))});
        for (std::uint64_t i = 0; i < ne; ++i) {
            const Vertex from = open[rng.below(open.size())];
            std::array<Vertex, 4> nb{};
            const std::size_t n = g.neighbors(from, nb);
            const Vertex to = n == 0 || rng.below(3) == 0 ? from : nb[rng.below(n)];
            ec.push_back({0, from, to, 1 + static_cast<int>(rng.below(horizon))});
        }
        const int min_length = static_cast<int>(rng.below(3));
        LowLevelQuery q;
        q.horizon = horizon;
        q.min_length = min_length;
        q.edge_constraints = ec;
        const auto p = constrained_shortest_path(g, a, vc, q);
        const int expect = brute_length(g, a, vc, ec, horizon, min_length);
        if (expect < 0) {
            EXPECT_FALSE(p) << "case " << k;
        } else {
            ASSERT_TRUE(p) << "case " << k;
            EXPECT_EQ(static_cast<int>(p->length()), expect) << "case " << k;
            EXPECT_TRUE(is_valid_path(g, a, *p));
            EXPECT_TRUE(respects(*p, vc, ec));
        }
        ++compared;
    }
    EXPECT_GT(compared, 200);
}
