#include <gtest/gtest.h>

#include "fairmapf/core.hpp"

using namespace fairmapf;

namespace {

AgentType agent(double u, double c, Vertex s = 0, Vertex g = 0) { return AgentType{0, s, g, u, c}; }

Path path(std::initializer_list<Vertex> vs) { return Path{std::vector<Vertex>(vs)}; }

}  // namespace

TEST(Welfare, DirectEvaluation)
{
    EXPECT_NEAR(welfare(agent(1.0, 0.1), 3), 0.7, 1e-12);
    EXPECT_NEAR(welfare(agent(0.5, 0.25), 2), 0.0, 1e-12);
    EXPECT_NEAR(welfare(agent(0.2, 0.3), 1), -0.1, 1e-12);
}

TEST(Welfare, PathEndpointsMustMatch)
{
    const AgentType a{0, 0, 2, 1.0, 0.1};
    EXPECT_NEAR(welfare(a, path({0, 1, 2})), 0.8, 1e-12);
    EXPECT_THROW(welfare(a, path({0, 1})), ContractViolation);
    EXPECT_THROW(welfare(a, Path{}), ContractViolation);
}

TEST(SocialWelfare, SignedSums)
{
    const std::vector<AgentType> two{AgentType{0, 0, 2, 1.0, 0.1}, AgentType{1, 3, 5, 1.0, 0.1}};
    const JointPlan p{{path({0, 1, 2}), path({3, 4, 5})}};
    EXPECT_NEAR(social_welfare(p, two), 1.6, 1e-12);

    const std::vector<AgentType> one{AgentType{0, 0, 0, 0.7, 0.1}};
    EXPECT_NEAR(social_welfare(JointPlan{{path({0})}}, one), 0.7, 1e-12);

    const std::vector<AgentType> mixed{AgentType{0, 0, 1, 0.5, 0.2}, AgentType{1, 2, 3, 0.2, 0.3}};
    EXPECT_NEAR(social_welfare(JointPlan{{path({0, 1}), path({2, 3})}}, mixed), 0.2, 1e-12);
}

TEST(SocialWelfare, ArityMismatchThrows)
{
    const std::vector<AgentType> two{AgentType{0, 0, 1, 1.0, 0.1}, AgentType{1, 2, 3, 1.0, 0.1}};
    EXPECT_THROW(social_welfare(JointPlan{{path({0, 1})}}, two), ContractViolation);
}

TEST(GridGraph, VertexNumberingAndNeighbors)
{
    const GridGraph g(3, 2, {1, 1, 1, 1, 0, 1});
    EXPECT_EQ(g.vertex(Cell{2, 1}), 5);
    EXPECT_EQ(g.cell(4), (Cell{1, 1}));
    EXPECT_FALSE(g.passable(4));
    EXPECT_EQ(g.passable_count(), 5u);
    std::array<Vertex, 4> nb{};
    ASSERT_EQ(g.neighbors(1, nb), 2u);
    EXPECT_EQ(nb[0], 0);
    EXPECT_EQ(nb[1], 2);
    EXPECT_THROW(GridGraph(2, 2, {1, 1, 1}), ContractViolation);
}

TEST(CheckFeasible, CornerRoutesDoNotConflict)
{
    // 2x2: a1 (0,0)->(0,1)->(1,1), a2 (1,1)->(1,0)->(0,0).
    const GridGraph g = GridGraph::open(2, 2);
    const JointPlan p{{path({g.vertex(0, 0), g.vertex(0, 1), g.vertex(1, 1)}),
                       path({g.vertex(1, 1), g.vertex(1, 0), g.vertex(0, 0)})}};
    EXPECT_TRUE(check_feasible(p).empty());
}

TEST(CheckFeasible, SharedVertex)
{
    const JointPlan p{{path({0, 1, 2}), path({3, 1, 4})}};
    const auto cs = check_feasible(p);
    ASSERT_EQ(cs.size(), 1u);
    EXPECT_EQ(cs[0].kind, Conflict::Kind::Vertex);
    EXPECT_EQ(cs[0].v, 1);
    EXPECT_EQ(cs[0].time, 1);
}

TEST(CheckFeasible, Swap)
{
    const JointPlan p{{path({0, 1}), path({1, 0})}};
    const auto cs = check_feasible(p);
    ASSERT_EQ(cs.size(), 1u);
    EXPECT_EQ(cs[0].kind, Conflict::Kind::Swap);
    EXPECT_EQ(cs[0].v, 0);
    EXPECT_EQ(cs[0].w, 1);
    EXPECT_EQ(cs[0].time, 1);
}

TEST(CheckFeasible, ArrivedAgentsVanish)
{
    // Agent 0 arrives at 1 at t=1; agent 1 passes through 1 at t=2.
    const JointPlan p{{path({0, 1}), path({3, 2, 1, 5})}};
    EXPECT_TRUE(check_feasible(p).empty());
}

TEST(CheckFeasible, OrderedByTimeThenPair)
{
    const JointPlan p{{path({0, 5, 6}), path({1, 5, 7}), path({2, 6, 6})}};
    const auto cs = check_feasible(p);
    ASSERT_EQ(cs.size(), 2u);
    EXPECT_EQ(cs[0].time, 1);
    EXPECT_EQ(cs[1].time, 2);
    EXPECT_EQ(cs[1].second, 2);
}

TEST(PlanCost, SumOfIndividualCosts)
{
    const std::vector<AgentType> as{AgentType{0, 0, 2, 1.0, 0.1}, AgentType{1, 0, 1, 1.0, 0.25}};
    EXPECT_NEAR(plan_cost(StepVector{2, 3}, as), 0.95, 1e-12);
}
