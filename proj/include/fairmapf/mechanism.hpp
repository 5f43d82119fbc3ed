#ifndef FAIRMAPF_MECHANISM_HPP
#define FAIRMAPF_MECHANISM_HPP

// Single-parameter mechanism over a fixed plan set: each agent bids a per-step
// cost, the allocation maximizes reported welfare, and a winning agent pays its
// critical value per step.
//
// An agent "wins" when the allocated plan gives it the same path as the
// reference allocation, and winning is expected for bids above the critical
// value.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairmapf/core.hpp"
#include "fairmapf/map_io.hpp"
#include "fairmapf/rng.hpp"

namespace fairmapf {

class NoAllocationError : public Error
{
public:
    using Error::Error;
};

/// Winning at `low` but losing at the higher bid `high`.
class MonotonicityViolation : public Error
{
public:
    MonotonicityViolation(int agent, double low, double high)
        : Error("allocation is not monotone for agent " + std::to_string(agent) + ": wins at " + std::to_string(low) +
                ", loses at " + std::to_string(high)),
          agent_(agent), low_(low), high_(high)
    {}
    int agent() const noexcept { return agent_; }
    double low() const noexcept { return low_; }
    double high() const noexcept { return high_; }

private:
    int agent_;
    double low_;
    double high_;
};

struct BidProfile
{
    std::vector<double> bids;

    static BidProfile truthful(std::span<const AgentType> agents)
    {
        BidProfile b;
        for (const auto& a : agents) b.bids.push_back(a.step_cost);
        return b;
    }
};

inline void validate(const BidProfile& b, std::size_t agents)
{
    if (b.bids.size() != agents) throw ContractViolation("bid profile arity mismatch");
    for (double x : b.bids)
        if (!(x > 0.0)) throw ContractViolation("bids must be positive");
}

/// Reported welfare ties closer than this fall through to the tie-breakers.
inline constexpr double kBidTieTolerance = 1e-12;

inline double reported_welfare(const JointPlan& plan, std::span<const AgentType> agents, std::span<const double> bids)
{
    double s = 0.0;
    for (std::size_t i = 0; i < agents.size(); ++i)
        s += agents[i].utility - bids[i] * static_cast<double>(plan.paths[i].length());
    return s;
}

/// Index of the reported-welfare maximizer; ties by lowest total step count,
/// then lowest index.
inline std::size_t allocate_index(std::span<const JointPlan> plans, std::span<const AgentType> agents,
                                  std::span<const double> bids)
{
    if (plans.empty()) throw NoAllocationError("allocate: empty plan set");
    std::size_t best = 0;
    double best_w = reported_welfare(plans[0], agents, bids);
    auto total = [](const JointPlan& p) {
        std::size_t t = 0;
        for (const auto& path : p.paths) t += path.length();
        return t;
    };
    std::size_t best_steps = total(plans[0]);
    for (std::size_t k = 1; k < plans.size(); ++k) {
        const double w = reported_welfare(plans[k], agents, bids);
        const std::size_t steps = total(plans[k]);
        if (w > best_w + kBidTieTolerance || (w >= best_w - kBidTieTolerance && steps < best_steps)) {
            best = k;
            best_w = w;
            best_steps = steps;
        }
    }
    return best;
}

inline const JointPlan& allocate(std::span<const JointPlan> plans, std::span<const AgentType> agents,
                                 const BidProfile& bids)
{
    return plans[allocate_index(plans, agents, bids.bids)];
}

inline PlanSet winning_set(std::span<const JointPlan> plans, std::size_t agent, const Path& truthful_path)
{
    PlanSet out;
    for (const auto& p : plans)
        if (p.paths.at(agent) == truthful_path) out.push_back(p);
    return out;
}

struct CriticalValueOptions
{
    /// Upper end of the bisection bracket; <= 0 selects max(1, 2 * max bid).
    double b_max = 0.0;
    double tolerance = 1e-9;
    int max_iterations = 64;
};

/// Threshold bid above which agent `agent` keeps the path it receives under
/// `bids` (the reference profile defining its winning set), others fixed.
/// Returns 0 when the agent wins across the whole bracket.
inline double critical_value(std::span<const JointPlan> plans, std::span<const AgentType> agents, std::size_t agent,
                             const BidProfile& bids, const CriticalValueOptions& opt = {})
{
    const Path& reference = allocate(plans, agents, bids).paths.at(agent);
    const double b_ref = bids.bids.at(agent);
    double b_max = opt.b_max;
    if (b_max <= 0.0) b_max = std::max(1.0, 2.0 * *std::max_element(bids.bids.begin(), bids.bids.end()));

    std::vector<double> probe = bids.bids;
    auto wins = [&](double b) {
        probe[agent] = b;
        return plans[allocate_index(plans, agents, probe)].paths[agent] == reference;
    };

    const int id = static_cast<int>(agent);
    if (!wins(b_max)) throw MonotonicityViolation(id, b_ref, b_max);
    if (wins(0.0)) return 0.0;

    double lo = 0.0, hi = b_max;
    for (int it = 0; it < opt.max_iterations && hi - lo > opt.tolerance; ++it) {
        const double mid = 0.5 * (lo + hi);
        (wins(mid) ? hi : lo) = mid;
    }
    if (b_ref < lo) throw MonotonicityViolation(id, b_ref, lo);
    return hi;
}

/// What run_mechanism does when an agent's critical value cannot be computed.
enum class ViolationPolicy { Throw, Record };

struct MechanismOutcome
{
    std::size_t chosen_index = 0;
    JointPlan chosen;
    std::vector<int> step_counts;
    /// NaN for agents recorded as non-monotone.
    std::vector<double> critical_values;
    std::vector<double> payments;
    /// max(u - c k - p, 0) at true costs.
    std::vector<double> utilities;
    /// u - c k - p before the max with zero.
    std::vector<double> raw_utilities;
    std::vector<bool> monotone;
};

inline MechanismOutcome run_mechanism(std::span<const JointPlan> plans, std::span<const AgentType> agents,
                                      const BidProfile& bids, ViolationPolicy policy = ViolationPolicy::Throw,
                                      const CriticalValueOptions& opt = {})
{
    validate(bids, agents.size());
    MechanismOutcome out;
    out.chosen_index = allocate_index(plans, agents, bids.bids);
    out.chosen = plans[out.chosen_index];
    require_arity(out.chosen, agents);
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const int k = static_cast<int>(out.chosen.paths[i].length());
        out.step_counts.push_back(k);
        double r = std::numeric_limits<double>::quiet_NaN();
        bool monotone = true;
        try {
            r = critical_value(plans, agents, i, bids, opt);
        } catch (const MonotonicityViolation&) {
            if (policy == ViolationPolicy::Throw) throw;
            monotone = false;
        }
        const double p = r * k;
        const double raw = agents[i].utility - agents[i].step_cost * k - p;
        out.critical_values.push_back(r);
        out.payments.push_back(p);
        out.raw_utilities.push_back(raw);
        out.utilities.push_back(std::isnan(raw) ? raw : std::max(raw, 0.0));
        out.monotone.push_back(monotone);
    }
    return out;
}

struct AgentCertificate
{
    double critical_value = 0.0;
    double payment = 0.0;
    double truthful_utility = 0.0;
    double max_regret = 0.0;
    bool ir_ok = true;
    bool monotone_ok = true;
};

struct CertReport
{
    std::vector<AgentCertificate> agents;
    double max_regret = 0.0;
    std::size_t ir_violations = 0;
    std::size_t monotonicity_violations = 0;
    std::size_t misreports_per_agent = 0;

    bool clean(double regret_tol = 1e-9) const
    {
        return max_regret <= regret_tol && ir_violations == 0 && monotonicity_violations == 0;
    }
};

struct CertifyOptions
{
    std::size_t misreport_samples = 20;
    std::size_t monotonicity_grid = 100;
    double ir_tolerance = 1e-9;
    CriticalValueOptions critical;
};

/// Empirical truthfulness check using the known true costs. For each agent,
/// the winning set is fixed by the truthful allocation; misreports are drawn
/// uniformly from (0, b_max) with the others truthful, and the agent's utility
/// under each is compared to truthful reporting.
inline CertReport certify_truthfulness(const InstanceSpec& inst, std::span<const JointPlan> plans,
                                       std::uint64_t seed, const CertifyOptions& opt = {})
{
    const auto& agents = inst.agents;
    if (plans.empty()) throw NoAllocationError("certify_truthfulness: empty plan set");
    const BidProfile truth = BidProfile::truthful(agents);
    const auto outcome = run_mechanism(plans, agents, truth, ViolationPolicy::Record, opt.critical);
    double b_max = opt.critical.b_max;
    if (b_max <= 0.0) b_max = std::max(1.0, 2.0 * *std::max_element(truth.bids.begin(), truth.bids.end()));

    CertReport rep;
    rep.misreports_per_agent = opt.misreport_samples;
    Rng rng(seed);
    for (std::size_t i = 0; i < agents.size(); ++i) {
        AgentCertificate c;
        c.critical_value = outcome.critical_values[i];
        c.payment = outcome.payments[i];
        c.truthful_utility = outcome.utilities[i];
        c.monotone_ok = outcome.monotone[i];
        c.ir_ok = std::isnan(outcome.raw_utilities[i]) || outcome.raw_utilities[i] >= -opt.ir_tolerance;

        const Path& reference = outcome.chosen.paths[i];
        std::vector<double> probe = truth.bids;
        auto allocation_at = [&](double b) -> const JointPlan& {
            probe[i] = b;
            return plans[allocate_index(plans, agents, probe)];
        };

        // Monotonicity sweep: once the agent wins, it must keep winning.
        std::optional<double> first_win;
        for (std::size_t g = 1; g <= opt.monotonicity_grid && c.monotone_ok; ++g) {
            const double b = b_max * static_cast<double>(g) / static_cast<double>(opt.monotonicity_grid);
            const bool win = allocation_at(b).paths[i] == reference;
            if (win && !first_win) first_win = b;
            if (!win && first_win) c.monotone_ok = false;
        }

        if (c.monotone_ok) {
            for (std::size_t m = 0; m < opt.misreport_samples; ++m) {
                const double b = rng.uniform(1e-6, b_max);
                const JointPlan& alt = allocation_at(b);
                const double k = static_cast<double>(alt.paths[i].length());
                const double raw = agents[i].utility - agents[i].step_cost * k - c.critical_value * k;
                const double u = std::max(raw, 0.0);
                c.max_regret = std::max(c.max_regret, u - c.truthful_utility);
            }
        }
        rep.max_regret = std::max(rep.max_regret, c.max_regret);
        rep.ir_violations += c.ir_ok ? 0 : 1;
        rep.monotonicity_violations += c.monotone_ok ? 0 : 1;
        rep.agents.push_back(c);
    }
    return rep;
}

/// Hand-built two-plan instance: plan a gives step counts (2, 3), plan b gives
/// (3, 2), u = (1, 1), c = (0.2, 0.1). Truthful bids allocate plan a, and
/// agent 2 loses plan a's path when bidding above 0.2, so the allocation is
/// not monotone for agent 2.
struct TwoPlanFixture
{
    InstanceSpec instance;
    PlanSet plans;
};

inline TwoPlanFixture two_plan_fixture()
{
    TwoPlanFixture f;
    f.instance.map = GridGraph::open(3, 2);
    const auto& g = f.instance.map;
    f.instance.agents = {
        AgentType{0, g.vertex(0, 0), g.vertex(2, 0), 1.0, 0.2},
        AgentType{1, g.vertex(0, 1), g.vertex(2, 1), 1.0, 0.1},
    };
    const Path fast0{{g.vertex(0, 0), g.vertex(1, 0), g.vertex(2, 0)}};
    const Path slow0{{g.vertex(0, 0), g.vertex(0, 0), g.vertex(1, 0), g.vertex(2, 0)}};
    const Path fast1{{g.vertex(0, 1), g.vertex(1, 1), g.vertex(2, 1)}};
    const Path slow1{{g.vertex(0, 1), g.vertex(0, 1), g.vertex(1, 1), g.vertex(2, 1)}};
    f.plans = {JointPlan{{fast0, slow1}}, JointPlan{{slow0, fast1}}};
    return f;
}

}  // namespace fairmapf

#endif  // FAIRMAPF_MECHANISM_HPP
