#ifndef FAIRMAPF_FAIRNESS_HPP
#define FAIRMAPF_FAIRNESS_HPP

// Envy-freeness, max-min (leximin) and proportional fairness predicates, and
// the set filter that keeps candidates passing both set-relative tests.
//
// Both set-relative predicates compare against the discovered candidate set,
// not every feasible plan: "fairness relative to the candidate set".

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <vector>

#include "fairmapf/core.hpp"

namespace fairmapf {

/// Absorbs rounding in sums such as 0.9 - 0.7 vs 0.2.
inline constexpr double kFairnessTolerance = 1e-12;

struct FairnessConfig
{
    double epsilon = 0.0;
    /// Denominator floor for proportional fairness when a welfare is <= 0.
    double welfare_floor = 1e-9;
    bool envy = true;
    bool max_min = true;
    bool proportional = true;

    /// Epsilon actually applied; disabling the envy test means no bound.
    double effective_epsilon() const noexcept { return envy ? epsilon : std::numeric_limits<double>::infinity(); }
};

inline void validate(const FairnessConfig& cfg)
{
    if (!(cfg.epsilon >= 0.0)) throw ContractViolation("epsilon must be >= 0");
    if (!(cfg.welfare_floor > 0.0)) throw ContractViolation("welfare_floor must be > 0");
}

/// |W_i - W_j| <= epsilon for every pair (non-strict).
inline bool is_envy_free(std::span<const double> welfares, double epsilon)
{
    if (welfares.empty()) throw ContractViolation("is_envy_free: empty welfare vector");
    const auto [lo, hi] = std::minmax_element(welfares.begin(), welfares.end());
    return *hi - *lo <= epsilon + kFairnessTolerance;
}

/// Agents ranked by nondecreasing welfare; ties keep index order.
inline std::vector<std::size_t> welfare_ranking(std::span<const double> w)
{
    std::vector<std::size_t> order(w.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return w[a] < w[b]; });
    return order;
}

/// Fails when some candidate strictly improves the k-th ranked agent while every
/// agent ranked before it is no worse off.
inline bool is_max_min_fair(std::span<const double> w, std::span<const WelfareVector> candidates)
{
    const auto order = welfare_ranking(w);
    for (std::size_t k = 0; k < order.size(); ++k) {
        const std::size_t i = order[k];
        for (const auto& c : candidates) {
            if (!(c[i] > w[i])) continue;
            bool prior_preserved = true;
            for (std::size_t j = 0; j < k && prior_preserved; ++j)
                prior_preserved = c[order[j]] >= w[order[j]];
            if (prior_preserved) return false;
        }
    }
    return true;
}

/// sum_i (W'_i - W_i) / max(W_i, floor) <= 0 for every candidate W'.
/// `clamped`, when given, receives the number of agents whose denominator was floored.
inline bool is_proportionally_fair(std::span<const double> w, std::span<const WelfareVector> candidates,
                                   double welfare_floor = 1e-9, std::size_t* clamped = nullptr)
{
    std::vector<double> denom(w.size());
    std::size_t floors = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        denom[i] = w[i];
        if (w[i] < welfare_floor) {
            denom[i] = welfare_floor;
            ++floors;
        }
    }
    if (clamped != nullptr) *clamped = floors;
    for (const auto& c : candidates) {
        double gain = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) gain += (c[i] - w[i]) / denom[i];
        if (gain > kFairnessTolerance) return false;
    }
    return true;
}

inline std::vector<WelfareVector> welfare_vectors(std::span<const JointPlan> plans, std::span<const AgentType> agents)
{
    std::vector<WelfareVector> out;
    out.reserve(plans.size());
    for (const auto& p : plans) out.push_back(welfare_vector(p, agents));
    return out;
}

inline bool is_max_min_fair(const JointPlan& plan, std::span<const JointPlan> candidates,
                            std::span<const AgentType> agents)
{
    const auto w = welfare_vector(plan, agents);
    const auto cw = welfare_vectors(candidates, agents);
    return is_max_min_fair(w, cw);
}

inline bool is_proportionally_fair(const JointPlan& plan, std::span<const JointPlan> candidates,
                                   std::span<const AgentType> agents, double welfare_floor = 1e-9)
{
    const auto w = welfare_vector(plan, agents);
    const auto cw = welfare_vectors(candidates, agents);
    return is_proportionally_fair(w, cw, welfare_floor);
}

struct WelfareVerdicts
{
    std::vector<bool> keep;
    std::size_t clamp_events = 0;
};

/// Set filter on welfare vectors. Identical vectors always share a verdict and
/// comparing against a duplicate is a no-op, so only distinct vectors are compared.
inline WelfareVerdicts filter_fair_welfare(std::span<const WelfareVector> ws, const FairnessConfig& cfg)
{
    std::map<WelfareVector, bool> verdict;
    for (const auto& w : ws) verdict.emplace(w, true);
    std::vector<WelfareVector> distinct;
    distinct.reserve(verdict.size());
    for (const auto& [w, _] : verdict) distinct.push_back(w);

    WelfareVerdicts out;
    for (auto& [w, ok] : verdict) {
        std::size_t clamped = 0;
        ok = (!cfg.max_min || is_max_min_fair(w, distinct)) &&
             (!cfg.proportional || is_proportionally_fair(w, distinct, cfg.welfare_floor, &clamped));
        out.clamp_events += clamped;
    }
    out.keep.reserve(ws.size());
    for (const auto& w : ws) out.keep.push_back(verdict.at(w));
    return out;
}

struct FilterOutcome
{
    PlanSet kept;
    std::size_t clamp_events = 0;
};

/// Keeps exactly the candidates that pass the enabled set-relative predicates
/// against the original, unfiltered candidate set. Envy-freeness is assumed
/// to have been applied when the candidates were collected.
inline FilterOutcome filter_fair(std::span<const JointPlan> candidates, std::span<const AgentType> agents,
                                 const FairnessConfig& cfg)
{
    const auto ws = welfare_vectors(candidates, agents);
    const auto verdicts = filter_fair_welfare(ws, cfg);
    FilterOutcome out;
    out.clamp_events = verdicts.clamp_events;
    for (std::size_t i = 0; i < candidates.size(); ++i)
        if (verdicts.keep[i]) out.kept.push_back(candidates[i]);
    return out;
}

}  // namespace fairmapf

#endif  // FAIRMAPF_FAIRNESS_HPP
