#ifndef FAIRMAPF_JSON_IO_HPP
#define FAIRMAPF_JSON_IO_HPP

// JSON documents for solve results, certification reports and benchmarks.
// Requires nlohmann/json ("json.hpp") on the include path.

#include <cmath>
#include <string>
#include <vector>

#include "json.hpp"

#include "fairmapf/bench.hpp"
#include "fairmapf/core.hpp"
#include "fairmapf/mechanism.hpp"
#include "fairmapf/solve.hpp"

namespace fairmapf {

using Json = nlohmann::ordered_json;

/// NaN and infinities become null.
inline Json real_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

inline Json to_json(const GridGraph& g, const Path& p)
{
    Json cells = Json::array();
    for (Vertex v : p.vertices) {
        const Cell c = g.cell(v);
        cells.push_back({c.x, c.y});
    }
    return cells;
}

inline Json to_json(const GridGraph& g, const JointPlan& plan)
{
    Json paths = Json::array();
    for (const auto& p : plan.paths) paths.push_back(to_json(g, p));
    return paths;
}

inline Json to_json(const GridGraph& g, const AgentType& a)
{
    const Cell s = g.cell(a.start), t = g.cell(a.goal);
    return Json{{"id", a.id}, {"start", {s.x, s.y}}, {"goal", {t.x, t.y}}, {"utility", a.utility},
                {"step_cost", a.step_cost}};
}

/// `with_runtime` = false drops wall-clock fields so documents compare byte for byte.
inline Json to_json(const SolveStats& s, bool with_runtime = true)
{
    Json j{{"nodes_generated", s.nodes_generated},
           {"nodes_expanded", s.nodes_expanded},
           {"iterations", s.iterations},
           {"plans_enumerated", s.plans_enumerated},
           {"candidates", s.candidates},
           {"fair_candidates", s.fair_candidates},
           {"clamp_events", s.clamp_events},
           {"final_bound", real_or_null(s.final_bound)},
           {"exhausted", s.exhausted},
           {"limit", s.limit}};
    if (with_runtime) j["runtime_s"] = s.runtime_s;
    return j;
}

inline Json to_json(const InstanceSpec& inst, const SolveResult& r, bool with_runtime = true)
{
    Json j;
    j["algorithm"] = r.algorithm;
    j["status"] = std::string(to_string(r.status));
    j["epsilon"] = inst.epsilon;
    Json agents = Json::array();
    for (const auto& a : inst.agents) agents.push_back(to_json(inst.map, a));
    j["agents"] = agents;
    if (r.plan) {
        j["plan"] = to_json(inst.map, *r.plan);
        j["welfare"] = r.welfare;
        j["social_welfare"] = r.social_welfare;
        j["total_cost"] = r.total_cost;
    } else {
        j["plan"] = nullptr;
        j["welfare"] = nullptr;
        j["social_welfare"] = nullptr;
        j["total_cost"] = nullptr;
    }
    j["statistics"] = to_json(r.stats, with_runtime);
    return j;
}

inline Json to_json(const CertReport& rep)
{
    Json agents = Json::array();
    for (const auto& a : rep.agents)
        agents.push_back({{"critical_value", real_or_null(a.critical_value)},
                          {"payment", real_or_null(a.payment)},
                          {"truthful_utility", real_or_null(a.truthful_utility)},
                          {"max_regret", a.max_regret},
                          {"ir_ok", a.ir_ok},
                          {"monotone_ok", a.monotone_ok}});
    return Json{{"agents", agents},
                {"max_regret", rep.max_regret},
                {"ir_violations", rep.ir_violations},
                {"monotonicity_violations", rep.monotonicity_violations},
                {"misreports_per_agent", rep.misreports_per_agent}};
}

inline Json to_json(const MechanismOutcome& m)
{
    Json cv = Json::array(), pay = Json::array(), ut = Json::array();
    for (std::size_t i = 0; i < m.step_counts.size(); ++i) {
        cv.push_back(real_or_null(m.critical_values[i]));
        pay.push_back(real_or_null(m.payments[i]));
        ut.push_back(real_or_null(m.utilities[i]));
    }
    return Json{{"chosen_index", m.chosen_index},
                {"step_counts", m.step_counts},
                {"critical_values", cv},
                {"payments", pay},
                {"utilities", ut}};
}

inline Json to_json(const BenchRecord& r, bool with_runtime = true)
{
    Json j{{"map", r.map},
           {"algorithm", r.algorithm},
           {"agents", r.agents},
           {"epsilon", r.epsilon},
           {"run", r.run},
           {"status", std::string(to_string(r.status))}};
    if (with_runtime) {
        j["runtime_s"] = r.runtime_s;
        j["overrun"] = r.overrun;
    }
    j["social_welfare"] = real_or_null(r.social_welfare);
    j["welfare_spread"] = real_or_null(r.welfare_spread);
    return j;
}

inline Json to_json(const SummaryRow& s)
{
    return Json{{"algorithm", s.algorithm},
                {"agents", s.agents},
                {"epsilon", s.epsilon},
                {"runs", s.runs},
                {"solved", s.solved},
                {"success_fraction", s.success_fraction},
                {"mean_runtime_s", real_or_null(s.mean_runtime_s)},
                {"median_runtime_s", real_or_null(s.median_runtime_s)},
                {"mean_runtime_solved_s", real_or_null(s.mean_runtime_solved_s)},
                {"mean_social_welfare_solved", real_or_null(s.mean_social_welfare_solved)}};
}

/// x/y series for success fraction and mean runtime, against agent count (one
/// series per algorithm and epsilon) and against epsilon (one per algorithm
/// and agent count).
inline Json plot_data(const std::vector<SummaryRow>& rows)
{
    Json panels = Json::array();
    auto series = [&](const std::string& panel, const std::string& x_name, auto group_of, auto x_of, auto y_of) {
        std::vector<std::string> keys;
        std::map<std::string, std::pair<std::vector<double>, std::vector<Json>>> data;
        for (const auto& r : rows) {
            const std::string k = group_of(r);
            if (!data.contains(k)) keys.push_back(k);
            data[k].first.push_back(x_of(r));
            data[k].second.push_back(y_of(r));
        }
        for (const auto& k : keys)
            panels.push_back({{"panel", panel}, {"series", k}, {"x_label", x_name}, {"x", data[k].first},
                              {"y", data[k].second}});
    };
    auto by_eps = [](const SummaryRow& r) { return r.algorithm + " eps=" + format_real(r.epsilon); };
    auto by_agents = [](const SummaryRow& r) { return r.algorithm + " agents=" + std::to_string(r.agents); };
    auto agents_x = [](const SummaryRow& r) { return static_cast<double>(r.agents); };
    auto eps_x = [](const SummaryRow& r) { return r.epsilon; };
    auto success = [](const SummaryRow& r) { return Json(r.success_fraction); };
    auto runtime = [](const SummaryRow& r) { return real_or_null(r.mean_runtime_s); };
    series("success_vs_agents", "agents", by_eps, agents_x, success);
    series("runtime_vs_agents", "agents", by_eps, agents_x, runtime);
    series("success_vs_epsilon", "epsilon", by_agents, eps_x, success);
    series("runtime_vs_epsilon", "epsilon", by_agents, eps_x, runtime);
    return panels;
}

inline Json bench_document(const std::vector<BenchRecord>& records, bool with_runtime = true)
{
    Json recs = Json::array();
    for (const auto& r : records) recs.push_back(to_json(r, with_runtime));
    const auto rows = summarize(records);
    Json summary = Json::array();
    for (const auto& s : rows) summary.push_back(to_json(s));
    return Json{{"records", recs}, {"summary", summary}, {"plots", plot_data(rows)}};
}

}  // namespace fairmapf

#endif  // FAIRMAPF_JSON_IO_HPP
