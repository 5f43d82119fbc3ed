#ifndef FAIRMAPF_MAP_IO_HPP
#define FAIRMAPF_MAP_IO_HPP

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <vector>

#include "fairmapf/core.hpp"
#include "fairmapf/rng.hpp"
#include "fairmapf/sassp.hpp"

namespace fairmapf {

class ParseError : public Error
{
public:
    ParseError(int line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line)
    {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

class GenerationError : public Error
{
public:
    using Error::Error;
};

struct ScenarioEntry
{
    int bucket = 0;
    std::string map_name;
    int map_width = 0;
    int map_height = 0;
    int start_x = 0;
    int start_y = 0;
    int goal_x = 0;
    int goal_y = 0;
    double optimal_length = 0.0;

    friend bool operator==(const ScenarioEntry&, const ScenarioEntry&) = default;
};

struct InstanceSpec
{
    GridGraph map;
    std::vector<AgentType> agents;
    std::uint64_t seed = 0;
    double epsilon = 0.0;
};

namespace detail {

inline bool next_line(std::istream& in, std::string& line, int& lineno)
{
    if (!std::getline(in, line)) return false;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

inline std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

template <typename T>
bool parse_number(std::string_view s, T& out)
{
    s = trim(s);
    if (s.empty()) return false;
    if constexpr (std::is_floating_point_v<T>) {
        // strtod needs a NUL-terminated copy of the view.
        std::string copy(s);
        char* end = nullptr;
        out = static_cast<T>(std::strtod(copy.c_str(), &end));
        return end == copy.c_str() + copy.size() && std::isfinite(static_cast<double>(out));
    } else {
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        return ec == std::errc{} && ptr == s.data() + s.size();
    }
}

/// "key value" header line.
inline int header_int(const std::string& line, std::string_view key, int lineno)
{
    const auto parts = split(trim(line), ' ');
    int value = 0;
    if (parts.size() != 2 || parts[0] != key || !parse_number(parts[1], value) || value <= 0)
        throw ParseError(lineno, "expected '" + std::string(key) + " <positive integer>', got '" + line + "'");
    return value;
}

}  // namespace detail

/// Cell classes: '.' and 'G' passable; '@', 'O', 'T', 'S', 'W' blocked.
inline bool map_char_passable(char c, bool& known)
{
    known = true;
    switch (c) {
    case '.':
    case 'G': return true;
    case '@':
    case 'O':
    case 'T':
    case 'S':
    case 'W': return false;
    default: known = false; return false;
    }
}

inline GridGraph parse_map(std::istream& in)
{
    std::string line;
    int lineno = 0;
    if (!detail::next_line(in, line, lineno)) throw ParseError(1, "empty map file");
    {
        const auto parts = detail::split(detail::trim(line), ' ');
        if (parts.size() != 2 || parts[0] != "type") throw ParseError(lineno, "expected 'type <name>', got '" + line + "'");
    }
    if (!detail::next_line(in, line, lineno)) throw ParseError(lineno + 1, "missing height line");
    const int height = detail::header_int(line, "height", lineno);
    if (!detail::next_line(in, line, lineno)) throw ParseError(lineno + 1, "missing width line");
    const int width = detail::header_int(line, "width", lineno);
    if (!detail::next_line(in, line, lineno)) throw ParseError(lineno + 1, "missing 'map' line");
    if (detail::trim(line) != "map") throw ParseError(lineno, "expected 'map', got '" + line + "'");

    std::vector<std::uint8_t> mask;
    mask.reserve(static_cast<std::size_t>(width) * height);
    for (int row = 0; row < height; ++row) {
        if (!detail::next_line(in, line, lineno))
            throw ParseError(lineno + 1, "expected " + std::to_string(height) + " rows, found " + std::to_string(row));
        if (static_cast<int>(line.size()) != width)
            throw ParseError(lineno, "row has " + std::to_string(line.size()) + " cells, expected " + std::to_string(width));
        for (std::size_t col = 0; col < line.size(); ++col) {
            bool known = false;
            const bool open = map_char_passable(line[col], known);
            if (!known)
                throw ParseError(lineno, "unknown map character '" + std::string(1, line[col]) + "' at column " +
                                             std::to_string(col));
            mask.push_back(open ? 1 : 0);
        }
    }
    while (detail::next_line(in, line, lineno))
        if (!detail::trim(line).empty()) throw ParseError(lineno, "unexpected content after the last map row");
    return GridGraph(width, height, std::move(mask));
}

inline GridGraph parse_map(std::string_view text)
{
    std::istringstream in{std::string(text)};
    return parse_map(in);
}

inline GridGraph load_map(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open map file '" + path + "'");
    return parse_map(in);
}

inline std::string write_map(const GridGraph& g)
{
    std::string out = "type octile\nheight " + std::to_string(g.height()) + "\nwidth " + std::to_string(g.width()) + "\nmap\n";
    for (int y = 0; y < g.height(); ++y) {
        for (int x = 0; x < g.width(); ++x) out.push_back(g.passable(Cell{x, y}) ? '.' : '@');
        out.push_back('\n');
    }
    return out;
}

inline std::vector<ScenarioEntry> parse_scen(std::istream& in)
{
    std::string line;
    int lineno = 0;
    if (!detail::next_line(in, line, lineno)) throw ParseError(1, "empty scenario file");
    {
        const auto parts = detail::split(detail::trim(line), ' ');
        double version = 0;
        if (parts.size() != 2 || parts[0] != "version" || !detail::parse_number(parts[1], version))
            throw ParseError(lineno, "expected 'version <number>', got '" + line + "'");
    }
    std::vector<ScenarioEntry> out;
    while (detail::next_line(in, line, lineno)) {
        if (detail::trim(line).empty()) continue;
        const auto f = detail::split(line, '\t');
        if (f.size() != 9)
            throw ParseError(lineno, "expected 9 tab-separated fields, found " + std::to_string(f.size()));
        ScenarioEntry e;
        e.map_name = std::string(detail::trim(f[1]));
        auto num = [&](std::string_view s, int& dst, const char* what) {
            if (!detail::parse_number(s, dst)) throw ParseError(lineno, std::string("non-numeric ") + what);
        };
        num(f[0], e.bucket, "bucket");
        num(f[2], e.map_width, "map width");
        num(f[3], e.map_height, "map height");
        num(f[4], e.start_x, "start x");
        num(f[5], e.start_y, "start y");
        num(f[6], e.goal_x, "goal x");
        num(f[7], e.goal_y, "goal y");
        if (!detail::parse_number(f[8], e.optimal_length)) throw ParseError(lineno, "non-numeric optimal length");
        auto inside = [&](int x, int y) { return x >= 0 && y >= 0 && x < e.map_width && y < e.map_height; };
        if (!inside(e.start_x, e.start_y)) throw ParseError(lineno, "start lies outside the declared map");
        if (!inside(e.goal_x, e.goal_y)) throw ParseError(lineno, "goal lies outside the declared map");
        out.push_back(std::move(e));
    }
    return out;
}

inline std::vector<ScenarioEntry> parse_scen(std::string_view text)
{
    std::istringstream in{std::string(text)};
    return parse_scen(in);
}

inline std::vector<ScenarioEntry> load_scen(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open scenario file '" + path + "'");
    return parse_scen(in);
}

// ---------------------------------------------------------------------------
// Agent sampling
// ---------------------------------------------------------------------------

struct SamplingOptions
{
    bool allow_start_equals_goal = false;
    int max_attempts = 1000;
};

/// Draws u ~ U[0.001, 1) and c ~ U[1e-6, max(1e-6, u / dist)) for an agent whose
/// shortest path has `dist` steps (dist = 0 pins c to 1e-6).
inline void sample_utility_and_cost(Rng& rng, int dist, AgentType& agent)
{
    agent.utility = rng.uniform(0.001, 1.0);
    const double upper = dist > 0 ? std::max(1e-6, agent.utility / dist) : 1e-6;
    agent.step_cost = rng.uniform(1e-6, upper);
}

/// Starts and goals are distinct cells drawn uniformly without replacement; each
/// goal lies in its start's connected component. Deterministic in (map, count, seed).
inline std::vector<AgentType> sample_agents(const GridGraph& map, int count, std::uint64_t seed,
                                            const SamplingOptions& opts = {})
{
    if (count < 0) throw ContractViolation("agent count must be non-negative");
    const std::size_t needed = static_cast<std::size_t>(count) * (opts.allow_start_equals_goal ? 1 : 2);
    if (map.passable_count() < needed)
        throw GenerationError("map has " + std::to_string(map.passable_count()) + " passable cells, need " +
                              std::to_string(needed));

    // Connected component labels so goal candidates can be filtered without a search per draw.
    std::vector<int> component(map.size(), -1);
    {
        int label = 0;
        for (Vertex v = 0; v < static_cast<Vertex>(map.size()); ++v) {
            if (!map.passable(v) || component[static_cast<std::size_t>(v)] >= 0) continue;
            const auto d = distance_map(map, v);
            for (std::size_t u = 0; u < d.size(); ++u)
                if (d[u] != kUnreachable) component[u] = label;
            ++label;
        }
    }

    Rng rng(seed);
    std::vector<std::uint8_t> used(map.size(), 0);
    std::vector<AgentType> agents;
    for (int i = 0; i < count; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < opts.max_attempts && !placed; ++attempt) {
            std::vector<Vertex> free_cells;
            for (Vertex v = 0; v < static_cast<Vertex>(map.size()); ++v)
                if (map.passable(v) && !used[static_cast<std::size_t>(v)]) free_cells.push_back(v);
            if (free_cells.empty()) break;
            const Vertex start = free_cells[rng.below(free_cells.size())];
            std::vector<Vertex> goals;
            for (Vertex v : free_cells)
                if (component[static_cast<std::size_t>(v)] == component[static_cast<std::size_t>(start)] &&
                    (v != start || opts.allow_start_equals_goal))
                    goals.push_back(v);
            if (goals.empty()) continue;
            const Vertex goal = goals[rng.below(goals.size())];
            AgentType a;
            a.id = i;
            a.start = start;
            a.goal = goal;
            sample_utility_and_cost(rng, shortest_steps(map, start, goal), a);
            used[static_cast<std::size_t>(start)] = 1;
            used[static_cast<std::size_t>(goal)] = 1;
            agents.push_back(a);
            placed = true;
        }
        if (!placed) throw GenerationError("could not place agent " + std::to_string(i));
    }
    return agents;
}

/// Agents from the first `count` scenario rows; utilities and costs are sampled as in sample_agents.
inline std::vector<AgentType> agents_from_scenario(const GridGraph& map, const std::vector<ScenarioEntry>& entries,
                                                   int count, std::uint64_t seed)
{
    if (count < 0 || static_cast<std::size_t>(count) > entries.size())
        throw GenerationError("scenario has " + std::to_string(entries.size()) + " entries, requested " +
                              std::to_string(count));
    Rng rng(seed);
    std::vector<AgentType> agents;
    for (int i = 0; i < count; ++i) {
        const auto& e = entries[static_cast<std::size_t>(i)];
        if (e.map_width != map.width() || e.map_height != map.height())
            throw GenerationError("scenario row " + std::to_string(i) + " declares a different map size");
        AgentType a;
        a.id = i;
        a.start = map.vertex(e.start_x, e.start_y);
        a.goal = map.vertex(e.goal_x, e.goal_y);
        validate_agent(map, AgentType{i, a.start, a.goal, 0.0, 1.0});
        sample_utility_and_cost(rng, shortest_steps(map, a.start, a.goal), a);
        agents.push_back(a);
    }
    return agents;
}

}  // namespace fairmapf

#endif  // FAIRMAPF_MAP_IO_HPP
