#pragma once

// 2-core reduction: repeatedly delete a variable of degree <= 1 together with
// the equation containing it (if any). A solution of the remaining core lifts
// back to the full system by replaying the deletions in reverse, solving each
// removed equation for its removed variable.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "xorlab/instance.hpp"

namespace xorlab::peel {

struct PeelStep {
    std::uint32_t var = 0;
    std::optional<std::uint32_t> eq;      // absent when the variable had degree 0
    std::vector<std::uint32_t> others;   // other variables of eq at removal time

    friend bool operator==(const PeelStep&, const PeelStep&) = default;
};

struct PeelTrace {
    std::vector<PeelStep> steps;
    // Original indices of the surviving variables (core variable i is
    // core_vars[i]) and of the surviving equations, both ascending.
    std::vector<std::uint32_t> core_vars;
    std::vector<std::uint32_t> core_eqs;
};

struct CoreStats {
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t core_vars = 0;  // N
    std::size_t core_eqs = 0;   // M
    // M / N; absent when the core is empty.
    std::optional<double> ratio() const
    {
        if (core_vars == 0) return std::nullopt;
        return static_cast<double>(core_eqs) / static_cast<double>(core_vars);
    }
};

struct PeelResult {
    Instance core;
    PeelTrace trace;
    CoreStats stats;
};

enum class PeelOrder { fifo, lifo };

inline PeelResult two_core(const Instance& inst, PeelOrder order = PeelOrder::fifo)
{
    if (inst.model_tag == ModelTag::relaxed_C) throw std::invalid_argument("two_core: relaxed_C instances have repeated indices");
    const std::size_t n = inst.n;
    const std::size_t m = inst.m;

    // CSR incidence variable -> equations.
    std::vector<std::size_t> start(n + 1, 0);
    for (const auto& row : inst.rows) {
        for (auto v : row) ++start[v + 1];
    }
    for (std::size_t v = 0; v < n; ++v) start[v + 1] += start[v];
    std::vector<std::uint32_t> incident(start[n]);
    {
        std::vector<std::size_t> fill(start.begin(), start.end() - 1);
        for (std::size_t e = 0; e < m; ++e) {
            for (auto v : inst.rows[e]) incident[fill[v]++] = static_cast<std::uint32_t>(e);
        }
    }

    std::vector<std::size_t> degree(n);
    for (std::size_t v = 0; v < n; ++v) degree[v] = start[v + 1] - start[v];
    std::vector<std::uint8_t> eq_alive(m, 1), var_alive(n, 1), queued(n, 0);
    std::deque<std::uint32_t> queue;
    for (std::size_t v = 0; v < n; ++v) {
        if (degree[v] <= 1) {
            queue.push_back(static_cast<std::uint32_t>(v));
            queued[v] = 1;
        }
    }

    PeelResult out;
    auto& steps = out.trace.steps;
    while (!queue.empty()) {
        std::uint32_t v;
        if (order == PeelOrder::fifo) {
            v = queue.front();
            queue.pop_front();
        } else {
            v = queue.back();
            queue.pop_back();
        }
        PeelStep step{v, std::nullopt, {}};
        if (degree[v] == 1) {
            // Lazy deletion: skip dead equations in the incidence list.
            std::size_t i = start[v];
            while (!eq_alive[incident[i]]) ++i;
            const std::uint32_t e = incident[i];
            step.eq = e;
            eq_alive[e] = 0;
            for (auto u : inst.rows[e]) {
                if (u == v) continue;
                step.others.push_back(u);
                if (--degree[u] <= 1 && !queued[u]) {
                    queued[u] = 1;
                    queue.push_back(u);
                }
            }
        }
        degree[v] = 0;
        var_alive[v] = 0;
        steps.push_back(std::move(step));
    }

    std::vector<std::uint32_t> relabel(n, 0);
    for (std::size_t v = 0; v < n; ++v) {
        if (var_alive[v]) {
            relabel[v] = static_cast<std::uint32_t>(out.trace.core_vars.size());
            out.trace.core_vars.push_back(static_cast<std::uint32_t>(v));
        }
    }
    Instance& core = out.core;
    core.k = inst.k;
    core.n = out.trace.core_vars.size();
    core.model_tag = inst.model_tag;
    core.seed = inst.seed;
    for (std::size_t e = 0; e < m; ++e) {
        if (!eq_alive[e]) continue;
        out.trace.core_eqs.push_back(static_cast<std::uint32_t>(e));
        Row row;
        row.reserve(inst.rows[e].size());
        for (auto v : inst.rows[e]) row.push_back(relabel[v]);
        core.rows.push_back(std::move(row));
        core.rhs.push_back(inst.rhs[e]);
    }
    core.m = core.rows.size();

    for (auto v : out.trace.core_vars) {
        if (degree[v] < 2) throw std::logic_error("two_core: surviving variable with degree < 2");
    }
    out.stats = {n, m, core.n, core.m};
    return out;
}

inline CoreStats core_density(const Instance& inst) { return two_core(inst).stats; }

// Lifts a solution of the core system to the whole instance. Variables
// peeled without an equation are set to 0.
inline Bits extend_solution(std::span<const std::uint8_t> core_solution, const PeelTrace& trace, const Instance& inst)
{
    if (core_solution.size() != trace.core_vars.size()) throw std::invalid_argument("extend_solution: core solution has wrong length");
    Bits x(inst.n, 0);
    for (std::size_t i = 0; i < trace.core_vars.size(); ++i) x[trace.core_vars[i]] = core_solution[i] & 1u;
    for (auto e : trace.core_eqs) {
        unsigned acc = 0;
        for (auto v : inst.rows[e]) acc ^= x[v];
        if (acc != inst.rhs[e]) throw std::invalid_argument("extend_solution: core solution violates equation " + std::to_string(e));
    }
    for (auto it = trace.steps.rbegin(); it != trace.steps.rend(); ++it) {
        if (!it->eq) continue;
        unsigned acc = inst.rhs[*it->eq];
        for (auto u : it->others) acc ^= x[u];
        x[it->var] = static_cast<std::uint8_t>(acc);
    }
    return x;
}

inline nlohmann::json to_json(const PeelTrace& trace)
{
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : trace.steps) {
        nlohmann::json j{{"var", s.var}, {"others", s.others}};
        j["eq"] = s.eq ? nlohmann::json(*s.eq) : nlohmann::json(nullptr);
        steps.push_back(std::move(j));
    }
    return {{"steps", steps}, {"core_vars", trace.core_vars}, {"core_eqs", trace.core_eqs}};
}

inline constexpr const char* stats_csv_header = "n,m,N,M,ratio,seed";

// One CSV line; the ratio column is empty for an empty core.
inline std::string stats_csv_line(const CoreStats& s, const Seed& seed)
{
    std::ostringstream os;
    os.precision(17);
    os << s.n << ',' << s.m << ',' << s.core_vars << ',' << s.core_eqs << ',';
    if (auto r = s.ratio()) os << *r;
    os << ',' << seed.master << ':' << seed.stream;
    return os.str();
}

} // namespace xorlab::peel
