#pragma once

// Monte Carlo campaigns. Every trial draws from its own stream
// trial_stream(point, trial) under the master seed, and results are merged by
// trial index, so CSV output does not depend on the worker count.
//
// Trial CSV columns:   point,trial,seed_master,seed_stream,n,m,<metrics...>
// Summary CSV columns depend on the kind (see summary_header()).

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "xorlab/gf2.hpp"
#include "xorlab/instance.hpp"
#include "xorlab/instancegen.hpp"
#include "xorlab/parallel.hpp"
#include "xorlab/peeler.hpp"
#include "xorlab/thresholds.hpp"

namespace xorlab::lab {

enum class Kind { sat_sweep, critical_census, core_check, collision_check, window_check };

inline std::string to_string(Kind k)
{
    switch (k) {
    case Kind::sat_sweep: return "sat_sweep";
    case Kind::critical_census: return "critical_census";
    case Kind::core_check: return "core_check";
    case Kind::collision_check: return "collision_check";
    case Kind::window_check: return "window_check";
    }
    throw std::invalid_argument("unknown experiment kind");
}

inline Kind kind_from_string(const std::string& s)
{
    for (Kind k : {Kind::sat_sweep, Kind::critical_census, Kind::core_check, Kind::collision_check, Kind::window_check}) {
        if (to_string(k) == s) return k;
    }
    throw std::invalid_argument("unknown experiment kind '" + s + "'");
}

// A statistical acceptance gate on one summary cell: passes when
// |observed - point| <= tolerance (times |point| when relative), and the row
// ran at least `trials` trials.
struct Gate {
    std::string metric;
    std::size_t row = 0;
    double point = 0.0;
    double tolerance = 0.0;
    bool relative = false;
    std::size_t trials = 1;
};

struct GateResult {
    Gate gate;
    double observed = 0.0;
    bool pass = false;
};

struct ExperimentConfig {
    Kind kind = Kind::sat_sweep;
    int k = 3;
    std::size_t n = 1000;
    std::vector<double> c_grid;        // m = round(c n) per point
    std::vector<std::size_t> m_list;   // used instead of c_grid when non-empty
    std::vector<std::size_t> windows{2, 5, 10, 15};  // window_check: m = n -+ w
    std::size_t trials = 100;
    std::uint64_t seed = 1;
    ModelTag model = ModelTag::unconstrained;
    std::string out;                   // output path prefix; empty for none
    unsigned workers = 1;
    std::vector<Gate> gates;
};

struct Point {
    double c = 0.0;
    std::size_t m = 0;
    long window = 0;  // signed m - n for window checks
};

struct TrialRow {
    std::size_t point = 0;
    std::size_t trial = 0;
    Seed seed;
    std::vector<double> values;
};

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::size_t column(const std::string& name) const
    {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return i;
        }
        throw std::invalid_argument("no column '" + name + "'");
    }
    double at(std::size_t row, const std::string& name) const { return rows.at(row).at(column(name)); }
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<Point> points;
    std::vector<TrialRow> trials;
    Table summary;
    std::vector<GateResult> gates;
    double wall_time_seconds = 0.0;
};

// ---- config JSON ----

inline nlohmann::json to_json(const ExperimentConfig& c)
{
    nlohmann::json gates = nlohmann::json::array();
    for (const auto& g : c.gates) {
        gates.push_back({{"metric", g.metric}, {"row", g.row}, {"point", g.point}, {"tolerance", g.tolerance},
                         {"relative", g.relative}, {"trials", g.trials}});
    }
    return {{"kind", to_string(c.kind)}, {"k", c.k},          {"n", c.n},
            {"c_grid", c.c_grid},        {"m_list", c.m_list}, {"windows", c.windows},
            {"trials", c.trials},        {"seed", c.seed},     {"model", xorlab::to_string(c.model)},
            {"out", c.out},              {"workers", c.workers}, {"gates", gates}};
}

// Fields absent from `j` keep the values already in `base`.
inline ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {})
{
    if (j.contains("kind")) base.kind = kind_from_string(j.at("kind").get<std::string>());
    if (j.contains("k")) base.k = j.at("k").get<int>();
    if (j.contains("n")) base.n = j.at("n").get<std::size_t>();
    if (j.contains("c_grid")) base.c_grid = j.at("c_grid").get<std::vector<double>>();
    if (j.contains("m_list")) base.m_list = j.at("m_list").get<std::vector<std::size_t>>();
    if (j.contains("windows")) base.windows = j.at("windows").get<std::vector<std::size_t>>();
    if (j.contains("trials")) base.trials = j.at("trials").get<std::size_t>();
    if (j.contains("seed")) base.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("model")) base.model = model_tag_from_string(j.at("model").get<std::string>());
    if (j.contains("out")) base.out = j.at("out").get<std::string>();
    if (j.contains("workers")) base.workers = j.at("workers").get<unsigned>();
    if (j.contains("gates")) {
        base.gates.clear();
        for (const auto& g : j.at("gates")) {
            Gate gate;
            gate.metric = g.at("metric").get<std::string>();
            gate.row = g.value("row", std::size_t{0});
            gate.point = g.at("point").get<double>();
            gate.tolerance = g.at("tolerance").get<double>();
            gate.relative = g.value("relative", false);
            gate.trials = g.value("trials", std::size_t{1});
            base.gates.push_back(gate);
        }
    }
    return base;
}

inline void validate(const ExperimentConfig& c)
{
    if (c.trials < 1) throw std::invalid_argument("experiment: trials must be >= 1");
    if (c.k < 3) throw std::invalid_argument("experiment: k must be >= 3");
    if (c.n < static_cast<std::size_t>(c.k)) throw std::invalid_argument("experiment: n must be >= k");
    for (std::size_t i = 1; i < c.c_grid.size(); ++i) {
        if (!(c.c_grid[i] > c.c_grid[i - 1])) throw std::invalid_argument("experiment: c_grid must be strictly increasing");
    }
    if (c.kind != Kind::window_check && c.c_grid.empty() && c.m_list.empty()) {
        throw std::invalid_argument("experiment: c_grid or m_list required");
    }
    switch (c.kind) {
    case Kind::sat_sweep:
        if (c.model == ModelTag::relaxed_C) throw std::invalid_argument("sat_sweep: model must be unconstrained or constrained");
        break;
    case Kind::critical_census:
        if (c.model != ModelTag::constrained) throw std::invalid_argument("critical_census: model must be constrained");
        if (c.n > 4000) throw std::invalid_argument("critical_census: n must be <= 4000");
        break;
    case Kind::core_check:
        if (c.model != ModelTag::unconstrained) throw std::invalid_argument("core_check: model must be unconstrained");
        break;
    case Kind::collision_check:
        if (c.model != ModelTag::relaxed_C) throw std::invalid_argument("collision_check: model must be relaxed_C");
        break;
    case Kind::window_check:
        if (c.model != ModelTag::constrained) throw std::invalid_argument("window_check: model must be constrained");
        if (c.windows.empty()) throw std::invalid_argument("window_check: windows required");
        for (auto w : c.windows) {
            if (w >= c.n) throw std::invalid_argument("window_check: window must be < n");
        }
        break;
    }
}

inline std::vector<Point> make_points(const ExperimentConfig& c)
{
    std::vector<Point> pts;
    const double nd = static_cast<double>(c.n);
    if (c.kind == Kind::window_check) {
        for (auto w : c.windows) {
            pts.push_back({static_cast<double>(c.n - w) / nd, c.n - w, -static_cast<long>(w)});
            pts.push_back({static_cast<double>(c.n + w) / nd, c.n + w, static_cast<long>(w)});
        }
        return pts;
    }
    if (!c.m_list.empty()) {
        for (auto m : c.m_list) pts.push_back({static_cast<double>(m) / nd, m, 0});
    } else {
        for (double cv : c.c_grid) pts.push_back({cv, static_cast<std::size_t>(std::llround(cv * nd)), 0});
    }
    return pts;
}

inline std::vector<std::string> metric_names(Kind kind)
{
    switch (kind) {
    case Kind::sat_sweep:
    case Kind::window_check: return {"sat", "rank", "nullity", "core_vars", "core_eqs"};
    case Kind::critical_census: return {"nullity", "critical_sets", "identity_checked", "identity_holds"};
    case Kind::core_check: return {"core_vars", "core_eqs", "frac_vars", "frac_eqs", "ratio"};
    case Kind::collision_check: return {"collisions", "falling2", "zero"};
    }
    return {};
}

// ---- one trial ----

namespace detail {

inline constexpr double nan = std::numeric_limits<double>::quiet_NaN();

// Satisfiability via the 2-core; peeled equations never affect solvability
// or the left nullity.
inline std::vector<double> sat_trial(const Instance& inst)
{
    const auto peeled = peel::two_core(inst);
    const auto a = to_matrix(peeled.core);
    const auto sol = gf2::solve(a, peeled.core.rhs);
    return {sol.consistent ? 1.0 : 0.0, static_cast<double>(sol.rank), static_cast<double>(peeled.core.m - sol.rank),
            static_cast<double>(peeled.stats.core_vars), static_cast<double>(peeled.stats.core_eqs)};
}

inline constexpr std::size_t identity_limit = 10;

inline std::vector<double> census_trial(const Instance& inst)
{
    const auto a = to_matrix(inst);
    const std::size_t nullity = gf2::nullity_transpose(a);
    const BigInt x = gf2::count_critical_sets(a);
    double checked = 0.0, holds = nan;
    if (inst.m <= identity_limit && inst.n <= identity_limit) {
        checked = 1.0;
        const auto mom = gf2::exact_solution_moments(a);
        holds = (mom.ratio == BigRational(x + 1)) ? 1.0 : 0.0;
    }
    return {static_cast<double>(nullity), x.convert_to<double>(), checked, holds};
}

inline std::vector<double> core_trial(const Instance& inst)
{
    const auto s = peel::core_density(inst);
    const double nd = static_cast<double>(inst.n);
    const auto r = s.ratio();
    return {static_cast<double>(s.core_vars), static_cast<double>(s.core_eqs), s.core_vars / nd, s.core_eqs / nd,
            r ? *r : nan};
}

inline std::vector<double> collision_trial(int k, std::size_t m, std::size_t n, Seed seed)
{
    const auto a = gen::gen_C_model(k, m, n, seed);
    const double mbar = static_cast<double>(gen::collision_count(a));
    return {mbar, mbar * (mbar - 1.0), mbar == 0.0 ? 1.0 : 0.0};
}

inline std::vector<double> run_trial(const ExperimentConfig& c, const Point& p, Seed seed)
{
    switch (c.kind) {
    case Kind::sat_sweep:
    case Kind::window_check: return sat_trial(gen::generate(c.model, c.k, p.m, c.n, seed));
    case Kind::critical_census: return census_trial(gen::generate(c.model, c.k, p.m, c.n, seed));
    case Kind::core_check: return core_trial(gen::generate(c.model, c.k, p.m, c.n, seed));
    case Kind::collision_check: return collision_trial(c.k, p.m, c.n, seed);
    }
    throw std::invalid_argument("unknown experiment kind");
}

struct Moments {
    double sum = 0.0;
    std::size_t count = 0;
    void add(double v)
    {
        if (std::isnan(v)) return;
        sum += v;
        ++count;
    }
    double mean() const { return count ? sum / static_cast<double>(count) : nan; }
};

} // namespace detail

inline std::vector<std::string> summary_header(Kind kind)
{
    switch (kind) {
    case Kind::sat_sweep:
        return {"c", "n", "m", "trials", "sat_count", "sat_fraction", "mean_nullity", "mean_core_vars", "mean_core_eqs"};
    case Kind::window_check:
        return {"w", "n", "m", "trials", "sat_count", "sat_fraction", "unsat_fraction", "envelope"};
    case Kind::critical_census:
        return {"c", "n", "m", "trials", "mean_critical_sets", "mean_nullity", "identity_checked", "identity_failures"};
    case Kind::core_check:
        return {"c",          "n",          "m",         "trials",         "mean_frac_vars", "mean_frac_eqs",
                "mean_ratio", "empty_cores", "pred_frac_vars", "pred_frac_eqs", "pred_ratio"};
    case Kind::collision_check:
        return {"c", "n", "m", "trials", "mean_collisions", "mean_falling2", "zero_fraction", "gamma", "gamma_sq",
                "exp_neg_gamma"};
    }
    return {};
}

inline std::vector<double> summarize_point(const ExperimentConfig& c, const Point& p, const std::vector<TrialRow>& rows)
{
    const auto names = metric_names(c.kind);
    std::vector<detail::Moments> mom(names.size());
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < names.size(); ++i) mom[i].add(r.values[i]);
    }
    const double trials = static_cast<double>(rows.size());
    const double nd = static_cast<double>(c.n), md = static_cast<double>(p.m);
    switch (c.kind) {
    case Kind::sat_sweep:
        return {p.c, nd, md, trials, mom[0].sum, mom[0].mean(), mom[2].mean(), mom[3].mean(), mom[4].mean()};
    case Kind::window_check:
        return {static_cast<double>(p.window), nd, md, trials, mom[0].sum, mom[0].mean(), 1.0 - mom[0].mean(),
                std::ldexp(1.0, -static_cast<int>(std::labs(p.window)))};
    case Kind::critical_census: {
        double failures = 0.0;
        for (const auto& r : rows) failures += (r.values[2] == 1.0 && r.values[3] != 1.0) ? 1.0 : 0.0;
        return {p.c, nd, md, trials, mom[1].mean(), mom[0].mean(), mom[2].sum, failures};
    }
    case Kind::core_check: {
        double empty = 0.0;
        for (const auto& r : rows) empty += r.values[0] == 0.0 ? 1.0 : 0.0;
        const auto mu = thresholds::mu_of(c.k, p.c);
        const auto pred = thresholds::core_sizes(c.k, p.c);
        const double pred_ratio = mu ? thresholds::psi(*mu) / c.k : detail::nan;
        return {p.c, nd, md, trials, mom[2].mean(), mom[3].mean(), mom[4].mean(), empty, pred.vars, pred.eqs, pred_ratio};
    }
    case Kind::collision_check: {
        const double lam = thresholds::lambda_of(static_cast<double>(c.k) * md / nd);
        const double g = thresholds::gamma(c.k, lam);
        return {p.c, nd, md, trials, mom[0].mean(), mom[1].mean(), mom[2].mean(), g, g * g, std::exp(-g)};
    }
    }
    return {};
}

inline std::vector<GateResult> evaluate_gates(const std::vector<Gate>& gates, const Table& summary)
{
    std::vector<GateResult> out;
    for (const auto& g : gates) {
        GateResult r{g, detail::nan, false};
        if (g.row < summary.rows.size()) {
            r.observed = summary.at(g.row, g.metric);
            const double tol = g.relative ? g.tolerance * std::fabs(g.point) : g.tolerance;
            const double trials = summary.at(g.row, "trials");
            r.pass = std::fabs(r.observed - g.point) <= tol && trials >= static_cast<double>(g.trials);
        }
        out.push_back(r);
    }
    return out;
}

// ---- CSV / JSON ----

inline std::string format_number(double v)
{
    if (std::isnan(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string trials_csv(const ExperimentResult& r)
{
    std::ostringstream os;
    os << "point,trial,seed_master,seed_stream,n,m";
    for (const auto& name : metric_names(r.config.kind)) os << ',' << name;
    os << '\n';
    for (const auto& t : r.trials) {
        os << t.point << ',' << t.trial << ',' << t.seed.master << ',' << t.seed.stream << ',' << r.config.n << ','
           << r.points[t.point].m;
        for (double v : t.values) os << ',' << format_number(v);
        os << '\n';
    }
    return os.str();
}

inline std::string table_csv(const Table& t)
{
    std::ostringstream os;
    for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << t.header[i];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
        os << '\n';
    }
    return os.str();
}

inline nlohmann::json summary_json(const ExperimentResult& r)
{
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.summary.rows) {
        nlohmann::json obj;
        for (std::size_t i = 0; i < row.size(); ++i) {
            obj[r.summary.header[i]] = std::isnan(row[i]) ? nlohmann::json(nullptr) : nlohmann::json(row[i]);
        }
        rows.push_back(obj);
    }
    nlohmann::json gates = nlohmann::json::array();
    for (const auto& g : r.gates) {
        gates.push_back({{"metric", g.gate.metric}, {"row", g.gate.row}, {"point", g.gate.point},
                         {"tolerance", g.gate.tolerance}, {"relative", g.gate.relative}, {"trials", g.gate.trials},
                         {"observed", std::isnan(g.observed) ? nlohmann::json(nullptr) : nlohmann::json(g.observed)},
                         {"pass", g.pass}});
    }
    return {{"config", to_json(r.config)},
            {"summary", rows},
            {"gates", gates},
            {"wall_time_seconds", r.wall_time_seconds},
            {"content_hash", git_blob_hash(trials_csv(r) + table_csv(r.summary))}};
}

// Writes <out>.trials.csv, <out>.summary.csv and <out>.json.
inline void write_outputs(const ExperimentResult& r)
{
    if (r.config.out.empty()) return;
    write_file(r.config.out + ".trials.csv", trials_csv(r));
    write_file(r.config.out + ".summary.csv", table_csv(r.summary));
    write_file(r.config.out + ".json", summary_json(r).dump(2) + "\n");
}

// ---- campaigns ----

inline ExperimentResult run_experiment(const ExperimentConfig& cfg)
{
    validate(cfg);
    const auto start = std::chrono::steady_clock::now();
    ExperimentResult r;
    r.config = cfg;
    r.points = make_points(cfg);
    const std::size_t total = r.points.size() * cfg.trials;
    r.trials = parallel_map(total, std::max(1u, cfg.workers), [&](std::size_t idx) {
        TrialRow row;
        row.point = idx / cfg.trials;
        row.trial = idx % cfg.trials;
        row.seed = {cfg.seed, trial_stream(row.point, row.trial)};
        try {
            row.values = detail::run_trial(cfg, r.points[row.point], row.seed);
        } catch (const std::exception& e) {
            throw std::runtime_error(to_string(cfg.kind) + " point " + std::to_string(row.point) + " (m=" +
                                     std::to_string(r.points[row.point].m) + ") trial " + std::to_string(row.trial) +
                                     " stream " + std::to_string(row.seed.stream) + ": " + e.what());
        }
        return row;
    });
    r.summary.header = summary_header(cfg.kind);
    for (std::size_t p = 0; p < r.points.size(); ++p) {
        const std::vector<TrialRow> rows(r.trials.begin() + static_cast<std::ptrdiff_t>(p * cfg.trials),
                                         r.trials.begin() + static_cast<std::ptrdiff_t>((p + 1) * cfg.trials));
        r.summary.rows.push_back(summarize_point(cfg, r.points[p], rows));
    }
    r.gates = evaluate_gates(cfg.gates, r.summary);
    r.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_outputs(r);
    return r;
}

namespace detail {
inline ExperimentResult run_kind(ExperimentConfig cfg, Kind kind)
{
    cfg.kind = kind;
    return run_experiment(cfg);
}
} // namespace detail

inline ExperimentResult run_sat_sweep(const ExperimentConfig& cfg) { return detail::run_kind(cfg, Kind::sat_sweep); }
inline ExperimentResult run_critical_census(const ExperimentConfig& cfg) { return detail::run_kind(cfg, Kind::critical_census); }
inline ExperimentResult run_core_check(const ExperimentConfig& cfg) { return detail::run_kind(cfg, Kind::core_check); }
inline ExperimentResult run_collision_check(const ExperimentConfig& cfg) { return detail::run_kind(cfg, Kind::collision_check); }
inline ExperimentResult run_window_check(const ExperimentConfig& cfg) { return detail::run_kind(cfg, Kind::window_check); }

inline bool all_gates_pass(const ExperimentResult& r)
{
    for (const auto& g : r.gates) {
        if (!g.pass) return false;
    }
    return true;
}

} // namespace xorlab::lab
