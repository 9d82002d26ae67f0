// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "xorlab/xorlab.hpp"

using namespace xorlab;
using lab::ExperimentConfig;
using lab::Gate;
using lab::Kind;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
        }
    }
    void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Gate results are printed and folded into the outcome.
void check_gates(Outcome& o, const lab::ExperimentResult& r)
{
    for (const auto& g : r.gates) {
        o.note(g.gate.metric + "[" + std::to_string(g.gate.row) + "]=" + fmt("%.5g", g.observed));
        o.require(g.pass, g.gate.metric + " row " + std::to_string(g.gate.row) + " gate");
    }
}

// ---- independent oracles ----

// Every nonempty row subset, summed directly.
std::size_t subset_enumeration(const gf2::BitMatrix& a)
{
    const std::size_t m = a.rows(), n = a.cols();
    std::size_t count = 0;
    for (std::uint64_t y = 1; y < (std::uint64_t{1} << m); ++y) {
        bool zero = true;
        for (std::size_t c = 0; c < n && zero; ++c) {
            unsigned acc = 0;
            for (std::size_t r = 0; r < m; ++r) acc ^= ((y >> r) & 1u) && a.get(r, c);
            zero = acc == 0;
        }
        count += zero;
    }
    return count;
}

// Recompute degrees and drop degree <= 1 variables and their equations until stable.
std::pair<std::set<std::uint32_t>, std::set<std::uint32_t>> naive_core(const Instance& inst)
{
    std::set<std::uint32_t> vars, eqs;
    for (std::uint32_t v = 0; v < inst.n; ++v) vars.insert(v);
    for (std::uint32_t e = 0; e < inst.m; ++e) eqs.insert(e);
    for (bool changed = true; changed;) {
        changed = false;
        std::vector<int> deg(inst.n, 0);
        for (auto e : eqs)
            for (auto v : inst.rows[e]) ++deg[v];
        for (auto it = eqs.begin(); it != eqs.end();) {
            bool drop = false;
            for (auto v : inst.rows[*it]) drop = drop || deg[v] == 1;
            if (drop) {
                it = eqs.erase(it);
                changed = true;
            } else {
                ++it;
            }
        }
        for (auto it = vars.begin(); it != vars.end();) {
            if (deg[*it] <= 1) {
                it = vars.erase(it);
                changed = true;
            } else {
                ++it;
            }
        }
    }
    return {vars, eqs};
}

BigInt enumerate_C(int k, std::size_t m, std::size_t n)
{
    const std::size_t chips = static_cast<std::size_t>(k) * m;
    std::vector<std::size_t> col(chips, 0);
    BigInt count = 0;
    for (;;) {
        std::vector<std::size_t> tot(n, 0);
        for (auto c : col) ++tot[c];
        bool ok = true;
        for (auto t : tot) ok = ok && t >= 2;
        if (ok) ++count;
        std::size_t i = 0;
        while (i < chips && ++col[i] == n) col[i++] = 0;
        if (i == chips) break;
    }
    return count;
}

// ---- criteria ----

Outcome threshold_constants()
{
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const double c3 = thresholds::c_star(3);
    const double l3 = thresholds::lambda_of(3.0);
    const double p = thresholds::psi(2.7694);
    const double a4 = 0.99 * thresholds::alpha_k(4), a5 = 0.99 * thresholds::alpha_k(5);
    const double dt = seconds_since(t0);
    o.require(c3 > 0.9179 && c3 < 0.9180, "c_star(3) in (0.9179, 0.9180)");
    o.require(l3 > 2.149 && l3 < 2.151, "lambda(3) in (2.149, 2.151)");
    o.require(p <= 3.3992, "psi(2.7694) <= 3.3992");
    o.require(a4 > 0.1681, "0.99 alpha_4 > 0.1681");
    o.require(a5 > 0.1840, "0.99 alpha_5 > 0.1840");
    o.require(dt < 1.0, "runtime < 1 s");
    o.note("c_star(3)=" + fmt("%.10f", c3) + " lambda(3)=" + fmt("%.10f", l3) + " psi(2.7694)=" + fmt("%.8f", p));
    return o;
}

Outcome exact_identities()
{
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 g(20240601);
    std::size_t done = 0, with_critical = 0;
    for (std::uint64_t s = 0; done < 100; ++s) {
        const int k = 3 + static_cast<int>(g() % 2);
        const std::size_t n = 3 + g() % 8;           // 3..10
        const std::size_t m = 1 + g() % 8;           // 1..8
        // Constrained shapes with 2n <= km and m <= n.
        if (static_cast<std::size_t>(k) * m < 2 * n || m > n || n < static_cast<std::size_t>(k)) continue;
        const Instance inst = gen::gen_constrained(k, m, n, {77, s});
        const auto a = to_matrix(inst);
        // N(b) for every b from the solver: 2^{n - rank} when consistent.
        BigInt sum = 0, sum_sq = 0;
        for (std::uint64_t b = 0; b < (std::uint64_t{1} << m); ++b) {
            Bits rhs(m);
            for (std::size_t i = 0; i < m; ++i) rhs[i] = (b >> i) & 1u;
            const auto sol = gf2::solve(a, rhs);
            if (!sol.consistent) continue;
            const BigInt nb = BigInt(1) << static_cast<unsigned>(sol.solution_count_log2);
            sum += nb;
            sum_sq += nb * nb;
        }
        const BigInt two_n = BigInt(1) << static_cast<unsigned>(n);
        const BigInt two_m = BigInt(1) << static_cast<unsigned>(m);
        // E[N^2] / E[N]^2 = (sum_sq / 2^m) / (sum / 2^m)^2
        const BigRational ratio(sum_sq * two_m, sum * sum);
        const BigInt x = gf2::count_critical_sets(a);
        o.require(sum == two_n, "sum_b N(b) = 2^n");
        o.require(ratio == BigRational(x + 1), "E[N^2]/E[N]^2 = X + 1");
        const auto mom = gf2::exact_solution_moments(a);
        o.require(mom.sum_n == sum && mom.ratio == ratio, "exact_solution_moments agrees");
        with_critical += x > 0;
        ++done;
        if (!o.pass) break;
    }
    const double dt = seconds_since(t0);
    o.require(dt < 30.0, "runtime < 30 s");
    o.note(std::to_string(done) + " instances, " + std::to_string(with_critical) + " with X > 0");
    return o;
}

Outcome oracle_equivalence()
{
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 g(3);
    for (int t = 0; t < 100; ++t) {
        const std::size_t rows = 1 + g() % 20, cols = 1 + g() % 16;
        gf2::BitMatrix a(rows, cols);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) a.set(r, c, (g() % 3) == 0);
        const BigInt fast = gf2::count_critical_sets(a);
        o.require(fast == gf2::brute_force_critical_sets(a), "count_critical_sets = brute_force_critical_sets");
        o.require(fast == subset_enumeration(a), "count_critical_sets = direct subset enumeration");
    }
    for (std::uint64_t s = 0; s < 200; ++s) {
        const std::size_t n = 150 + s % 100;
        const double c = 0.6 + 0.1 * static_cast<double>(s % 5);
        const auto inst = gen::gen_unconstrained(3 + static_cast<int>(s % 2), static_cast<std::size_t>(c * n), n, {9, s});
        const auto r = peel::two_core(inst);
        const auto [vars, eqs] = naive_core(inst);
        o.require(std::set<std::uint32_t>(r.trace.core_vars.begin(), r.trace.core_vars.end()) == vars &&
                      std::set<std::uint32_t>(r.trace.core_eqs.begin(), r.trace.core_eqs.end()) == eqs,
                  "two_core = naive peeling");
    }
    o.require(*gen::count_C_exact(3, 2, 2).exact == 50, "count_C_exact(3,2,2) = 50");
    std::size_t cases = 0;
    for (int k = 1; k <= 4; ++k) {
        for (std::size_t m = 1; static_cast<std::size_t>(k) * m <= 12; ++m) {
            for (std::size_t n = 1; n <= 4; ++n) {
                if (std::pow(static_cast<double>(n), static_cast<double>(k * m)) > 2e7) continue;
                o.require(*gen::count_C_exact(k, m, n).exact == enumerate_C(k, m, n), "count_C_exact = enumeration");
                ++cases;
            }
        }
    }
    const double dt = seconds_since(t0);
    o.require(dt < 60.0, "runtime < 1 min");
    o.note(std::to_string(cases) + " (k,m,n) enumeration cases, " + fmt("%.1f s", dt));
    return o;
}

Outcome certificates()
{
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const auto amed = cert::certify_amed(4);
    o.require(amed.verified && amed.global_bound < -1e-5, "certify_amed(4) with bound < -1e-5");
    const auto k5 = cert::certify_s_k_splits(5, {0.1840, 0.2291, 0.2743}, -0.005);
    o.require(k5.verified && k5.global_bound < -0.005, "k=5 bound < -0.005");
    const auto k6 = cert::certify_s_k_splits(6, {0.1666, 0.2204, 0.2743}, -0.03);
    o.require(k6.verified && k6.global_bound < -0.03, "k=6 bound < -0.03");
    const auto k3 = cert::certify_k3_grid(iv::Interval(0.999, 1.001));
    o.require(k3.verified && k3.cells.size() == 301 && k3.global_bound < -0.002, "k3 grid, 301 cells < -0.002");
    bool cell300 = false;
    for (const auto& c : k3.cells) {
        if (c.domain.contains(0.3005)) {
            cell300 = c.ok && c.zeta && *c.zeta == thresholds::ZetaChoice{0.360, 0.667};
        }
    }
    o.require(cell300, "cell [0.300, 0.301] certified with zeta (0.360, 0.667)");
    const auto alarge = cert::certify_alarge_constants();
    o.require(alarge.verified, "alarge constants");
    const auto mono = cert::certify_monotonicity();
    o.require(mono.verified, "monotonicity");
    o.require(cert::replay(amed) && cert::replay(k3) && cert::replay(alarge) && cert::replay(mono), "replay");
    const double dt = seconds_since(t0);
    o.require(dt < 300.0, "runtime < 5 min");
    o.note("amed(4) " + std::to_string(amed.cells.size()) + " cells bound " + fmt("%.4g", amed.global_bound) +
           ", k3 bound " + fmt("%.4g", k3.global_bound) + ", " + fmt("%.2f s", dt));
    return o;
}

Outcome s4_point()
{
    Outcome o;
    const double v = thresholds::s_k(4, 0.2743);
    const auto enc = cert::interval_s_k(4, iv::Interval::point(0.2743));
    o.require(v > -1.6e-5 && v < -1.4e-5, "s_4(0.2743) in (-1.6e-5, -1.4e-5)");
    o.require(enc.contains(v) && enc.hi < -1.4e-5 && enc.lo > -1.6e-5, "interval enclosure inside the range");
    o.note("s_4(0.2743)=" + fmt("%.6g", v));
    return o;
}

Outcome unconstrained_transition()
{
    Outcome o;
    ExperimentConfig c;
    c.kind = Kind::sat_sweep;
    c.k = 3;
    c.n = 3000;
    c.c_grid = {0.87, 0.97};
    c.trials = 200;
    c.seed = 20240601;
    c.workers = default_workers();
    c.gates = {Gate{"sat_fraction", 0, 1.0, 0.1, false, 200}, Gate{"sat_fraction", 1, 0.0, 0.1, false, 200}};
    const auto r = lab::run_sat_sweep(c);
    check_gates(o, r);
    const double cs = thresholds::c_star(3);
    o.require(0.87 < cs && cs < 0.97, "grid brackets c_star(3)");
    o.require(r.wall_time_seconds < 600.0, "runtime < 10 min");
    o.note(fmt("%.1f s", r.wall_time_seconds));
    return o;
}

Outcome constrained_transition()
{
    Outcome o;
    ExperimentConfig c;
    c.kind = Kind::sat_sweep;
    c.model = ModelTag::constrained;
    c.k = 4;
    c.n = 1000;
    c.m_list = {900, 1100};
    c.trials = 200;
    c.seed = 20240601;
    c.workers = default_workers();
    c.gates = {Gate{"sat_fraction", 0, 1.0, 0.02, false, 200}, Gate{"sat_fraction", 1, 0.0, 0.02, false, 200}};
    const auto sweep = lab::run_sat_sweep(c);
    check_gates(o, sweep);

    ExperimentConfig w = c;
    w.kind = Kind::window_check;
    w.m_list.clear();
    w.windows = {15};
    w.trials = 500;
    // Row 1 is m = n + 15. Unsat fraction >= 1 - 2 * 2^-15 - 3 sigma.
    const double p0 = 2.0 * std::ldexp(1.0, -15);
    const double sigma = std::sqrt(p0 * (1.0 - p0) / 500.0);
    const double floor = 1.0 - p0 - 3.0 * sigma;
    w.gates = {Gate{"unsat_fraction", 1, 1.0, 1.0 - floor, false, 500}};
    const auto window = lab::run_window_check(w);
    check_gates(o, window);
    const double total = sweep.wall_time_seconds + window.wall_time_seconds;
    o.require(total < 600.0, "runtime < 10 min");
    o.note("unsat floor " + fmt("%.6f", floor) + ", " + fmt("%.1f s", total));
    return o;
}

Outcome core_statistics()
{
    Outcome o;
    const double cs = thresholds::c_star(3);
    const double mu = *thresholds::mu_of(3, 0.95);
    const double pred_vars = (std::exp(mu) - 1.0 - mu) / std::exp(mu);
    const double pred_ratio = thresholds::psi(mu) / 3.0;
    ExperimentConfig c;
    c.kind = Kind::core_check;
    c.k = 3;
    c.n = 100000;
    c.c_grid = {cs, 0.95};
    c.trials = 20;
    c.seed = 20240601;
    c.workers = default_workers();
    c.gates = {Gate{"mean_frac_vars", 1, pred_vars, 0.01, false, 20}, Gate{"mean_ratio", 1, pred_ratio, 0.01, false, 20},
               Gate{"mean_ratio", 0, 1.0, 0.02, false, 20}};
    const auto r = lab::run_core_check(c);
    check_gates(o, r);
    o.require(r.wall_time_seconds < 120.0, "runtime < 2 min");
    o.note("predicted N/n " + fmt("%.4f", pred_vars) + ", M/N " + fmt("%.4f", pred_ratio) + ", " +
           fmt("%.1f s", r.wall_time_seconds));
    return o;
}

Outcome collision_statistics()
{
    Outcome o;
    const double g = thresholds::gamma(3, thresholds::lambda_of(3.0 * 600.0 / 500.0));
    ExperimentConfig c;
    c.kind = Kind::collision_check;
    c.model = ModelTag::relaxed_C;
    c.k = 3;
    c.n = 500;
    c.m_list = {600};
    c.trials = 10000;
    c.seed = 20240601;
    c.workers = default_workers();
    c.gates = {Gate{"mean_collisions", 0, g, 0.05, true, 10000}, Gate{"mean_falling2", 0, g * g, 0.10, true, 10000},
               Gate{"zero_fraction", 0, std::exp(-g), 0.15, true, 10000}};
    const auto r = lab::run_collision_check(c);
    check_gates(o, r);
    o.require(r.wall_time_seconds < 120.0, "runtime < 2 min");
    o.note("gamma " + fmt("%.4f", g) + ", " + fmt("%.2f s", r.wall_time_seconds));
    return o;
}

Outcome enumeration_asymptotics()
{
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const double ratio = std::exp(gen::count_C_exact(3, 100, 100).log_value - gen::log_C_asymptotic(3, 100, 100));
    o.require(ratio >= 0.95 && ratio <= 1.05, "ratio in [0.95, 1.05]");
    o.require(seconds_since(t0) < 10.0, "runtime < 10 s");
    o.note("ratio " + fmt("%.5f", ratio));
    return o;
}

Outcome reproducibility()
{
    Outcome o;
    const auto dir = std::filesystem::temp_directory_path() / "xorlab_acceptance";
    std::filesystem::create_directories(dir);
    std::vector<ExperimentConfig> configs;
    {
        ExperimentConfig c;
        c.kind = Kind::sat_sweep;
        c.k = 3;
        c.n = 500;
        c.c_grid = {0.85, 0.92, 1.0};
        c.trials = 40;
        configs.push_back(c);
        c.kind = Kind::window_check;
        c.model = ModelTag::constrained;
        c.k = 4;
        c.n = 200;
        c.windows = {2, 5};
        configs.push_back(c);
        c.kind = Kind::critical_census;
        c.c_grid = {0.9};
        configs.push_back(c);
        c.kind = Kind::collision_check;
        c.model = ModelTag::relaxed_C;
        c.k = 3;
        c.n = 300;
        c.c_grid = {1.2};
        configs.push_back(c);
        c.kind = Kind::core_check;
        c.model = ModelTag::unconstrained;
        c.n = 5000;
        c.c_grid = {0.95};
        configs.push_back(c);
    }
    for (auto c : configs) {
        c.seed = 424242;
        std::string bytes[2];
        int i = 0;
        for (unsigned workers : {1u, 4u}) {
            c.workers = workers;
            c.out = (dir / ("w" + std::to_string(workers))).string();
            lab::run_experiment(c);
            bytes[i++] = read_file(c.out + ".trials.csv") + read_file(c.out + ".summary.csv");
        }
        o.require(bytes[0] == bytes[1], lab::to_string(c.kind) + " CSV identical for workers 1 and 4");
    }
    o.note(std::to_string(configs.size()) + " experiment kinds");
    return o;
}

} // namespace

int main()
{
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "threshold constants", threshold_constants},
        {2, "exact identities", exact_identities},
        {3, "oracle equivalence", oracle_equivalence},
        {4, "interval certificates", certificates},
        {5, "point value s_4(0.2743)", s4_point},
        {6, "unconstrained transition k=3", unconstrained_transition},
        {7, "constrained transition and window k=4", constrained_transition},
        {8, "core statistics k=3", core_statistics},
        {9, "configuration-model collisions", collision_statistics},
        {10, "enumeration asymptotics", enumeration_asymptotics},
        {11, "reproducibility across worker counts", reproducibility},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failures += !o.pass;
        std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
