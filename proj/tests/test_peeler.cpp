#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>
#include <vector>

#include "xorlab/gf2.hpp"
#include "xorlab/instancegen.hpp"
#include "xorlab/peeler.hpp"
#include "xorlab/thresholds.hpp"

using namespace xorlab;

namespace {

// Recompute all degrees, drop every equation touching a degree-1 variable and
// every degree-0/1 variable, repeat until nothing changes.
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
        std::set<std::uint32_t> drop_eqs;
        for (auto e : eqs) {
            for (auto v : inst.rows[e]) {
                if (deg[v] == 1) drop_eqs.insert(e);
            }
        }
        for (auto e : drop_eqs) eqs.erase(e);
        for (auto it = vars.begin(); it != vars.end();) {
            if (deg[*it] <= 1) {
                it = vars.erase(it);
                changed = true;
            } else {
                ++it;
            }
        }
        changed = changed || !drop_eqs.empty();
    }
    return {vars, eqs};
}

Instance planted(const Instance& shape, std::mt19937_64& g, Bits& x)
{
    Instance inst = shape;
    x.assign(inst.n, 0);
    for (auto& b : x) b = g() & 1u;
    for (std::size_t r = 0; r < inst.m; ++r) {
        unsigned acc = 0;
        for (auto v : inst.rows[r]) acc ^= x[v];
        inst.rhs[r] = static_cast<std::uint8_t>(acc);
    }
    return inst;
}

} // namespace

TEST_CASE("instance with minimum degree two is its own core")
{
    const auto inst = gen::gen_constrained(3, 12, 15, {5, 5});
    const auto r = peel::two_core(inst);
    CHECK(r.trace.steps.empty());
    CHECK(r.core.rows == inst.rows);
    CHECK(r.core.rhs == inst.rhs);
    CHECK(r.stats.core_vars == 15);
    CHECK(r.stats.core_eqs == 12);
    CHECK(r.core.model_tag == ModelTag::constrained);
}

TEST_CASE("a path system peels completely")
{
    Instance inst;
    inst.k = 3;
    inst.m = 6;
    inst.n = 1 + 2 * inst.m;
    // Equation i uses the shared variable 2i, a private variable 2i+1 and the
    // next shared variable 2i+2.
    for (std::uint32_t i = 0; i < inst.m; ++i) inst.rows.push_back({2 * i, 2 * i + 1, 2 * i + 2});
    inst.rhs = {1, 0, 1, 1, 0, 1};
    const auto r = peel::two_core(inst);
    CHECK(r.stats.core_vars == 0);
    CHECK(r.stats.core_eqs == 0);
    CHECK_FALSE(r.stats.ratio().has_value());
    const Bits x = peel::extend_solution(Bits{}, r.trace, inst);
    CHECK(gf2::satisfies(to_matrix(inst), x, inst.rhs));
}

TEST_CASE("two_core equals the naive fixed point")
{
    for (std::uint64_t s = 0; s < 200; ++s) {
        const std::size_t n = 200;
        const double c = 0.6 + 0.4 * static_cast<double>(s % 5) / 4.0;
        const auto inst = gen::gen_unconstrained(3, static_cast<std::size_t>(c * n), n, {12, s});
        const auto [vars, eqs] = naive_core(inst);
        for (auto order : {peel::PeelOrder::fifo, peel::PeelOrder::lifo}) {
            const auto r = peel::two_core(inst, order);
            CHECK(std::set<std::uint32_t>(r.trace.core_vars.begin(), r.trace.core_vars.end()) == vars);
            CHECK(std::set<std::uint32_t>(r.trace.core_eqs.begin(), r.trace.core_eqs.end()) == eqs);
            CHECK(r.stats.core_vars == vars.size());
            CHECK(r.stats.core_eqs == eqs.size());
            const auto deg = variable_degrees(r.core);
            if (!deg.empty()) CHECK(*std::min_element(deg.begin(), deg.end()) >= 2);
        }
    }
}

TEST_CASE("solve the core, extend, verify on the original")
{
    std::mt19937_64 g(41);
    std::size_t nonempty = 0;
    for (std::uint64_t s = 0; s < 1000; ++s) {
        const std::size_t n = 60;
        const auto shape = gen::gen_unconstrained(3, 40 + s % 20, n, {77, s});
        Bits planted_x;
        const auto inst = planted(shape, g, planted_x);
        const auto r = peel::two_core(inst);
        nonempty += r.stats.core_eqs > 0;
        const auto sol = gf2::solve(to_matrix(r.core), r.core.rhs);
        REQUIRE(sol.consistent);
        const Bits x = peel::extend_solution(*sol.one_solution, r.trace, inst);
        REQUIRE(gf2::satisfies(to_matrix(inst), x, inst.rhs));
    }
    CHECK(nonempty > 0);
}

TEST_CASE("extend_solution is the identity without peeling")
{
    std::mt19937_64 g(3);
    const auto shape = gen::gen_constrained(3, 20, 25, {2, 2});
    Bits x0;
    const auto inst = planted(shape, g, x0);
    const auto r = peel::two_core(inst);
    REQUIRE(r.trace.steps.empty());
    CHECK(peel::extend_solution(x0, r.trace, inst) == x0);
    Bits wrong = x0;
    // Flipping a variable of degree >= 2 breaks at least one core equation.
    wrong[inst.rows[0][0]] ^= 1u;
    CHECK_THROWS_AS(peel::extend_solution(wrong, r.trace, inst), std::invalid_argument);
    CHECK_THROWS_AS(peel::extend_solution(Bits(3, 0), r.trace, inst), std::invalid_argument);
}

TEST_CASE("core is empty below the 2-core threshold")
{
    CHECK(thresholds::c_hat(3) > 0.7);
    std::size_t empty = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        empty += peel::core_density(gen::gen_unconstrained(3, 70000, 100000, {21, s})).core_vars == 0;
    }
    CHECK(empty >= 19);
}

TEST_CASE("relaxed instances are rejected")
{
    const auto inst = gen::generate(ModelTag::relaxed_C, 3, 30, 20, {1, 1});
    CHECK_THROWS_AS(peel::two_core(inst), std::invalid_argument);
}

TEST_CASE("trace JSON and stats CSV")
{
    const auto inst = gen::gen_unconstrained(3, 30, 40, {3, 9});
    const auto r = peel::two_core(inst);
    const auto j = peel::to_json(r.trace);
    CHECK(j.at("steps").size() == r.trace.steps.size());
    CHECK(j.at("core_vars").size() == r.stats.core_vars);
    const std::string line = peel::stats_csv_line(r.stats, inst.seed);
    CHECK(line.rfind("40,30,", 0) == 0);
    CHECK(line.find("3:9") != std::string::npos);
    CHECK(std::string(peel::stats_csv_header) == "n,m,N,M,ratio,seed");
}
