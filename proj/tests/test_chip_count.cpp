#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "xorlab/chip_count.hpp"
#include "xorlab/instancegen.hpp"

using namespace xorlab;
using chips::ColumnLaw;

namespace {

// Every assignment of k*m labelled chips to n columns, kept when each column
// receives at least two chips.
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

BigInt factorial(unsigned n)
{
    BigInt f = 1;
    for (unsigned i = 2; i <= n; ++i) f *= i;
    return f;
}

} // namespace

TEST_CASE("count_C_exact small values")
{
    const auto c = gen::count_C_exact(3, 2, 2);
    REQUIRE(c.exact);
    CHECK(*c.exact == 50);
    CHECK(c.log_value == Catch::Approx(std::log(50.0)).epsilon(1e-12));
    for (int k = 2; k <= 4; ++k) {
        for (std::size_t m = 1; m <= 3; ++m) CHECK(*gen::count_C_exact(k, m, 1).exact == 1);
    }
    CHECK(*gen::count_C_exact(3, 1, 2).exact == 0);
}

TEST_CASE("count_C_exact matches direct enumeration for km <= 12")
{
    for (int k = 1; k <= 4; ++k) {
        for (std::size_t m = 1; static_cast<std::size_t>(k) * m <= 12; ++m) {
            for (std::size_t n = 1; n <= 4; ++n) {
                const double space = std::pow(static_cast<double>(n), static_cast<double>(k * m));
                if (space > 2e7) continue;
                INFO("k=" << k << " m=" << m << " n=" << n);
                CHECK(*gen::count_C_exact(k, m, n).exact == enumerate_C(k, m, n));
            }
        }
    }
}

TEST_CASE("log-space count agrees with the exact count where both apply")
{
    const auto exact = gen::count_C_exact(3, 40, 30);
    REQUIRE(exact.exact);
    CHECK(chips::log_placements_at_least_two(120, 30) == Catch::Approx(exact.log_value).epsilon(1e-12));
    const auto big = gen::count_C_exact(3, 100, 100);
    CHECK_FALSE(big.exact.has_value());
    CHECK(std::isfinite(big.log_value));
    CHECK_THROWS_AS(gen::count_C_exact(3, 300, 100), std::invalid_argument);
}

TEST_CASE("placement counter: multinomial identities")
{
    chips::PlacementCounter pc(12);
    // Unrestricted placements of T chips into s columns: s^T.
    CHECK(pc.placements(7, {{ColumnLaw::any, 3}}) == BigInt(2187));
    // Surjections of 5 chips onto 3 columns: 150.
    CHECK(pc.placements(5, {{ColumnLaw::at_least_one, 3}}) == 150);
    // exactly_one on T columns with T chips: T! bijections.
    CHECK(pc.placements(6, {{ColumnLaw::exactly_one, 6}}) == factorial(6));
    // positive_even on a single column: 1 when the count is even and >= 2.
    CHECK(pc.placements(4, {{ColumnLaw::positive_even, 1}}) == 1);
    CHECK(pc.placements(5, {{ColumnLaw::positive_even, 1}}) == 0);
    CHECK_THROWS_AS(pc.placements(13, {{ColumnLaw::any, 1}}), std::invalid_argument);
}

// Splitting columns by how many chips they receive from a fixed block of ell
// rows (none / one / two or more) partitions C_{m,n}, so the class sizes must
// add back up to |C_{m,n}| for every ell.
TEST_CASE("three-class column decomposition recovers |C|")
{
    for (const auto [k, m, n] : {std::tuple{3, 4, 5}, std::tuple{3, 6, 4}, std::tuple{4, 5, 6}}) {
        const std::size_t total = static_cast<std::size_t>(k) * m;
        chips::PlacementCounter pc(std::max<std::size_t>(total, n));
        const BigInt all = *gen::count_C_exact(k, m, n).exact;
        for (std::size_t ell = 0; ell <= m; ++ell) {
            const std::size_t top = static_cast<std::size_t>(k) * ell, bottom = total - top;
            BigInt sum = 0;
            for (std::size_t n1 = 0; n1 <= n; ++n1) {
                for (std::size_t n2 = 0; n1 + n2 <= n; ++n2) {
                    const std::size_t n0 = n - n1 - n2;
                    const BigInt ways = pc.binomial(n, n1) * pc.binomial(n - n1, n2);
                    const BigInt t = pc.placements(top, {{ColumnLaw::exactly_one, n1}, {ColumnLaw::at_least_two, n2}});
                    if (t == 0) continue;
                    const BigInt b = pc.placements(
                        bottom, {{ColumnLaw::at_least_two, n0}, {ColumnLaw::at_least_one, n1}, {ColumnLaw::any, n2}});
                    sum += ways * t * b;
                }
            }
            // The block is the first k*ell chips, so no choice factor enters.
            INFO("k=" << k << " m=" << m << " n=" << n << " ell=" << ell);
            CHECK(sum == all);
        }
    }
}

TEST_CASE("log_sum_exp and log_of")
{
    CHECK(chips::log_sum_exp({std::log(2.0), std::log(3.0)}) == Catch::Approx(std::log(5.0)));
    CHECK(chips::log_sum_exp({1000.0, 1000.0}) == Catch::Approx(1000.0 + std::log(2.0)));
    BigInt big = 1;
    big <<= 2000u;
    CHECK(chips::log_of(big) == Catch::Approx(2000.0 * std::log(2.0)).epsilon(1e-12));
    CHECK(std::isinf(chips::log_of(BigInt(0))));
}

TEST_CASE("local-limit asymptotic for |C| at k=3, n=m=100")
{
    const double exact = gen::count_C_exact(3, 100, 100).log_value;
    const double approx = gen::log_C_asymptotic(3, 100, 100);
    const double ratio = std::exp(exact - approx);
    CHECK(ratio >= 0.95);
    CHECK(ratio <= 1.05);
}
