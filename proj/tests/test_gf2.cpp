#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "xorlab/gf2.hpp"

using namespace xorlab;
using gf2::BitMatrix;

namespace {

using Dense = std::vector<std::vector<int>>;

Dense random_dense(std::mt19937_64& g, std::size_t rows, std::size_t cols, double density = 0.5)
{
    std::bernoulli_distribution bit(density);
    Dense d(rows, std::vector<int>(cols));
    for (auto& r : d)
        for (auto& x : r) x = bit(g) ? 1 : 0;
    return d;
}

BitMatrix to_bits(const Dense& d)
{
    BitMatrix m(d.size(), d.empty() ? 0 : d[0].size());
    for (std::size_t r = 0; r < d.size(); ++r)
        for (std::size_t c = 0; c < d[r].size(); ++c) m.set(r, c, d[r][c] != 0);
    return m;
}

// Integer elimination mod 2 with full pivoting: pick any remaining nonzero
// entry, swap it to the pivot position, clear its column.
std::size_t oracle_rank(Dense a)
{
    const std::size_t rows = a.size(), cols = rows ? a[0].size() : 0;
    std::vector<std::size_t> col_order(cols);
    for (std::size_t i = 0; i < cols; ++i) col_order[i] = i;
    std::size_t r = 0;
    for (; r < std::min(rows, cols); ++r) {
        bool found = false;
        for (std::size_t i = r; i < rows && !found; ++i) {
            for (std::size_t j = r; j < cols && !found; ++j) {
                if (a[i][col_order[j]] % 2) {
                    std::swap(a[i], a[r]);
                    std::swap(col_order[j], col_order[r]);
                    found = true;
                }
            }
        }
        if (!found) break;
        const std::size_t pc = col_order[r];
        for (std::size_t i = 0; i < rows; ++i) {
            if (i != r && a[i][pc] % 2) {
                for (std::size_t j = 0; j < cols; ++j) a[i][j] = (a[i][j] + a[r][j]) % 2;
            }
        }
    }
    return r;
}

std::size_t enumerate_solutions(const Dense& a, const std::vector<int>& b)
{
    const std::size_t n = a[0].size();
    std::size_t count = 0;
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
        bool ok = true;
        for (std::size_t r = 0; r < a.size() && ok; ++r) {
            int acc = 0;
            for (std::size_t c = 0; c < n; ++c) acc += a[r][c] * static_cast<int>((x >> c) & 1u);
            ok = acc % 2 == b[r];
        }
        count += ok;
    }
    return count;
}

// Nonempty row subsets y with y^T A = 0, by direct summation.
std::size_t enumerate_left_kernel(const Dense& a)
{
    const std::size_t m = a.size(), n = a[0].size();
    std::size_t count = 0;
    for (std::uint64_t y = 1; y < (std::uint64_t{1} << m); ++y) {
        bool zero = true;
        for (std::size_t c = 0; c < n && zero; ++c) {
            int acc = 0;
            for (std::size_t r = 0; r < m; ++r) acc += static_cast<int>((y >> r) & 1u) * a[r][c];
            zero = acc % 2 == 0;
        }
        count += zero;
    }
    return count;
}

} // namespace

TEST_CASE("rank of small fixed matrices")
{
    CHECK(gf2::rank(BitMatrix::identity(3)) == 3);
    const auto dup = to_bits({{1, 0, 1, 1}, {1, 0, 1, 1}});
    CHECK(gf2::rank(dup) == 1);
    CHECK(gf2::rank(BitMatrix(4, 5)) == 0);
    CHECK(gf2::rank(BitMatrix(0, 5)) == 0);
}

TEST_CASE("rank agrees with an independent full-pivoting elimination")
{
    std::mt19937_64 g(11);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t rows = 1 + g() % 20, cols = 1 + g() % 140;
        const auto d = random_dense(g, rows, cols, trial % 3 == 0 ? 0.1 : 0.5);
        CHECK(gf2::rank(to_bits(d)) == oracle_rank(d));
    }
    const auto d = random_dense(g, 12, 14);
    CHECK(gf2::rank(to_bits(d)) == oracle_rank(d));
}

TEST_CASE("rank does not modify its argument")
{
    std::mt19937_64 g(3);
    const auto m = to_bits(random_dense(g, 9, 70));
    const auto copy = m;
    (void)gf2::rank(m);
    CHECK(m == copy);
}

TEST_CASE("solve fixed systems")
{
    const auto s = gf2::solve(BitMatrix::identity(3), Bits{1, 0, 1});
    REQUIRE(s.consistent);
    CHECK(*s.one_solution == Bits{1, 0, 1});
    CHECK(s.solution_count_log2 == 0);

    const auto z = gf2::solve(BitMatrix(2, 3), Bits{1, 0});
    CHECK_FALSE(z.consistent);
    CHECK_FALSE(z.one_solution.has_value());

    CHECK_THROWS_AS(gf2::solve(BitMatrix(2, 3), Bits{1}), std::invalid_argument);
}

TEST_CASE("solve: solution counts match exhaustive enumeration")
{
    std::mt19937_64 g(5);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t rows = 8, cols = 10;
        const auto d = random_dense(g, rows, cols, trial % 2 ? 0.3 : 0.5);
        std::vector<int> b(rows);
        for (auto& x : b) x = static_cast<int>(g() & 1u);
        Bits bb(b.begin(), b.end());
        const auto s = gf2::solve(to_bits(d), bb);
        const std::size_t expected = enumerate_solutions(d, b);
        if (s.consistent) {
            CHECK(expected == (std::size_t{1} << s.solution_count_log2));
            CHECK(gf2::satisfies(to_bits(d), *s.one_solution, bb));
        } else {
            CHECK(expected == 0);
        }
    }
}

TEST_CASE("nullity of the transpose and critical sets")
{
    CHECK(gf2::nullity_transpose(BitMatrix::identity(3)) == 0);
    const auto dup = to_bits({{0, 1, 1, 0}, {0, 1, 1, 0}});
    CHECK(gf2::nullity_transpose(dup) == 1);
    CHECK(gf2::count_critical_sets(dup) == 1);
    CHECK(gf2::brute_force_critical_sets(dup) == 1);
    CHECK(gf2::count_critical_sets(BitMatrix::identity(6)) == 0);
    CHECK(gf2::brute_force_critical_sets(to_bits({{1, 1, 0}})) == 0);
    // row3 = row1 xor row2 with rank 2: exactly one dependent subset.
    const auto tri = to_bits({{1, 1, 0, 0}, {0, 1, 1, 0}, {1, 0, 1, 0}});
    CHECK(gf2::brute_force_critical_sets(tri) == 1);
    CHECK(gf2::critical_sets_by_size(tri)[3] == 1);

    std::mt19937_64 g(17);
    const auto d = random_dense(g, 10, 12);
    CHECK((std::size_t{1} << gf2::nullity_transpose(to_bits(d))) - 1 == enumerate_left_kernel(d));
    const auto tall = random_dense(g, 14, 10);
    CHECK(gf2::count_critical_sets(to_bits(tall)) == enumerate_left_kernel(tall));
}

TEST_CASE("count_critical_sets agrees with brute force on random matrices")
{
    std::mt19937_64 g(23);
    for (int trial = 0; trial < 100; ++trial) {
        const auto d = random_dense(g, 12, 9, 0.4);
        const auto m = to_bits(d);
        CHECK(gf2::count_critical_sets(m) == gf2::brute_force_critical_sets(m));
    }
    CHECK_THROWS_AS(gf2::critical_sets_by_size(BitMatrix(25, 3)), std::invalid_argument);
}

TEST_CASE("exact solution moments")
{
    std::mt19937_64 g(29);
    for (int trial = 0; trial < 30; ++trial) {
        const auto d = random_dense(g, 1 + g() % 7, 1 + g() % 9);
        const auto m = to_bits(d);
        const auto mom = gf2::exact_solution_moments(m);
        CHECK(mom.sum_n == (BigInt(1) << static_cast<unsigned>(m.cols())));
        CHECK(mom.ratio == BigRational(gf2::count_critical_sets(m) + 1));
    }
}

TEST_CASE("from_sparse toggles repeated indices")
{
    const std::vector<std::vector<std::uint32_t>> rows{{0, 0, 2}, {1, 3, 3, 3}};
    const auto m = BitMatrix::from_sparse(4, rows);
    CHECK_FALSE(m.get(0, 0));
    CHECK(m.get(0, 2));
    CHECK(m.get(1, 1));
    CHECK(m.get(1, 3));
    CHECK_THROWS_AS(BitMatrix::from_sparse(3, rows), std::invalid_argument);
}
