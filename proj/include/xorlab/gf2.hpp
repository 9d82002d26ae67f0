#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace xorlab {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

// A vector over GF(2), one byte per entry holding 0 or 1.
using Bits = std::vector<std::uint8_t>;

namespace gf2 {

// Dense row-major bit-packed matrix over GF(2). Bits past the last column of
// every row are kept at zero.
class BitMatrix {
public:
    using word_type = std::uint64_t;
    static constexpr std::size_t word_bits = 64;

    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), stride_((cols + word_bits - 1) / word_bits), data_(rows * stride_, 0)
    {
    }

    static BitMatrix identity(std::size_t n)
    {
        BitMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
        return m;
    }

    // Each row lists column indices; a repeated index toggles the bit, so a
    // multiset row yields its parity pattern.
    template <typename RowRange>
    static BitMatrix from_sparse(std::size_t cols, const RowRange& rows)
    {
        BitMatrix m(std::size(rows), cols);
        std::size_t r = 0;
        for (const auto& row : rows) {
            for (auto c : row) {
                if (static_cast<std::size_t>(c) >= cols) throw std::invalid_argument("from_sparse: column index out of range");
                m.flip(r, static_cast<std::size_t>(c));
            }
            ++r;
        }
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t words_per_row() const noexcept { return stride_; }
    std::span<const word_type> data() const noexcept { return data_; }

    bool get(std::size_t r, std::size_t c) const noexcept
    {
        return (data_[r * stride_ + c / word_bits] >> (c % word_bits)) & 1u;
    }
    void set(std::size_t r, std::size_t c, bool v) noexcept
    {
        auto& w = data_[r * stride_ + c / word_bits];
        const word_type mask = word_type{1} << (c % word_bits);
        w = v ? (w | mask) : (w & ~mask);
    }
    void flip(std::size_t r, std::size_t c) noexcept { data_[r * stride_ + c / word_bits] ^= word_type{1} << (c % word_bits); }

    std::span<word_type> row(std::size_t r) noexcept { return {data_.data() + r * stride_, stride_}; }
    std::span<const word_type> row(std::size_t r) const noexcept { return {data_.data() + r * stride_, stride_}; }

    // row(dst) ^= row(src), touching only words from `first_word` on.
    void xor_row(std::size_t dst, std::size_t src, std::size_t first_word = 0) noexcept
    {
        word_type* d = data_.data() + dst * stride_;
        const word_type* s = data_.data() + src * stride_;
        for (std::size_t w = first_word; w < stride_; ++w) d[w] ^= s[w];
    }

    void swap_rows(std::size_t a, std::size_t b) noexcept
    {
        if (a == b) return;
        std::swap_ranges(data_.begin() + static_cast<std::ptrdiff_t>(a * stride_),
                         data_.begin() + static_cast<std::ptrdiff_t>((a + 1) * stride_),
                         data_.begin() + static_cast<std::ptrdiff_t>(b * stride_));
    }

    bool row_is_zero(std::size_t r) const noexcept
    {
        const auto rw = row(r);
        return std::all_of(rw.begin(), rw.end(), [](word_type w) { return w == 0; });
    }

    friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t stride_ = 0;
    std::vector<word_type> data_;
};

struct SolveResult {
    bool consistent = false;
    std::size_t rank = 0;
    std::optional<Bits> one_solution;
    // cols - rank when consistent, 0 otherwise.
    std::size_t solution_count_log2 = 0;
};

namespace detail {

// Forward elimination restricted to the first `pivot_cols` columns. Rows
// [0, rank) end up in echelon form; returns the pivot column of each.
inline std::vector<std::size_t> forward_eliminate(BitMatrix& m, std::size_t pivot_cols)
{
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    const std::size_t rows = m.rows();
    for (std::size_t c = 0; c < pivot_cols && r < rows; ++c) {
        const std::size_t word = c / BitMatrix::word_bits;
        const BitMatrix::word_type mask = BitMatrix::word_type{1} << (c % BitMatrix::word_bits);
        std::size_t p = r;
        while (p < rows && (m.row(p)[word] & mask) == 0) ++p;
        if (p == rows) continue;
        m.swap_rows(r, p);
        for (std::size_t i = r + 1; i < rows; ++i) {
            if (m.row(i)[word] & mask) m.xor_row(i, r, word);
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

} // namespace detail

// GF(2) rank. The argument is copied; the caller's matrix is unchanged.
inline std::size_t rank(const BitMatrix& m)
{
    BitMatrix work = m;
    return detail::forward_eliminate(work, work.cols()).size();
}

// Solves A x = b over GF(2). When consistent, one_solution sets every free
// variable to zero.
inline SolveResult solve(const BitMatrix& a, std::span<const std::uint8_t> b)
{
    if (b.size() != a.rows()) {
        throw std::invalid_argument("solve: rhs length " + std::to_string(b.size()) + " != rows " +
                                    std::to_string(a.rows()));
    }
    const std::size_t n = a.cols();
    BitMatrix aug(a.rows(), n + 1);
    for (std::size_t r = 0; r < a.rows(); ++r) {
        const auto src = a.row(r);
        auto dst = aug.row(r);
        std::copy(src.begin(), src.end(), dst.begin());
        if (b[r] & 1u) aug.set(r, n, true);
    }
    const auto pivots = detail::forward_eliminate(aug, n);
    SolveResult out;
    out.rank = pivots.size();
    for (std::size_t r = out.rank; r < aug.rows(); ++r) {
        if (aug.get(r, n)) return out;
    }
    out.consistent = true;
    out.solution_count_log2 = n - out.rank;

    // Back substitution on packed words; the rhs column is masked out.
    const std::size_t stride = aug.words_per_row();
    std::vector<BitMatrix::word_type> x(stride, 0);
    const std::size_t rhs_word = n / BitMatrix::word_bits;
    const BitMatrix::word_type rhs_mask = BitMatrix::word_type{1} << (n % BitMatrix::word_bits);
    for (std::size_t r = out.rank; r-- > 0;) {
        const auto rw = aug.row(r);
        unsigned parity = 0;
        for (std::size_t w = pivots[r] / BitMatrix::word_bits; w < stride; ++w) {
            auto v = rw[w] & x[w];
            if (w == rhs_word) v &= ~rhs_mask;
            parity ^= static_cast<unsigned>(std::popcount(v)) & 1u;
        }
        const unsigned rhs = (rw[rhs_word] & rhs_mask) ? 1u : 0u;
        if (rhs ^ parity) x[pivots[r] / BitMatrix::word_bits] |= BitMatrix::word_type{1} << (pivots[r] % BitMatrix::word_bits);
    }
    Bits sol(n, 0);
    for (std::size_t c = 0; c < n; ++c) sol[c] = static_cast<std::uint8_t>((x[c / BitMatrix::word_bits] >> (c % BitMatrix::word_bits)) & 1u);
    out.one_solution = std::move(sol);
    return out;
}

// Dimension of the left kernel {y : y^T A = 0}.
inline std::size_t nullity_transpose(const BitMatrix& m) { return m.rows() - rank(m); }

// Number of nonempty row subsets summing to zero: 2^nullity(A^T) - 1.
inline BigInt count_critical_sets(const BitMatrix& m)
{
    BigInt out = 1;
    out <<= static_cast<unsigned>(nullity_transpose(m));
    return out - 1;
}

inline constexpr std::size_t brute_force_row_limit = 24;

// Critical-set counts indexed by subset cardinality (index 0 is unused), by
// enumerating every row subset in Gray-code order.
inline std::vector<BigInt> critical_sets_by_size(const BitMatrix& m)
{
    if (m.rows() > brute_force_row_limit) {
        throw std::invalid_argument("critical set enumeration refused: " + std::to_string(m.rows()) + " rows > " +
                                    std::to_string(brute_force_row_limit));
    }
    const std::size_t rows = m.rows();
    std::vector<std::uint64_t> counts(rows + 1, 0);
    std::vector<BitMatrix::word_type> acc(m.words_per_row(), 0);
    const std::uint64_t total = std::uint64_t{1} << rows;
    for (std::uint64_t i = 1; i < total; ++i) {
        const auto flip_row = static_cast<std::size_t>(std::countr_zero(i));
        const auto src = m.row(flip_row);
        bool zero = true;
        for (std::size_t w = 0; w < acc.size(); ++w) {
            acc[w] ^= src[w];
            zero = zero && acc[w] == 0;
        }
        if (zero) {
            const std::uint64_t gray = i ^ (i >> 1);
            ++counts[static_cast<std::size_t>(std::popcount(gray))];
        }
    }
    return {counts.begin(), counts.end()};
}

inline BigInt brute_force_critical_sets(const BitMatrix& m)
{
    BigInt total = 0;
    for (const auto& c : critical_sets_by_size(m)) total += c;
    return total;
}

// Exact first and second moments of the solution count N(b) over all 2^m
// right-hand sides for a fixed A.
struct SolutionMoments {
    BigInt sum_n;          // sum over b of N(b)
    BigInt sum_n_squared;  // sum over b of N(b)^2
    BigRational mean_n;    // E_b[N]
    BigRational ratio;     // E_b[N^2] / E_b[N]^2
};

inline constexpr std::size_t moment_enumeration_limit = 20;

inline SolutionMoments exact_solution_moments(const BitMatrix& a)
{
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    if (m > moment_enumeration_limit || n > moment_enumeration_limit) {
        throw std::invalid_argument("exact_solution_moments: dimensions exceed enumeration limit");
    }
    std::vector<std::uint32_t> column(n, 0);
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t r = 0; r < m; ++r) {
            if (a.get(r, c)) column[c] |= std::uint32_t{1} << r;
        }
    }
    std::vector<std::uint64_t> hits(std::size_t{1} << m, 0);
    std::uint32_t image = 0;
    hits[0] = 1;
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t i = 1; i < total; ++i) {
        image ^= column[static_cast<std::size_t>(std::countr_zero(i))];
        ++hits[image];
    }
    SolutionMoments out;
    for (auto h : hits) {
        out.sum_n += h;
        out.sum_n_squared += BigInt(h) * h;
    }
    const BigInt bcount = BigInt(1) << static_cast<unsigned>(m);
    out.mean_n = BigRational(out.sum_n, bcount);
    const BigRational second = BigRational(out.sum_n_squared, bcount);
    out.ratio = second / (out.mean_n * out.mean_n);
    return out;
}

// True when A x = b holds exactly.
inline bool satisfies(const BitMatrix& a, std::span<const std::uint8_t> x, std::span<const std::uint8_t> b)
{
    if (x.size() != a.cols() || b.size() != a.rows()) return false;
    for (std::size_t r = 0; r < a.rows(); ++r) {
        unsigned acc = 0;
        for (std::size_t c = 0; c < a.cols(); ++c) acc ^= (a.get(r, c) ? 1u : 0u) & x[c];
        if (acc != (b[r] & 1u)) return false;
    }
    return true;
}

} // namespace gf2
} // namespace xorlab
