#pragma once

// Exact counting of labelled-chip placements into columns with per-column
// occupancy laws. A placement of T labelled chips into columns with
// admissible counts j_1, ..., j_s is weighted by the multinomial
// T! / (j_1! ... j_s!), i.e. T! times a coefficient of a product of
// exponential generating functions.

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "xorlab/gf2.hpp"

namespace xorlab::chips {

enum class ColumnLaw {
    any,            // e^z
    at_least_one,   // e^z - 1
    at_least_two,   // e^z - 1 - z
    positive_even,  // cosh z - 1
    exactly_one,    // z
};

inline bool admits(ColumnLaw law, std::size_t j) noexcept
{
    switch (law) {
    case ColumnLaw::any: return true;
    case ColumnLaw::at_least_one: return j >= 1;
    case ColumnLaw::at_least_two: return j >= 2;
    case ColumnLaw::positive_even: return j >= 2 && j % 2 == 0;
    case ColumnLaw::exactly_one: return j == 1;
    }
    return false;
}

// Upper bound on chip totals handled by the big-integer engine.
inline constexpr std::size_t exact_chip_budget = 120;

class PlacementCounter {
public:
    explicit PlacementCounter(std::size_t max_chips) : max_(max_chips), binom_(max_chips + 1)
    {
        for (std::size_t t = 0; t <= max_; ++t) {
            binom_[t].assign(t + 1, BigInt(1));
            for (std::size_t j = 1; j < t; ++j) binom_[t][j] = binom_[t - 1][j - 1] + binom_[t - 1][j];
        }
    }

    std::size_t max_chips() const noexcept { return max_; }
    const BigInt& binomial(std::size_t t, std::size_t j) const { return binom_[t][j]; }

    // ways[t] for a single column.
    std::vector<BigInt> single(ColumnLaw law) const
    {
        std::vector<BigInt> w(max_ + 1, BigInt(0));
        for (std::size_t t = 0; t <= max_; ++t) {
            if (admits(law, t)) w[t] = 1;
        }
        return w;
    }

    // out[t] = sum_j C(t, j) a[j] b[t - j].
    std::vector<BigInt> convolve(const std::vector<BigInt>& a, const std::vector<BigInt>& b) const
    {
        std::vector<BigInt> out(max_ + 1, BigInt(0));
        for (std::size_t t = 0; t <= max_; ++t) {
            BigInt acc = 0;
            for (std::size_t j = 0; j <= t; ++j) {
                if (a[j].is_zero() || b[t - j].is_zero()) continue;
                acc += binom_[t][j] * a[j] * b[t - j];
            }
            out[t] = std::move(acc);
        }
        return out;
    }

    std::vector<BigInt> power(const std::vector<BigInt>& base, std::size_t count) const
    {
        std::vector<BigInt> result(max_ + 1, BigInt(0));
        result[0] = 1;
        std::vector<BigInt> sq = base;
        while (count > 0) {
            if (count & 1u) result = convolve(result, sq);
            count >>= 1;
            if (count > 0) sq = convolve(sq, sq);
        }
        return result;
    }

    // Placements of `chips` labelled chips into groups of identical-law columns.
    BigInt placements(std::size_t chips, std::initializer_list<std::pair<ColumnLaw, std::size_t>> groups) const
    {
        if (chips > max_) throw std::invalid_argument("placements: chip count exceeds counter size");
        std::vector<BigInt> acc(max_ + 1, BigInt(0));
        acc[0] = 1;
        for (const auto& [law, count] : groups) acc = convolve(acc, power(single(law), count));
        return acc[chips];
    }

private:
    std::size_t max_;
    std::vector<std::vector<BigInt>> binom_;
};

inline double log_of(const BigInt& x)
{
    if (x <= 0) return -std::numeric_limits<double>::infinity();
    const auto bits = boost::multiprecision::msb(x);
    if (bits < 900) return std::log(x.convert_to<double>());
    const auto shift = static_cast<unsigned>(bits - 60);
    const BigInt top = x >> shift;
    return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::log(2.0);
}

// log of sum exp(v_i) with compensated accumulation of the scaled terms.
inline double log_sum_exp(const std::vector<double>& v)
{
    double hi = -std::numeric_limits<double>::infinity();
    for (double x : v) hi = std::max(hi, x);
    if (!std::isfinite(hi)) return hi;
    double sum = 0.0;
    double comp = 0.0;
    for (double x : v) {
        const double y = std::exp(x - hi) - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return hi + std::log(sum);
}

// log of the number of placements of `chips` labelled chips into `columns`
// columns each receiving at least two chips, by a log-space column DP.
inline double log_placements_at_least_two(std::size_t chips, std::size_t columns)
{
    const double neg_inf = -std::numeric_limits<double>::infinity();
    if (chips < 2 * columns) return neg_inf;
    std::vector<double> log_fact(chips + 1, 0.0);
    for (std::size_t t = 1; t <= chips; ++t) log_fact[t] = log_fact[t - 1] + std::log(static_cast<double>(t));
    auto log_binom = [&](std::size_t t, std::size_t j) { return log_fact[t] - log_fact[j] - log_fact[t - j]; };

    std::vector<double> cur(chips + 1, neg_inf);
    cur[0] = 0.0;
    std::vector<double> terms;
    for (std::size_t s = 1; s <= columns; ++s) {
        std::vector<double> next(chips + 1, neg_inf);
        // Remaining columns need at least 2 chips each.
        const std::size_t reserve = 2 * (columns - s);
        for (std::size_t t = 2 * s; t + reserve <= chips; ++t) {
            terms.clear();
            for (std::size_t j = 2; j + 2 * (s - 1) <= t; ++j) {
                if (std::isfinite(cur[t - j])) terms.push_back(log_binom(t, j) + cur[t - j]);
            }
            next[t] = log_sum_exp(terms);
        }
        cur = std::move(next);
    }
    return cur[chips];
}

} // namespace xorlab::chips
