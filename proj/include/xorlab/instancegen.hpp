#pragma once

// Samplers for the three random k-XORSAT models:
//   unconstrained  rows are independent uniform k-subsets of the variables
//   relaxed_C      chip allocations: km labelled chips (chip t belongs to row
//                  t / k) dropped into n columns, every column getting >= 2
//   constrained    uniform over systems with all row sums k and all column
//                  sums >= 2, by rejecting chip allocations with a collision

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "xorlab/chip_count.hpp"
#include "xorlab/instance.hpp"
#include "xorlab/rng.hpp"
#include "xorlab/thresholds.hpp"

namespace xorlab::gen {

// Raised when the constrained sampler exhausts its rejection budget.
class RejectionBudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t default_rejection_budget = 1'000'000;

inline Bits random_rhs(CounterRng& rng, std::size_t m)
{
    Bits b(m);
    for (auto& x : b) x = rng.bit() ? 1 : 0;
    return b;
}

// Uniform k-subset of [0, n), sorted (Floyd's algorithm).
inline Row random_subset(CounterRng& rng, int k, std::size_t n)
{
    Row out;
    out.reserve(static_cast<std::size_t>(k));
    for (std::size_t j = n - static_cast<std::size_t>(k); j < n; ++j) {
        const auto t = static_cast<std::uint32_t>(rng.below(j + 1));
        if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
        else out.push_back(static_cast<std::uint32_t>(j));
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline Instance gen_unconstrained(int k, std::size_t m, std::size_t n, Seed seed)
{
    if (k < 1) throw std::invalid_argument("gen_unconstrained: k must be >= 1");
    if (static_cast<std::size_t>(k) > n) throw std::invalid_argument("gen_unconstrained: k > n");
    CounterRng rng(seed);
    Instance inst;
    inst.k = k;
    inst.n = n;
    inst.m = m;
    inst.model_tag = ModelTag::unconstrained;
    inst.seed = seed;
    inst.rows.reserve(m);
    for (std::size_t r = 0; r < m; ++r) inst.rows.push_back(random_subset(rng, k, n));
    inst.rhs = random_rhs(rng, m);
    return inst;
}

// Poisson(lambda) conditioned on being >= 2, sampled by CDF inversion over a
// precomputed table with an exact sequential tail beyond it.
class TruncatedPoisson {
public:
    explicit TruncatedPoisson(double lambda) : lambda_(lambda)
    {
        if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("truncated Poisson: lambda must be > 0");
        log_lambda_ = std::log(lambda);
        log_norm_ = lambda > 1.0 ? lambda + std::log1p(-(1.0 + lambda) * std::exp(-lambda)) : std::log(thresholds::f(lambda));
        const double stop = lambda + 40.0 * std::sqrt(lambda) + 40.0;
        double acc = 0.0;
        for (std::size_t j = 2;; ++j) {
            const double p = pmf(j);
            acc += p;
            cdf_.push_back(acc);
            if (p > pmax_) {
                pmax_ = p;
                mode_ = j;
            }
            if (static_cast<double>(j) > stop || (static_cast<double>(j) > lambda && 1.0 - acc < 1e-17)) break;
        }
    }

    double lambda() const noexcept { return lambda_; }
    double max_pmf() const noexcept { return pmax_; }
    // Values 2 .. table_size() + 1 are covered by the inversion table.
    std::size_t table_size() const noexcept { return cdf_.size(); }
    std::size_t mode() const noexcept { return mode_; }

    double log_pmf(std::size_t j) const
    {
        if (j < 2) return -std::numeric_limits<double>::infinity();
        const double jd = static_cast<double>(j);
        return jd * log_lambda_ - std::lgamma(jd + 1.0) - log_norm_;
    }
    double pmf(std::size_t j) const { return std::exp(log_pmf(j)); }

    std::size_t operator()(CounterRng& rng) const
    {
        const double u = rng.uniform();
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        if (it != cdf_.end()) return 2 + static_cast<std::size_t>(it - cdf_.begin());
        // Tail beyond the table (probability below 1e-17).
        double acc = cdf_.back();
        std::size_t j = 1 + cdf_.size();
        while (acc <= u && j < std::numeric_limits<std::uint32_t>::max()) {
            ++j;
            const double p = pmf(j);
            if (p == 0.0) break;
            acc += p;
        }
        return j;
    }

private:
    double lambda_;
    double log_lambda_ = 0.0;
    double log_norm_ = 0.0;
    double pmax_ = 0.0;
    std::size_t mode_ = 2;
    std::vector<double> cdf_;
};

inline std::size_t sample_truncated_poisson(double lambda, Seed seed)
{
    CounterRng rng(seed);
    return TruncatedPoisson(lambda)(rng);
}

struct ChipAllocation {
    int k = 0;
    std::size_t m = 0;
    std::size_t n = 0;
    // chip_column[t] is the column of chip t; chip t sits in row t / k.
    std::vector<std::uint32_t> chip_column;

    std::size_t row_of(std::size_t chip) const noexcept { return chip / static_cast<std::size_t>(k); }

    // Nonzero cells as (row, col) -> chip count.
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> cell_counts() const
    {
        std::map<std::pair<std::size_t, std::size_t>, std::size_t> out;
        for (std::size_t t = 0; t < chip_column.size(); ++t) ++out[{row_of(t), chip_column[t]}];
        return out;
    }

    std::vector<std::size_t> column_totals() const
    {
        std::vector<std::size_t> out(n, 0);
        for (auto c : chip_column) ++out[c];
        return out;
    }
};

inline void check_allocation(const ChipAllocation& a)
{
    if (a.chip_column.size() != static_cast<std::size_t>(a.k) * a.m) throw std::logic_error("allocation: chip count != km");
    for (auto c : a.chip_column) {
        if (c >= a.n) throw std::logic_error("allocation: column out of range");
    }
    for (auto t : a.column_totals()) {
        if (t < 2) throw std::logic_error("allocation: column with fewer than 2 chips");
    }
}

// M-bar: number of chip pairs sharing a cell.
inline std::size_t collision_count(const ChipAllocation& a)
{
    std::vector<std::uint64_t> cells(a.chip_column.size());
    for (std::size_t t = 0; t < cells.size(); ++t) cells[t] = static_cast<std::uint64_t>(a.row_of(t)) * a.n + a.chip_column[t];
    std::sort(cells.begin(), cells.end());
    std::size_t total = 0;
    for (std::size_t i = 0; i < cells.size();) {
        std::size_t j = i;
        while (j < cells.size() && cells[j] == cells[i]) ++j;
        total += (j - i) * (j - i - 1) / 2;
        i = j;
    }
    return total;
}

// Rows as sorted multisets of column indices, with fresh rhs bits.
inline Instance relaxed_instance(const ChipAllocation& a, CounterRng& rng, Seed seed)
{
    Instance inst;
    inst.k = a.k;
    inst.n = a.n;
    inst.m = a.m;
    inst.model_tag = ModelTag::relaxed_C;
    inst.seed = seed;
    inst.rows.assign(a.m, Row{});
    for (std::size_t t = 0; t < a.chip_column.size(); ++t) inst.rows[a.row_of(t)].push_back(a.chip_column[t]);
    for (auto& row : inst.rows) std::sort(row.begin(), row.end());
    inst.rhs = random_rhs(rng, a.m);
    return inst;
}

enum class DegreeSampling {
    // Draw the first n - r totals freely, accept with probability
    // P_r(rest) / max P_r where P_r is the r-fold convolution of the law,
    // then draw the last r conditioned on their sum. Exact.
    tail_block,
    // Redraw the whole vector until it sums to km.
    whole_vector,
};

struct SamplerStats {
    std::uint64_t degree_retries = 0;      // rejected degree vectors
    std::uint64_t collision_rejections = 0; // constrained sampler only
};

inline constexpr std::size_t tail_block_size = 64;

// Convolution powers P_0..P_r of a truncated Poisson law, and sampling of r
// draws conditioned on their sum.
class TailBlock {
public:
    TailBlock(const TruncatedPoisson& tp, std::size_t r) : r_(r)
    {
        const std::size_t top = tp.table_size() + 1;  // largest value kept
        p_.assign(top + 1, 0.0);
        for (std::size_t j = 2; j <= top; ++j) p_[j] = tp.pmf(j);
        conv_.push_back({1.0});
        for (std::size_t j = 1; j <= r; ++j) {
            const auto& prev = conv_.back();
            std::vector<double> next(prev.size() + top, 0.0);
            for (std::size_t a = 0; a < prev.size(); ++a) {
                if (prev[a] == 0.0) continue;
                for (std::size_t v = 2; v <= top; ++v) next[a + v] += prev[a] * p_[v];
            }
            conv_.push_back(std::move(next));
        }
        peak_ = *std::max_element(conv_.back().begin(), conv_.back().end());
    }

    std::size_t size() const noexcept { return r_; }
    double prob(std::size_t j, std::size_t sum) const { return sum < conv_[j].size() ? conv_[j][sum] : 0.0; }
    double peak() const noexcept { return peak_; }

    // Writes r values summing to `sum` into out[0..r); requires prob(r, sum) > 0.
    void draw(CounterRng& rng, std::size_t sum, std::size_t* out) const
    {
        for (std::size_t j = r_; j >= 1; --j) {
            const double target = rng.uniform() * prob(j, sum);
            double acc = 0.0;
            std::size_t pick = 0;
            for (std::size_t v = 2; v < p_.size() && v <= sum; ++v) {
                const double w = p_[v] * prob(j - 1, sum - v);
                if (w == 0.0) continue;
                pick = v;
                acc += w;
                if (acc > target) break;
            }
            out[r_ - j] = pick;
            sum -= pick;
        }
    }

private:
    std::size_t r_;
    std::vector<double> p_;
    std::vector<std::vector<double>> conv_;
    double peak_ = 0.0;
};

// Column totals: n i.i.d. truncated Poisson draws conditioned on summing to total.
inline std::vector<std::size_t> sample_column_totals(CounterRng& rng, const TruncatedPoisson& tp, std::size_t n,
                                                     std::size_t total, DegreeSampling mode, SamplerStats* stats,
                                                     const TailBlock* block = nullptr)
{
    std::vector<std::size_t> d(n);
    std::optional<TailBlock> own;
    if (mode == DegreeSampling::tail_block && !block) block = &own.emplace(tp, std::min(n, tail_block_size));
    for (;;) {
        if (mode == DegreeSampling::whole_vector) {
            std::size_t s = 0;
            for (auto& x : d) {
                x = tp(rng);
                s += x;
            }
            if (s == total) return d;
        } else {
            const std::size_t r = block->size();
            std::size_t s = 0;
            for (std::size_t i = 0; i + r < n; ++i) {
                d[i] = tp(rng);
                s += d[i];
            }
            if (s <= total) {
                const double p = block->prob(r, total - s);
                // With no free coordinates the sum is fixed and no rejection is needed.
                if (p > 0.0 && (r == n || rng.uniform() * block->peak() < p)) {
                    block->draw(rng, total - s, d.data() + (n - r));
                    return d;
                }
            }
        }
        if (stats) ++stats->degree_retries;
    }
}

namespace detail {

inline void check_chip_params(int k, std::size_t m, std::size_t n, const char* who)
{
    if (k < 1 || n < 1) throw std::invalid_argument(std::string(who) + ": requires k >= 1 and n >= 1");
    if (static_cast<std::size_t>(k) * m < 2 * n) throw std::invalid_argument(std::string(who) + ": requires km >= 2n");
}

// lambda for the degree tilt; km = 2n is the degenerate all-twos case.
inline std::optional<double> degree_tilt(int k, std::size_t m, std::size_t n)
{
    const std::size_t total = static_cast<std::size_t>(k) * m;
    if (total == 2 * n) return std::nullopt;
    return thresholds::lambda_of(static_cast<double>(total) / static_cast<double>(n));
}

// Column label of every chip slot, columns laid out in order.
inline std::vector<std::uint32_t> column_labels(const std::vector<std::size_t>& totals, std::size_t chips)
{
    std::vector<std::uint32_t> labels;
    labels.reserve(chips);
    for (std::size_t c = 0; c < totals.size(); ++c) labels.insert(labels.end(), totals[c], static_cast<std::uint32_t>(c));
    return labels;
}

inline std::vector<std::size_t> draw_totals(CounterRng& rng, const std::optional<TruncatedPoisson>& tp, std::size_t n,
                                            std::size_t total, DegreeSampling mode, SamplerStats* stats)
{
    if (!tp) return std::vector<std::size_t>(n, 2);
    if (mode != DegreeSampling::tail_block) return sample_column_totals(rng, *tp, n, total, mode, stats);
    // The table depends only on (lambda, r); keep the last one per thread.
    struct Cached {
        double lambda = 0.0;
        std::size_t r = 0;
        std::shared_ptr<const TailBlock> block;
    };
    thread_local Cached cache;
    const std::size_t r = std::min(n, tail_block_size);
    if (!cache.block || cache.lambda != tp->lambda() || cache.r != r) {
        cache = {tp->lambda(), r, std::make_shared<const TailBlock>(*tp, r)};
    }
    return sample_column_totals(rng, *tp, n, total, mode, stats, cache.block.get());
}

} // namespace detail

// Uniform element of C_{m,n}: conditioned column totals, then a uniform
// shuffle of the labelled chips assigning consecutive blocks to columns.
inline ChipAllocation gen_C_model(CounterRng& rng, int k, std::size_t m, std::size_t n,
                                  DegreeSampling mode = DegreeSampling::tail_block, SamplerStats* stats = nullptr)
{
    detail::check_chip_params(k, m, n, "gen_C_model");
    const std::size_t total = static_cast<std::size_t>(k) * m;
    std::optional<TruncatedPoisson> tp;
    if (auto lam = detail::degree_tilt(k, m, n)) tp.emplace(*lam);
    ChipAllocation a{k, m, n, detail::column_labels(detail::draw_totals(rng, tp, n, total, mode, stats), total)};
    for (std::size_t t = total; t > 1; --t) std::swap(a.chip_column[t - 1], a.chip_column[rng.below(t)]);
    return a;
}

inline ChipAllocation gen_C_model(int k, std::size_t m, std::size_t n, Seed seed,
                                  DegreeSampling mode = DegreeSampling::tail_block, SamplerStats* stats = nullptr)
{
    CounterRng rng(seed);
    return gen_C_model(rng, k, m, n, mode, stats);
}

// Uniform element of A_{m,n}: rejection of C-model draws with a collision.
// The shuffle is a lazy Fisher-Yates that stops at the first repeated cell.
inline Instance gen_constrained(int k, std::size_t m, std::size_t n, Seed seed,
                                std::uint64_t budget = default_rejection_budget, SamplerStats* stats = nullptr)
{
    detail::check_chip_params(k, m, n, "gen_constrained");
    if (static_cast<std::size_t>(k) > n) throw std::invalid_argument("gen_constrained: k > n");
    CounterRng rng(seed);
    const std::size_t total = static_cast<std::size_t>(k) * m;
    const auto ku = static_cast<std::size_t>(k);
    std::optional<TruncatedPoisson> tp;
    if (auto lam = detail::degree_tilt(k, m, n)) tp.emplace(*lam);
    SamplerStats local;
    SamplerStats& st = stats ? *stats : local;

    for (std::uint64_t attempt = 0;; ++attempt) {
        if (attempt >= budget) {
            throw RejectionBudgetExceeded("gen_constrained: " + std::to_string(budget) +
                                          " rejections without a collision-free allocation (k=" + std::to_string(k) +
                                          ", m=" + std::to_string(m) + ", n=" + std::to_string(n) + ", " +
                                          std::to_string(st.degree_retries) + " degree retries)");
        }
        auto labels = detail::column_labels(detail::draw_totals(rng, tp, n, total, DegreeSampling::tail_block, &st), total);
        bool clash = false;
        for (std::size_t t = 0; t < total && !clash; ++t) {
            std::swap(labels[t], labels[t + rng.below(total - t)]);
            for (std::size_t s = t - t % ku; s < t; ++s) {
                if (labels[s] == labels[t]) {
                    clash = true;
                    break;
                }
            }
        }
        if (clash) {
            ++st.collision_rejections;
            continue;
        }
        Instance inst;
        inst.k = k;
        inst.n = n;
        inst.m = m;
        inst.model_tag = ModelTag::constrained;
        inst.seed = seed;
        inst.rows.resize(m);
        for (std::size_t r = 0; r < m; ++r) {
            inst.rows[r].assign(labels.begin() + static_cast<std::ptrdiff_t>(r * ku),
                                labels.begin() + static_cast<std::ptrdiff_t>((r + 1) * ku));
            std::sort(inst.rows[r].begin(), inst.rows[r].end());
        }
        inst.rhs = random_rhs(rng, m);
        return inst;
    }
}

inline Instance generate(ModelTag model, int k, std::size_t m, std::size_t n, Seed seed)
{
    switch (model) {
    case ModelTag::unconstrained: return gen_unconstrained(k, m, n, seed);
    case ModelTag::constrained: return gen_constrained(k, m, n, seed);
    case ModelTag::relaxed_C: {
        CounterRng rng(seed);
        const auto a = gen_C_model(rng, k, m, n);
        return relaxed_instance(a, rng, seed);
    }
    }
    throw std::invalid_argument("generate: unknown model");
}

// |C_{m,n}| = (km)! [z^{km}] f(z)^n.
struct ChipSpaceSize {
    double log_value = 0.0;
    std::optional<BigInt> exact; // present when km <= exact_chip_budget
};

inline constexpr std::size_t log_count_budget = 600;

inline ChipSpaceSize count_C_exact(int k, std::size_t m, std::size_t n)
{
    if (k < 1 || n < 1) throw std::invalid_argument("count_C_exact: requires k >= 1 and n >= 1");
    const std::size_t total = static_cast<std::size_t>(k) * m;
    ChipSpaceSize out;
    if (total <= chips::exact_chip_budget) {
        chips::PlacementCounter pc(total);
        out.exact = pc.placements(total, {{chips::ColumnLaw::at_least_two, n}});
        out.log_value = chips::log_of(*out.exact);
        return out;
    }
    if (total > log_count_budget) {
        throw std::invalid_argument("count_C_exact: km = " + std::to_string(total) + " exceeds budget " +
                                    std::to_string(log_count_budget));
    }
    out.log_value = chips::log_placements_at_least_two(total, n);
    return out;
}

// Local-limit approximation (km)! f(lambda)^n / (lambda^{km} sqrt(2 pi n Var Z)), in logs.
inline double log_C_asymptotic(int k, std::size_t m, std::size_t n)
{
    const double total = static_cast<double>(k) * static_cast<double>(m);
    const double nd = static_cast<double>(n);
    if (!(total > 2.0 * nd)) throw std::domain_error("log_C_asymptotic: requires km > 2n");
    const double lam = thresholds::lambda_of(total / nd);
    return std::lgamma(total + 1.0) + nd * std::log(thresholds::f(lam)) - total * std::log(lam) -
           0.5 * std::log(2.0 * std::numbers::pi * nd * thresholds::var_Z(lam));
}

} // namespace xorlab::gen
