#pragma once

// Interval-arithmetic certificates for the negativity claims on s_k and H_k
// and for the supporting constant and monotonicity inequalities.
//
// A certificate is a list of cells. Each cell names a check, the domain it
// covers, and the certified bound (an upper bound for < and <= checks, a lower
// bound for > and >= checks). replay() recomputes every bound from the stored
// cell data alone, without repeating any search.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "xorlab/interval.hpp"
#include "xorlab/parallel.hpp"
#include "xorlab/thresholds.hpp"

namespace xorlab::cert {

using iv::Interval;
using thresholds::ZetaChoice;

enum class Relation { less, less_equal, greater, greater_equal };

inline const char* to_string(Relation r)
{
    switch (r) {
    case Relation::less: return "<";
    case Relation::less_equal: return "<=";
    case Relation::greater: return ">";
    case Relation::greater_equal: return ">=";
    }
    return "?";
}

inline Relation relation_from_string(const std::string& s)
{
    if (s == "<") return Relation::less;
    if (s == "<=") return Relation::less_equal;
    if (s == ">") return Relation::greater;
    if (s == ">=") return Relation::greater_equal;
    throw std::invalid_argument("unknown relation '" + s + "'");
}

inline bool holds(double bound, Relation r, double threshold)
{
    switch (r) {
    case Relation::less: return bound < threshold;
    case Relation::less_equal: return bound <= threshold;
    case Relation::greater: return bound > threshold;
    case Relation::greater_equal: return bound >= threshold;
    }
    return false;
}

inline bool is_upper(Relation r) { return r == Relation::less || r == Relation::less_equal; }

struct CellRecord {
    std::string check;
    Interval domain;
    std::vector<double> params;
    std::optional<ZetaChoice> zeta;
    int pieces = 0;
    double bound = 0.0;
    Relation relation = Relation::less;
    double threshold = 0.0;
    bool ok = false;
};

struct Certificate {
    std::string claim_id;
    int k = 0;
    Interval c_range{1.0, 1.0};
    double target = 0.0;
    // Cells form a gap-free cover of `range` (cover claims only).
    std::optional<Interval> range;
    std::vector<CellRecord> cells;
    // Cover claims: the largest certified upper bound over all cells.
    // Mixed collections: the largest signed margin, negative when every
    // check holds strictly.
    double global_bound = 0.0;
    bool verified = false;
    std::optional<std::string> failure;
};

// ---- rigorous helpers ----

// Certified lower / upper bounds on psi^{-1}(d), using that psi is increasing.
inline double lambda_lower(double d)
{
    double x = thresholds::lambda_of(d);
    double step = 1e-13 * std::max(1.0, x);
    while (iv::psi_point(x).hi >= d) {
        x -= step;
        step *= 2.0;
    }
    return x;
}

inline double lambda_upper(double d)
{
    double x = thresholds::lambda_of(d);
    double step = 1e-13 * std::max(1.0, x);
    while (iv::psi_point(x).lo <= d) {
        x += step;
        step *= 2.0;
    }
    return x;
}

inline Interval lambda_enclosure(const Interval& d) { return {lambda_lower(d.lo), lambda_upper(d.hi)}; }

// Range of s_k over a subset of [0, 1/2]: H is increasing there and
// ln(1/2 + exp(-2k a)/2) is decreasing, so each endpoint bounds one term.
inline Interval interval_s_k(int k, const Interval& a)
{
    if (a.lo < 0.0 || a.hi > 0.5 || a.lo > a.hi) throw std::invalid_argument("interval_s_k: domain must lie in [0, 1/2]");
    auto tail = [k](double x) { return iv::log1p(0.5 * iv::expm1(Interval::point(-2.0 * k) * Interval::point(x))); };
    const Interval up_sum = iv::entropy_point(a.hi) + tail(a.lo);
    const Interval lo_sum = iv::entropy_point(a.lo) + tail(a.hi);
    return {lo_sum.lo, up_sum.hi};
}

// Upper bound of A(alpha) = -(k-1) H(alpha) - k (alpha ln z1 + (1-alpha) ln z2)
// at a double alpha; A is convex, so its maximum over a cell is at an end.
inline double alpha_part_upper(int k, double alpha, const ZetaChoice& z)
{
    const Interval a = Interval::point(alpha);
    const Interval lin = a * iv::log(Interval::point(z.zeta1)) + (1.0 - a) * iv::log(Interval::point(z.zeta2));
    return (Interval::point(-(k - 1.0)) * iv::entropy_point(alpha) - Interval::point(static_cast<double>(k)) * lin).hi;
}

// Upper bound of ln[(f(l s1) + f(l s2)) / (2 f(l))] for l in [l0, l1]. Each
// f(l s) is increasing in l for either sign of s, as is f(l).
inline double lambda_part_upper(double l0, double l1, const ZetaChoice& z)
{
    const Interval L1 = Interval::point(l1);
    const Interval num = iv::f(L1 * (Interval::point(z.zeta2) + Interval::point(z.zeta1))) +
                         iv::f(L1 * (Interval::point(z.zeta2) - Interval::point(z.zeta1)));
    const double den = iv::f_point(l0).lo;
    if (!(den > 0.0)) throw std::domain_error("lambda_part_upper: lambda too small");
    return iv::log(Interval::point(num.hi) / (2.0 * Interval::point(den))).hi;
}

// Certified lambda enclosures at the breakpoints c_i = c0 + i (c1 - c0) / N.
class LambdaGrid {
public:
    static constexpr int max_pieces = 256;

    LambdaGrid(int k, Interval c_range) : k_(k), c_(c_range)
    {
        for (int i = 0; i <= max_pieces; ++i) {
            const double c = breakpoint(i);
            const Interval d = Interval::point(static_cast<double>(k)) * Interval::point(c);
            lo_.push_back(lambda_lower(d.lo));
            hi_.push_back(lambda_upper(d.hi));
        }
    }

    double breakpoint(int i) const
    {
        if (i == 0) return c_.lo;
        if (i == max_pieces) return c_.hi;
        return c_.lo + (c_.hi - c_.lo) * (static_cast<double>(i) / max_pieces);
    }
    // Breakpoints of piece `p` of `pieces` (pieces divides max_pieces).
    int index(int p, int pieces) const { return p * (max_pieces / pieces); }
    double lambda_lo(int i) const { return lo_[static_cast<std::size_t>(i)]; }
    double lambda_hi(int i) const { return hi_[static_cast<std::size_t>(i)]; }
    int k() const noexcept { return k_; }
    const Interval& c_range() const noexcept { return c_; }

private:
    int k_;
    Interval c_;
    std::vector<double> lo_, hi_;
};

// Upper bound of H_k(alpha, zeta; c) over alpha in `alpha` and c in the grid's
// range, splitting c into `pieces` equal parts.
inline double H_k_upper(const LambdaGrid& grid, const Interval& alpha, const ZetaChoice& z, int pieces)
{
    if (pieces < 1 || LambdaGrid::max_pieces % pieces != 0) throw std::invalid_argument("H_k_upper: pieces must divide 256");
    const int k = grid.k();
    const double a_max = std::max(alpha_part_upper(k, alpha.lo, z), alpha_part_upper(k, alpha.hi, z));
    double worst = -std::numeric_limits<double>::infinity();
    for (int p = 0; p < pieces; ++p) {
        const int i0 = grid.index(p, pieces), i1 = grid.index(p + 1, pieces);
        const double c_part = (Interval(grid.breakpoint(i0), grid.breakpoint(i1)) * Interval::point(a_max)).hi;
        const double l_part = lambda_part_upper(grid.lambda_lo(i0), grid.lambda_hi(i1), z);
        worst = std::max(worst, (Interval::point(c_part) + Interval::point(l_part)).hi);
    }
    return worst;
}

// ---- named checks ----

namespace detail {

// Partial sum of phi(x) = sum_{j>=1} x^{2j-2} / (2j (2j-1)); all terms are
// positive, so this is a lower bound.
inline double phi_lower(double x)
{
    const Interval xi = Interval::point(x);
    Interval acc = Interval::point(0.0);
    Interval power = Interval::point(1.0);
    for (int j = 1; j <= 12; ++j) {
        acc = acc + power / Interval::point(2.0 * j * (2.0 * j - 1.0));
        power = power * iv::sqr(xi);
    }
    return acc.lo;
}

// Enclosure of R(l, x) = f(l x) / (x^2 f(l)) at doubles l, x > 0.
inline Interval R_point(double l, double x)
{
    const Interval X = Interval::point(x);
    return iv::f(Interval::point(l) * X) / (iv::sqr(X) * iv::f_point(l));
}

// E(x) = kappa ln(4 / (x^2 + 2)) + ln(1/2 + x^2/2), kappa = 3.3992 / 4.
inline Interval entropy_use(const Interval& x)
{
    const Interval kappa = Interval::around(3.3992) / 4.0;
    const Interval x2 = iv::sqr(x);
    return kappa * iv::log(4.0 / (x2 + 2.0)) + iv::log(0.5 + 0.5 * x2);
}

inline double lower_by_series_or_direct(const Interval& x, double series_coef, int series_power,
                                        const std::function<Interval(const Interval&)>& direct)
{
    if (x.hi <= 1.0) {
        // Positive-coefficient series: the leading term at x.lo is a lower bound.
        return (Interval::point(series_coef) * Interval::point(std::pow(x.lo, series_power))).lo * (1.0 - 1e-12);
    }
    return direct(x).lo;
}

} // namespace detail

// Evaluates the certified bound of a cell from its stored data.
inline double evaluate_cell(const CellRecord& cell, const LambdaGrid* grid)
{
    const std::string& c = cell.check;
    const Interval& d = cell.domain;
    auto param = [&](std::size_t i) {
        if (i >= cell.params.size()) throw std::invalid_argument("cell '" + c + "' is missing a parameter");
        return cell.params[i];
    };
    if (c == "s_k") return interval_s_k(static_cast<int>(param(0)), d).hi;
    if (c == "H_k") {
        if (!grid || !cell.zeta) throw std::invalid_argument("H_k cell needs a lambda grid and zeta");
        return H_k_upper(*grid, d, *cell.zeta, cell.pieces);
    }
    if (c == "entropy_upper") return iv::entropy(d).hi;
    if (c == "log_half_exp_upper") {
        // ln(1/2 + e^{-t}/2) is decreasing in t.
        return iv::log1p(0.5 * iv::expm1(-Interval::point(d.lo))).hi;
    }
    if (c == "scaled_alpha_k_lower") {
        const double k = param(0);
        const Interval a = iv::exp(Interval::point(1.0) - Interval::point(k) / Interval::point(k - 2.0) *
                                                            iv::log(Interval::point(k)));
        return (Interval::around(param(1)) * a).lo;
    }
    if (c == "R_upper") {
        // Increasing in x, decreasing in lambda.
        const Interval l = Interval::around(param(0));
        return detail::R_point(l.lo, d.hi).hi;
    }
    if (c == "psi_upper") return iv::psi_point(d.hi).hi;
    if (c == "psi_lower") return iv::psi_point(d.lo).lo;
    if (c == "log4_lower") {
        // ln(4 / (x^2 + 2)) is decreasing in x.
        const Interval x = Interval::point(d.hi);
        return iv::log(4.0 / (iv::sqr(x) + 2.0)).lo;
    }
    if (c == "entropy_use_upper") return detail::entropy_use(Interval::point(d.hi)).hi;
    if (c == "entropy_use_slope_lower") {
        const Interval kappa = Interval::around(3.3992) / 4.0;
        // The slope is 2x times this bracket, so for x >= 0 the bracket decides its sign.
        if (d.lo < 0.0) throw std::domain_error("entropy_use_slope_lower: domain must lie in x >= 0");
        const Interval x2 = iv::sqr(d);
        return (1.0 / (1.0 + x2) - kappa / (x2 + 2.0)).lo;
    }
    if (c == "entropy_gap_curvature_upper") {
        // D(x) = H(1/2 - x/2) - ln(4/(x^2+2)), D'' = -x^2 (10 - x^2) / ((x^2+2)^2 (1 - x^2)).
        const Interval x2 = iv::sqr(d);
        return (-(x2 * (10.0 - x2)) / (iv::sqr(x2 + 2.0) * (1.0 - x2))).hi;
    }
    if (c == "entropy_gap_upper") {
        // y = 1/2 - x/2 is computed exactly for x in [0, 1]; H increases on [0, 1/2].
        const double y_hi = 0.5 - 0.5 * d.lo;
        const Interval x = Interval::point(d.hi);
        return (Interval::point(iv::entropy_point(y_hi).hi) - iv::log(4.0 / (iv::sqr(x) + 2.0))).hi;
    }
    if (c == "keycase_upper") {
        // H_k + x^2/15 <= x^2 (-phi(x) + R(lambda, x) + 1/15) at c = 1, with
        // phi increasing in x and R increasing in x, decreasing in lambda.
        const double l = lambda_lower(param(0));
        const Interval q = Interval::point(-detail::phi_lower(d.lo)) + detail::R_point(l, d.hi) + 1.0 / Interval::point(15.0);
        const double x2 = q.hi < 0.0 ? iv::sqr(Interval::point(d.lo)).lo : iv::sqr(Interval::point(d.hi)).hi;
        return (Interval::point(x2) * Interval::point(q.hi)).hi;
    }
    if (c == "psi_numerator_lower") {
        // e^x + e^{-x} - 2 - x^2 = 2 sum_{j>=2} x^{2j} / (2j)!
        return detail::lower_by_series_or_direct(d, 2.0 / 24.0, 4, [](const Interval& x) {
            return 2.0 * iv::cosh(x) - 2.0 - iv::sqr(x);
        });
    }
    if (c == "cubic_exp_lower") {
        // (s-2) e^s + s + 2 = sum_{j>=3} (j-2) s^j / j!
        return detail::lower_by_series_or_direct(d, 1.0 / 6.0, 3, [](const Interval& s) {
            return (s - 2.0) * iv::exp(s) + s + 2.0;
        });
    }
    if (c == "cosh_gap_lower") {
        // e^{x^2/2} - cosh x = sum_j x^{2j} (1/(2^j j!) - 1/(2j)!)
        return detail::lower_by_series_or_direct(d, 1.0 / 12.0, 4, [](const Interval& x) {
            return iv::exp(0.5 * iv::sqr(x)) - iv::cosh(x);
        });
    }
    throw std::invalid_argument("unknown check '" + c + "'");
}

namespace detail {

inline CellRecord make_cell(std::string check, Interval domain, std::vector<double> params, Relation rel, double threshold,
                            const LambdaGrid* grid = nullptr, std::optional<ZetaChoice> zeta = std::nullopt, int pieces = 0)
{
    CellRecord cell;
    cell.check = std::move(check);
    cell.domain = domain;
    cell.params = std::move(params);
    cell.relation = rel;
    cell.threshold = threshold;
    cell.zeta = zeta;
    cell.pieces = pieces;
    cell.bound = evaluate_cell(cell, grid);
    cell.ok = holds(cell.bound, rel, threshold);
    return cell;
}

inline void finish_cover(Certificate& cert)
{
    cert.global_bound = -std::numeric_limits<double>::infinity();
    cert.verified = !cert.cells.empty();
    for (const auto& c : cert.cells) {
        cert.global_bound = std::max(cert.global_bound, c.bound);
        if (!c.ok) {
            cert.verified = false;
            if (!cert.failure) cert.failure = c.check + " fails on " + iv::to_string(c.domain);
        }
    }
}

inline void finish_collection(Certificate& cert)
{
    cert.global_bound = -std::numeric_limits<double>::infinity();
    cert.verified = !cert.cells.empty();
    for (const auto& c : cert.cells) {
        const double margin = is_upper(c.relation) ? c.bound - c.threshold : c.threshold - c.bound;
        cert.global_bound = std::max(cert.global_bound, margin);
        if (!c.ok) {
            cert.verified = false;
            if (!cert.failure) cert.failure = c.check + " fails on " + iv::to_string(c.domain);
        }
    }
}

} // namespace detail

// True when the cells' domains, sorted, cover `range` without gaps.
inline bool cover_is_gap_free(std::vector<Interval> cells, const Interval& range)
{
    if (cells.empty()) return false;
    std::sort(cells.begin(), cells.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    if (cells.front().lo > range.lo) return false;
    double reach = cells.front().hi;
    for (std::size_t i = 1; i < cells.size(); ++i) {
        if (cells[i].lo > reach) return false;
        reach = std::max(reach, cells[i].hi);
    }
    return reach >= range.hi;
}

inline std::vector<Interval> domains(const Certificate& cert)
{
    std::vector<Interval> out;
    for (const auto& c : cert.cells) out.push_back(c.domain);
    return out;
}

// ---- s_k covers ----

inline constexpr std::size_t default_cell_budget = 100'000;
inline constexpr double s_k_right_end = 0.2743;

// Greedy cover of `range` by cells [a, b] with certified sup s_k < target:
// each cell is grown as far as the bound allows, found by doubling then
// bisection on its right end.
inline Certificate certify_s_k_cover(int k, Interval range, double target, std::size_t budget = default_cell_budget)
{
    Certificate cert;
    cert.claim_id = "s_k-cover";
    cert.k = k;
    cert.target = target;
    cert.range = range;
    auto ok = [&](double a, double b) { return interval_s_k(k, Interval(a, b)).hi < target; };
    double a = range.lo;
    double w = (range.hi - range.lo) / 64.0;
    while (a < range.hi) {
        if (cert.cells.size() >= budget) {
            cert.failure = "cell budget exhausted at alpha = " + std::to_string(a);
            break;
        }
        double b = std::min(a + w, range.hi);
        if (ok(a, b)) {
            while (b < range.hi && ok(a, std::min(a + 2.0 * (b - a), range.hi))) b = std::min(a + 2.0 * (b - a), range.hi);
        } else {
            while (!ok(a, b) && b - a > 1e-14) b = a + 0.5 * (b - a);
        }
        if (!ok(a, b)) {
            cert.cells.push_back(detail::make_cell("s_k", Interval(a, b), {static_cast<double>(k)}, Relation::less, target));
            cert.failure = "no certifiable cell starting at alpha = " + std::to_string(a);
            break;
        }
        double hi = std::min(a + 2.0 * (b - a), range.hi);
        if (hi > b && !ok(a, hi)) {
            double good = b;
            for (int it = 0; it < 40; ++it) {
                const double mid = 0.5 * (good + hi);
                if (ok(a, mid)) good = mid;
                else hi = mid;
            }
            b = good;
        } else if (hi > b) {
            b = hi;
        }
        cert.cells.push_back(detail::make_cell("s_k", Interval(a, b), {static_cast<double>(k)}, Relation::less, target));
        w = b - a;
        a = b;
    }
    detail::finish_cover(cert);
    if (cert.failure) cert.verified = false;
    cert.verified = cert.verified && cover_is_gap_free(domains(cert), range);
    return cert;
}

// Default targets: the bounds stated for k = 4, 5, 6; plain negativity otherwise.
inline double default_amed_target(int k)
{
    switch (k) {
    case 4: return -1e-5;
    case 5: return -0.005;
    case 6: return -0.03;
    default: return 0.0;
    }
}

// s_k < target on [0.99 alpha_k, 0.2743]. The left end is 0.99 alpha_k rounded
// down to four decimals; an extra cell certifies that it really lies below.
inline Certificate certify_amed(int k, std::optional<double> target = std::nullopt)
{
    if (k < 4) throw std::invalid_argument("certify_amed: k must be >= 4");
    const double t = target.value_or(default_amed_target(k));
    const double left = std::floor(0.99 * thresholds::alpha_k(k) * 1e4) / 1e4;
    const Interval range(Interval::around(left).lo, Interval::around(s_k_right_end).hi);
    Certificate cert = certify_s_k_cover(k, range, t);
    cert.claim_id = "amed";
    const auto guard = detail::make_cell("scaled_alpha_k_lower", Interval::point(0.99), {static_cast<double>(k), 0.99},
                                         Relation::greater, range.lo);
    if (!guard.ok) {
        cert.verified = false;
        cert.failure = "0.99 alpha_k is not above the cover's left end";
    }
    // The guard is kept out of `cells` so that the cover stays a pure s_k cover.
    return cert;
}

// s_k < target on consecutive cells between the given decimal split points.
inline Certificate certify_s_k_splits(int k, const std::vector<double>& splits, double target)
{
    if (splits.size() < 2) throw std::invalid_argument("certify_s_k_splits: need at least two split points");
    Certificate cert;
    cert.claim_id = "amed-split";
    cert.k = k;
    cert.target = target;
    cert.range = Interval(Interval::around(splits.front()).lo, Interval::around(splits.back()).hi);
    for (std::size_t i = 0; i + 1 < splits.size(); ++i) {
        const Interval cell(Interval::around(splits[i]).lo, Interval::around(splits[i + 1]).hi);
        cert.cells.push_back(detail::make_cell("s_k", cell, {static_cast<double>(k)}, Relation::less, target));
    }
    detail::finish_cover(cert);
    cert.verified = cert.verified && cover_is_gap_free(domains(cert), *cert.range);
    return cert;
}

// Constants of the induction step over k >= 7 together with its first
// instance: s_7 < -0.1 on [1/7, 1/6], and 1/6 < 0.99 alpha_6.
inline Certificate certify_amed_induction()
{
    Certificate cert;
    cert.claim_id = "amed-induction";
    cert.k = 7;
    auto& cells = cert.cells;
    cells.push_back(detail::make_cell("entropy_upper", Interval(iv::down(1.0 / 6.0), iv::up(1.0 / 6.0)), {}, Relation::less, 0.451));
    cells.push_back(detail::make_cell("log_half_exp_upper", Interval::point(2.0), {}, Relation::less, -0.566));
    cells.push_back(detail::make_cell("s_k", Interval(iv::down(1.0 / 7.0), iv::up(1.0 / 6.0)), {7.0}, Relation::less, -0.1));
    cells.push_back(detail::make_cell("scaled_alpha_k_lower", Interval::point(0.99), {6.0, 0.99}, Relation::greater, iv::up(1.0 / 6.0)));
    detail::finish_collection(cert);
    return cert;
}

// ---- k = 3 zeta grid ----

inline constexpr double k3_target = -0.002;
inline constexpr double k3_zeta_step = 0.001;
inline constexpr int k3_first_cell = 99;   // alpha = 0.099
inline constexpr int k3_last_cell = 399;   // alpha = 0.399

// Alpha cell [i/1000, (i+1)/1000], widened to enclose the decimal ends.
inline Interval k3_alpha_cell(int i)
{
    return {Interval::around(i / 1000.0).lo, Interval::around((i + 1) / 1000.0).hi};
}

// Smallest piece count in {8, 16, ..., 256} whose bound meets the target.
inline CellRecord certify_k3_cell(const LambdaGrid& grid, const Interval& alpha, const ZetaChoice& z, double target = k3_target)
{
    CellRecord cell;
    for (int pieces = 8; pieces <= LambdaGrid::max_pieces; pieces *= 2) {
        cell = detail::make_cell("H_k", alpha, {3.0}, Relation::less, target, &grid, z, pieces);
        if (cell.ok) break;
    }
    return cell;
}

// Zeta on the 0.001 grid minimizing the point value H_3(alpha, zeta; c) at
// the left end of the alpha cell, found by a pattern search on the grid.
inline ZetaChoice k3_point_zeta(double alpha, double c)
{
    const double lam = thresholds::lambda_of(3.0 * c);
    auto value = [&](long u, long v) {
        if (u < 1 || v < 1) return std::numeric_limits<double>::infinity();
        return thresholds::H_k_at(alpha, {u * k3_zeta_step, v * k3_zeta_step}, c, 3, lam);
    };
    long i1 = std::lround(alpha / k3_zeta_step), i2 = std::lround((1.0 - alpha) / k3_zeta_step);
    double best = value(i1, i2);
    for (long step = 64; step >= 1; step /= 2) {
        for (bool moved = true; moved;) {
            moved = false;
            for (int dx = -1; dx <= 1; ++dx) {
                for (int dy = -1; dy <= 1; ++dy) {
                    if (!dx && !dy) continue;
                    const double v = value(i1 + dx * step, i2 + dy * step);
                    if (v < best) {
                        best = v;
                        i1 += dx * step;
                        i2 += dy * step;
                        moved = true;
                    }
                }
            }
        }
    }
    return {i1 * k3_zeta_step, i2 * k3_zeta_step};
}

// Zeta on the 0.001 grid minimizing the certified bound over the whole cell,
// starting from k3_point_zeta. Used when the point minimizer does not certify.
inline ZetaChoice search_k3_zeta(const LambdaGrid& grid, const Interval& alpha)
{
    const ZetaChoice start = k3_point_zeta(alpha.lo, grid.c_range().mid());
    long i1 = std::lround(start.zeta1 / k3_zeta_step);
    long i2 = std::lround(start.zeta2 / k3_zeta_step);
    auto bound = [&](long u, long v) {
        if (u < 1 || v < 1) return std::numeric_limits<double>::infinity();
        return H_k_upper(grid, alpha, {u * k3_zeta_step, v * k3_zeta_step}, 16);
    };
    double best = bound(i1, i2);
    for (long step = 8; step >= 1; step /= 2) {
        for (bool moved = true; moved;) {
            moved = false;
            for (int dx = -1; dx <= 1; ++dx) {
                for (int dy = -1; dy <= 1; ++dy) {
                    if (!dx && !dy) continue;
                    const double v = bound(i1 + dx * step, i2 + dy * step);
                    if (v < best) {
                        best = v;
                        i1 += dx * step;
                        i2 += dy * step;
                        moved = true;
                    }
                }
            }
        }
    }
    return {i1 * k3_zeta_step, i2 * k3_zeta_step};
}

inline Certificate certify_k3_grid(Interval c_range = Interval(0.999, 1.001), unsigned workers = 1)
{
    if (c_range.lo < 0.99 || c_range.hi > 1.01 || c_range.width() > 0.02 + 1e-12 || c_range.lo > c_range.hi) {
        throw std::invalid_argument("certify_k3_grid: c_range must lie in [0.99, 1.01] with width <= 0.02");
    }
    const Interval c_enclosed(Interval::around(c_range.lo).lo, Interval::around(c_range.hi).hi);
    const LambdaGrid grid(3, c_enclosed);
    Certificate cert;
    cert.claim_id = "k3-grid";
    cert.k = 3;
    cert.c_range = c_enclosed;
    cert.target = k3_target;
    cert.range = Interval(k3_alpha_cell(k3_first_cell).lo, k3_alpha_cell(k3_last_cell).hi);
    const std::size_t count = static_cast<std::size_t>(k3_last_cell - k3_first_cell + 1);
    cert.cells = parallel_map(count, workers, [&](std::size_t j) {
        const int i = k3_first_cell + static_cast<int>(j);
        const Interval alpha = k3_alpha_cell(i);
        CellRecord cell = certify_k3_cell(grid, alpha, k3_point_zeta(i / 1000.0, 1.0));
        return cell.ok ? cell : certify_k3_cell(grid, alpha, search_k3_zeta(grid, alpha));
    });
    detail::finish_cover(cert);
    cert.verified = cert.verified && cover_is_gap_free(domains(cert), *cert.range);
    return cert;
}

// ---- constants behind the alpha in (0.2743, 1/2] case ----

inline constexpr double x0 = 0.4514;

inline Certificate certify_alarge_constants()
{
    Certificate cert;
    cert.claim_id = "alarge-constants";
    cert.k = 4;
    auto& cells = cert.cells;
    using detail::make_cell;
    const Interval x0i = Interval::around(x0);
    cells.push_back(make_cell("R_upper", x0i, {2.7694}, Relation::less, 0.5));
    cells.push_back(make_cell("R_upper", x0i, {3.5}, Relation::less, 0.4));
    cells.push_back(make_cell("R_upper", Interval::around(0.2), {2.149}, Relation::less_equal, 0.495));
    cells.push_back(make_cell("psi_upper", Interval::around(2.7694), {}, Relation::less_equal, 3.3992));
    cells.push_back(make_cell("psi_lower", Interval::around(2.7694), {}, Relation::greater, 3.39));
    cells.push_back(make_cell("psi_upper", Interval::around(2.149), {}, Relation::less, 3.0));
    cells.push_back(make_cell("log4_lower", x0i, {}, Relation::greater, 0.59));
    cells.push_back(make_cell("entropy_use_upper", x0i, {}, Relation::less, -0.0011));

    // The expression bounded at x0 is increasing on [0, x0].
    for (int i = 0; i * 0.01 < x0; ++i) {
        const Interval cell(i * 0.01, std::min((i + 1) * 0.01, x0i.hi));
        cells.push_back(make_cell("entropy_use_slope_lower", cell, {}, Relation::greater_equal, 0.0));
    }
    // H(1/2 - x/2) <= ln(4/(x^2+2)): the gap D vanishes with its slope at 0
    // and D'' <= 0 on [0, 0.99]; the last stretch is checked directly.
    for (int i = 0; i < 99; ++i) {
        cells.push_back(make_cell("entropy_gap_curvature_upper", Interval(i * 0.01, (i + 1) * 0.01), {},
                                  Relation::less_equal, 0.0));
    }
    for (int i = 990; i < 1000; ++i) {
        cells.push_back(make_cell("entropy_gap_upper", Interval(i * 0.001, std::min(1.0, (i + 1) * 0.001)), {},
                                  Relation::less, 0.0));
    }
    // c = 1, k = 4: H_k <= -x^2/15 on 0.002-wide cells of [0, x0].
    for (int i = 0; i * 0.002 < x0; ++i) {
        const Interval cell(i * 0.002, std::min((i + 1) * 0.002, x0i.hi));
        cells.push_back(make_cell("keycase_upper", cell, {4.0}, Relation::less_equal, 1e-12));
    }
    detail::finish_collection(cert);
    return cert;
}

// ---- monotonicity ----

namespace detail {

inline void adaptive_lower_cover(std::vector<CellRecord>& out, const std::string& check, Interval range, int depth = 0)
{
    CellRecord cell = make_cell(check, range, {}, Relation::greater_equal, -1e-15);
    if (cell.ok || depth > 40) {
        out.push_back(std::move(cell));
        return;
    }
    const double mid = range.mid();
    adaptive_lower_cover(out, check, Interval(range.lo, mid), depth + 1);
    adaptive_lower_cover(out, check, Interval(mid, range.hi), depth + 1);
}

} // namespace detail

inline Certificate certify_monotonicity()
{
    Certificate cert;
    cert.claim_id = "monotonicity";
    struct Plan {
        const char* check;
        double end;
    };
    for (const Plan& p : {Plan{"psi_numerator_lower", 20.0}, Plan{"cubic_exp_lower", 20.0}, Plan{"cosh_gap_lower", 10.0}}) {
        detail::adaptive_lower_cover(cert.cells, p.check, Interval(0.0, 1.0));
        for (double a = 1.0; a < p.end; a += 1.0) detail::adaptive_lower_cover(cert.cells, p.check, Interval(a, a + 1.0));
    }
    detail::finish_collection(cert);
    return cert;
}

// ---- replay and serialization ----

// Recomputes every stored bound and re-checks relations and cover shape.
inline bool replay(const Certificate& cert)
{
    std::optional<LambdaGrid> grid;
    bool ok = !cert.cells.empty();
    for (const auto& cell : cert.cells) {
        if (cell.check == "H_k" && !grid) grid.emplace(cert.k, cert.c_range);
        const double b = evaluate_cell(cell, grid ? &*grid : nullptr);
        ok = ok && holds(b, cell.relation, cell.threshold);
    }
    if (cert.range) ok = ok && cover_is_gap_free(domains(cert), *cert.range);
    return ok;
}

inline nlohmann::json interval_json(const Interval& a) { return nlohmann::json::array({a.lo, a.hi}); }
inline Interval interval_from_json(const nlohmann::json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

inline nlohmann::json to_json(const Certificate& cert)
{
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : cert.cells) {
        nlohmann::json j{{"check", c.check},       {"interval", interval_json(c.domain)},
                         {"params", c.params},     {"pieces", c.pieces},
                         {"bound", c.bound},       {"relation", to_string(c.relation)},
                         {"threshold", c.threshold}, {"ok", c.ok}};
        j["zeta"] = c.zeta ? nlohmann::json::array({c.zeta->zeta1, c.zeta->zeta2}) : nlohmann::json(nullptr);
        cells.push_back(std::move(j));
    }
    nlohmann::json out{{"claim_id", cert.claim_id}, {"k", cert.k},
                       {"c_range", interval_json(cert.c_range)}, {"target", cert.target},
                       {"cells", cells},         {"cell_count", cert.cells.size()},
                       {"global_bound", cert.global_bound}, {"verified", cert.verified}};
    out["range"] = cert.range ? interval_json(*cert.range) : nlohmann::json(nullptr);
    out["failure"] = cert.failure ? nlohmann::json(*cert.failure) : nlohmann::json(nullptr);
    return out;
}

inline Certificate certificate_from_json(const nlohmann::json& j)
{
    Certificate cert;
    cert.claim_id = j.at("claim_id").get<std::string>();
    cert.k = j.at("k").get<int>();
    cert.c_range = interval_from_json(j.at("c_range"));
    cert.target = j.at("target").get<double>();
    if (!j.at("range").is_null()) cert.range = interval_from_json(j.at("range"));
    for (const auto& c : j.at("cells")) {
        CellRecord cell;
        cell.check = c.at("check").get<std::string>();
        cell.domain = interval_from_json(c.at("interval"));
        cell.params = c.at("params").get<std::vector<double>>();
        cell.pieces = c.at("pieces").get<int>();
        cell.bound = c.at("bound").get<double>();
        cell.relation = relation_from_string(c.at("relation").get<std::string>());
        cell.threshold = c.at("threshold").get<double>();
        cell.ok = c.at("ok").get<bool>();
        if (!c.at("zeta").is_null()) cell.zeta = ZetaChoice{c.at("zeta").at(0).get<double>(), c.at("zeta").at(1).get<double>()};
        cert.cells.push_back(std::move(cell));
    }
    cert.global_bound = j.at("global_bound").get<double>();
    cert.verified = j.at("verified").get<bool>();
    if (j.contains("failure") && !j.at("failure").is_null()) cert.failure = j.at("failure").get<std::string>();
    return cert;
}

} // namespace xorlab::cert
