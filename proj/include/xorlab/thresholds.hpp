#pragma once

// Scalar formulas for random k-XORSAT: the truncated-Poisson tilt
// lambda = psi^{-1}(ck), collision rate gamma, the critical-set exponent
// H_k(alpha, zeta; c), 2-core density g_k and its thresholds, plus exact
// expected critical-set counts for tiny chip-model instances.

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "xorlab/chip_count.hpp"
#include "xorlab/gf2.hpp"

namespace xorlab::thresholds {

// f(x) = e^x - 1 - x = sum_{j>=2} x^j / j!
inline double f(double x) noexcept
{
    if (std::fabs(x) < 0.5) {
        // Horner on the series; 24 terms exhaust double precision for |x| < 0.5.
        double acc = 0.0;
        for (int j = 25; j >= 2; --j) {
            double inv_fact = 1.0;
            for (int i = 2; i <= j; ++i) inv_fact /= i;
            acc = acc * x + inv_fact;
        }
        // acc currently holds sum_{j>=2} x^{j-2}/j!.
        return acc * x * x;
    }
    return std::expm1(x) - x;
}

inline double f_prime(double x) noexcept { return std::expm1(x); }
inline double f_second(double x) noexcept { return std::exp(x); }

// psi(x) = x f'(x) / f(x), with psi(0) = 2.
inline double psi(double x)
{
    if (!(x >= 0.0)) throw std::domain_error("psi: argument must be >= 0");
    if (x == 0.0) return 2.0;
    if (x > 30.0) {
        const double t = std::exp(-x);
        return x * (1.0 - t) / (1.0 - (1.0 + x) * t);
    }
    return x * std::expm1(x) / f(x);
}

inline constexpr double root_tolerance = 1e-12;

// Unique positive root of psi(x) = d (d > 2), by bisection.
inline double lambda_of(double d)
{
    if (!(d > 2.0)) throw std::domain_error("lambda_of: requires d > 2, got " + std::to_string(d));
    double lo = 1e-9;
    double hi = 1.0;
    while (psi(hi) <= d) hi *= 2.0;
    for (int it = 0; it < 400 && hi - lo > root_tolerance; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (psi(mid) < d) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Variance of the truncated Poisson Z(lambda) conditioned on Z >= 2.
inline double var_Z(double lambda)
{
    if (!(lambda > 0.0)) throw std::domain_error("var_Z: lambda must be > 0");
    if (lambda < 1.0) {
        // Z = 2 + Y with P(Y = i) proportional to lambda^i / (i + 2)!; summing
        // in Y avoids the cancellation of the closed form near zero.
        double s0 = 0.0, s1 = 0.0, s2 = 0.0;
        double term = 0.5;
        for (int i = 0; i < 60; ++i) {
            s0 += term;
            s1 += i * term;
            s2 += static_cast<double>(i) * i * term;
            term *= lambda / (i + 3);
        }
        const double mean = s1 / s0;
        return s2 / s0 - mean * mean;
    }
    const double t = std::exp(-lambda);
    const double den = 1.0 - (1.0 + lambda) * t;  // f(lambda) e^{-lambda}
    const double second = lambda * lambda / den;  // lambda^2 f''/f
    const double mean = lambda * (1.0 - t) / den; // lambda f'/f
    return second + mean - mean * mean;
}

// Limiting mean number of chip collisions in the configuration model.
inline double gamma(int k, double lambda)
{
    if (k < 3) throw std::invalid_argument("gamma: k must be >= 3");
    if (!(lambda > 0.0)) throw std::domain_error("gamma: lambda must be > 0");
    return 0.5 * (k - 1) * lambda / (-std::expm1(-lambda));
}

inline double alpha_k(int k)
{
    if (k < 3) throw std::invalid_argument("alpha_k: k must be >= 3");
    return std::numbers::e * std::pow(static_cast<double>(k), -static_cast<double>(k) / (k - 2));
}

namespace detail {
inline double xlogx(double x) noexcept { return x == 0.0 ? 0.0 : x * std::log(x); }
// a ln(a / z) with the a = 0 limit.
inline double xlog_ratio(double a, double z) noexcept { return a == 0.0 ? 0.0 : a * std::log(a / z); }
} // namespace detail

inline double entropy(double alpha)
{
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::domain_error("entropy: alpha outside [0, 1]");
    return -detail::xlogx(alpha) - detail::xlogx(1.0 - alpha);
}

struct ZetaChoice {
    double zeta1 = 0.0;
    double zeta2 = 0.0;

    friend bool operator==(const ZetaChoice&, const ZetaChoice&) = default;
};

// H_k(alpha, zeta; c) with lambda = lambda(ck) supplied by the caller.
inline double H_k_at(double alpha, ZetaChoice zeta, double c, int k, double lambda)
{
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::domain_error("H_k: alpha outside [0, 1]");
    if (!(zeta.zeta1 > 0.0 && zeta.zeta2 > 0.0)) throw std::domain_error("H_k: zeta components must be > 0");
    if (!(c * k > 2.0)) throw std::domain_error("H_k: requires ck > 2");
    const double ck = c * k;
    const double abar = 1.0 - alpha;
    const double fl = f(lambda);
    const double num = f(lambda * (zeta.zeta2 + zeta.zeta1)) + f(lambda * (zeta.zeta2 - zeta.zeta1));
    return c * entropy(alpha) + ck * detail::xlog_ratio(alpha, zeta.zeta1) +
           ck * detail::xlog_ratio(abar, zeta.zeta2) + std::log(num / (2.0 * fl));
}

inline double H_k(double alpha, ZetaChoice zeta, double c, int k)
{
    if (!(c * k > 2.0)) throw std::domain_error("H_k: requires ck > 2");
    return H_k_at(alpha, zeta, c, k, lambda_of(c * k));
}

// Closed form of H_k at zeta = (alpha, 1 - alpha).
inline double H_k_symmetric(double alpha, double c, int k)
{
    if (!(c * k > 2.0)) throw std::domain_error("H_k_symmetric: requires ck > 2");
    const double lambda = lambda_of(c * k);
    return c * entropy(alpha) + std::log(0.5 + 0.5 * f(lambda * (1.0 - 2.0 * alpha)) / f(lambda));
}

// s_k(alpha) = H(alpha) + ln(1/2 + exp(-2 k alpha)/2)
inline double s_k(int k, double alpha)
{
    return entropy(alpha) + std::log1p(0.5 * std::expm1(-2.0 * k * alpha));
}

inline double R0(double lambda)
{
    if (!(lambda > 0.0)) throw std::domain_error("R0: lambda must be > 0");
    return lambda * lambda / (2.0 * f(lambda));
}

// R(lambda, x) = f(lambda x) / (x^2 f(lambda)); the x -> 0 limit is R0.
inline double R(double lambda, double x)
{
    if (!(lambda > 0.0)) throw std::domain_error("R: lambda must be > 0");
    if (!(x > 0.0 && x <= 1.0)) throw std::domain_error("R: x must lie in (0, 1]; use R0 for the limit");
    return f(lambda * x) / (x * x * f(lambda));
}

// 2-core density function g_k(x) = x / (k (1 - e^{-x})^{k-1}).
inline double g_k(int k, double x)
{
    if (k < 2) throw std::invalid_argument("g_k: k must be >= 2");
    if (!(x > 0.0)) throw std::domain_error("g_k: x must be > 0");
    return x / (k * std::pow(-std::expm1(-x), k - 1));
}

struct GMinimum {
    double argmin = 0.0;
    double value = 0.0;
};

// Minimum of the convex function g_k by golden-section search.
inline GMinimum g_minimum(int k)
{
    if (k < 3) throw std::invalid_argument("g_minimum: k must be >= 3");
    double hi = 1.0;
    while (g_k(k, 2.0 * hi) < g_k(k, hi)) hi *= 2.0;
    hi *= 2.0;
    double lo = 1e-6;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = hi - inv_phi * (hi - lo);
    double b = lo + inv_phi * (hi - lo);
    double ga = g_k(k, a);
    double gb = g_k(k, b);
    for (int it = 0; it < 300 && hi - lo > root_tolerance; ++it) {
        if (ga < gb) {
            hi = b;
            b = a;
            gb = ga;
            a = hi - inv_phi * (hi - lo);
            ga = g_k(k, a);
        } else {
            lo = a;
            a = b;
            ga = gb;
            b = lo + inv_phi * (hi - lo);
            gb = g_k(k, b);
        }
    }
    const double x = 0.5 * (lo + hi);
    return {x, g_k(k, x)};
}

// Density below which the 2-core is empty.
inline double c_hat(int k) { return g_minimum(k).value; }

// Larger root of g_k(mu) = c; empty when c < c_hat(k) (no core).
inline std::optional<double> mu_of(int k, double c)
{
    const GMinimum gm = g_minimum(k);
    if (c < gm.value) return std::nullopt;
    double lo = gm.argmin;
    double hi = std::max(1.0, 2.0 * lo);
    while (g_k(k, hi) <= c) hi *= 2.0;
    for (int it = 0; it < 400 && hi - lo > root_tolerance; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (g_k(k, mid) < c) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Satisfiability threshold of unconstrained k-XORSAT: g_k(lambda(k)).
inline double c_star(int k)
{
    if (k < 3) throw std::invalid_argument("c_star: k must be >= 3");
    return g_k(k, lambda_of(static_cast<double>(k)));
}

struct CoreFractions {
    double vars = 0.0; // N / n
    double eqs = 0.0;  // M / n
};

inline CoreFractions core_fractions_at_mu(int k, double mu)
{
    const double t = std::exp(-mu);
    return {f(mu) * t, mu * (-std::expm1(-mu)) / k};
}

// Leading-order 2-core order and size per variable; (0, 0) when there is no core.
inline CoreFractions core_sizes(int k, double c)
{
    const auto mu = mu_of(k, c);
    if (!mu) return {};
    return core_fractions_at_mu(k, *mu);
}

inline constexpr double default_zeta_delta = 0.05;

// Piecewise zeta used to make H_k negative across alpha in (0, 1).
inline ZetaChoice zeta_choice(int k, double c, double alpha, double delta = default_zeta_delta)
{
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("zeta_choice: alpha must lie in (0, 1)");
    const double small_cut = 0.99 * alpha_k(k);
    auto base = [&](double a) -> ZetaChoice {
        if (a <= small_cut) return {std::sqrt(a / (c * k)), 1.0 - a};
        return {a, 1.0 - a};
    };
    if (alpha <= 0.5) return base(alpha);
    if (alpha >= 1.0 - delta) return {1.0 - delta, delta};
    const ZetaChoice mirror = base(1.0 - alpha);
    return {mirror.zeta2, mirror.zeta1};
}

// log of sqrt(1/zeta2) exp(n H_k(ell/m, zeta; c)), m = round(cn). The
// absolute multiplicative constant of the bound is not included.
inline double bound_EY(int k, double c, std::size_t n, std::size_t ell, ZetaChoice zeta)
{
    const auto m = static_cast<std::size_t>(std::llround(c * static_cast<double>(n)));
    if (ell < 1 || ell > m) throw std::invalid_argument("bound_EY: ell must lie in [1, m]");
    const double alpha = static_cast<double>(ell) / static_cast<double>(m);
    return -0.5 * std::log(zeta.zeta2) + static_cast<double>(n) * H_k(alpha, zeta, c, k);
}

// (k ell)! [z^{k ell}] (cosh z - 1)^nu
inline BigInt exact_a(int k, std::size_t ell, std::size_t nu)
{
    const std::size_t chips = static_cast<std::size_t>(k) * ell;
    if (chips > chips::exact_chip_budget) throw std::invalid_argument("exact_a: k*ell exceeds exact budget");
    chips::PlacementCounter pc(chips);
    return pc.placements(chips, {{chips::ColumnLaw::positive_even, nu}});
}

// (k(m-ell))! [z^{k(m-ell)}] e^{nu z} f(z)^{n-nu}
inline BigInt exact_b(int k, std::size_t m, std::size_t ell, std::size_t nu, std::size_t n)
{
    if (ell > m || nu > n) throw std::invalid_argument("exact_b: requires ell <= m and nu <= n");
    const std::size_t chips = static_cast<std::size_t>(k) * (m - ell);
    if (chips > chips::exact_chip_budget) throw std::invalid_argument("exact_b: k*(m-ell) exceeds exact budget");
    chips::PlacementCounter pc(chips);
    return pc.placements(chips, {{chips::ColumnLaw::any, nu}, {chips::ColumnLaw::at_least_two, n - nu}});
}

// Exact expected number of critical row sets of cardinality ell for a
// uniform chip-model allocation C in C_{m,n}.
inline BigRational exact_EY(int k, std::size_t m, std::size_t n, std::size_t ell)
{
    const std::size_t total = static_cast<std::size_t>(k) * m;
    if (total > chips::exact_chip_budget) throw std::invalid_argument("exact_EY: km exceeds exact budget");
    if (ell < 1 || ell > m) throw std::invalid_argument("exact_EY: ell must lie in [1, m]");
    chips::PlacementCounter pc(std::max<std::size_t>(total, n));
    const BigInt all = pc.placements(total, {{chips::ColumnLaw::at_least_two, n}});
    if (all == 0) throw std::domain_error("exact_EY: C_{m,n} is empty (km < 2n)");

    const std::size_t top = static_cast<std::size_t>(k) * ell;
    const std::size_t bottom = total - top;
    const auto even = pc.single(chips::ColumnLaw::positive_even);
    const auto free_col = pc.single(chips::ColumnLaw::any);
    const auto two_plus = pc.single(chips::ColumnLaw::at_least_two);

    BigInt sum = 0;
    std::vector<BigInt> a_pow(pc.max_chips() + 1, BigInt(0));
    a_pow[0] = 1;
    for (std::size_t nu = 1; nu <= n; ++nu) {
        a_pow = pc.convolve(a_pow, even);
        if (a_pow[top].is_zero()) continue;
        const auto b_ways = pc.convolve(pc.power(free_col, nu), pc.power(two_plus, n - nu));
        sum += pc.binomial(n, nu) * a_pow[top] * b_ways[bottom];
    }
    return BigRational(pc.binomial(m, ell) * sum, all);
}

struct ThresholdReport {
    int k = 3;
    double c = 0.0;
    std::optional<double> lambda;  // psi^{-1}(ck), present when ck > 2
    std::optional<double> gamma;
    double alpha_k = 0.0;
    double c_hat = 0.0;
    std::optional<double> mu;
    double c_star = 0.0;
    std::optional<double> core_frac_vars;
    std::optional<double> core_frac_eqs;
};

// Report for density c, or for c = c_star(k) when c is absent.
inline ThresholdReport make_report(int k, std::optional<double> c = std::nullopt)
{
    ThresholdReport r;
    r.k = k;
    r.c_star = c_star(k);
    r.c = c.value_or(r.c_star);
    if (!(r.c > 0.0)) throw std::domain_error("threshold report: c must be > 0");
    r.alpha_k = alpha_k(k);
    r.c_hat = c_hat(k);
    if (r.c * k > 2.0) {
        r.lambda = lambda_of(r.c * k);
        r.gamma = gamma(k, *r.lambda);
    }
    r.mu = mu_of(k, r.c);
    if (r.mu) {
        const auto fr = core_fractions_at_mu(k, *r.mu);
        r.core_frac_vars = fr.vars;
        r.core_frac_eqs = fr.eqs;
    }
    return r;
}

// Absent optionals serialize as null.
inline nlohmann::json to_json(const ThresholdReport& r)
{
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    return {{"k", r.k},           {"c", r.c},           {"lambda", opt(r.lambda)},
            {"gamma", opt(r.gamma)}, {"alpha_k", r.alpha_k}, {"c_hat", r.c_hat},
            {"mu", opt(r.mu)},    {"c_star", r.c_star}, {"core_frac_vars", opt(r.core_frac_vars)},
            {"core_frac_eqs", opt(r.core_frac_eqs)}};
}

} // namespace xorlab::thresholds
