#pragma once

// Outward-rounded interval arithmetic. Every operation computes in round-to-
// nearest and then widens each endpoint by two ulps, which encloses the exact
// image as long as the libm functions used are accurate to within one ulp.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

namespace xorlab::iv {

inline double down(double x) noexcept
{
    constexpr double ninf = -std::numeric_limits<double>::infinity();
    return std::nextafter(std::nextafter(x, ninf), ninf);
}
inline double up(double x) noexcept
{
    constexpr double pinf = std::numeric_limits<double>::infinity();
    return std::nextafter(std::nextafter(x, pinf), pinf);
}

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    Interval() = default;
    constexpr Interval(double a, double b) : lo(a), hi(b) {}

    // Exactly the double x.
    static constexpr Interval point(double x) { return {x, x}; }
    // Encloses a decimal constant whose nearest double is x.
    static Interval around(double x) { return {down(x), up(x)}; }

    double width() const noexcept { return hi - lo; }
    double mid() const noexcept { return 0.5 * (lo + hi); }
    bool contains(double x) const noexcept { return lo <= x && x <= hi; }
    bool subset_of(const Interval& o) const noexcept { return o.lo <= lo && hi <= o.hi; }

    friend bool operator==(const Interval&, const Interval&) = default;
};

inline Interval widen(double lo, double hi) { return {down(lo), up(hi)}; }

namespace detail {

// When both operands of a product or quotient have a known sign, so does the
// result; stops an exact 0 endpoint from being widened across zero.
inline Interval keep_sign(Interval r, const Interval& a, const Interval& b)
{
    const int sa = a.lo >= 0.0 ? 1 : (a.hi <= 0.0 ? -1 : 0);
    const int sb = b.lo >= 0.0 ? 1 : (b.hi <= 0.0 ? -1 : 0);
    if (sa * sb > 0) r.lo = std::max(0.0, r.lo);
    if (sa * sb < 0) r.hi = std::min(0.0, r.hi);
    return r;
}

} // namespace detail

inline Interval hull(const Interval& a, const Interval& b) { return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)}; }

inline Interval operator-(const Interval& a) { return {-a.hi, -a.lo}; }
inline Interval operator+(const Interval& a, const Interval& b) { return widen(a.lo + b.lo, a.hi + b.hi); }
inline Interval operator-(const Interval& a, const Interval& b) { return widen(a.lo - b.hi, a.hi - b.lo); }

inline Interval operator*(const Interval& a, const Interval& b)
{
    const double p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
    return detail::keep_sign(widen(*std::min_element(p, p + 4), *std::max_element(p, p + 4)), a, b);
}

inline Interval operator/(const Interval& a, const Interval& b)
{
    if (b.lo <= 0.0 && b.hi >= 0.0) throw std::domain_error("interval division by an interval containing 0");
    const double q[4] = {a.lo / b.lo, a.lo / b.hi, a.hi / b.lo, a.hi / b.hi};
    return detail::keep_sign(widen(*std::min_element(q, q + 4), *std::max_element(q, q + 4)), a, b);
}

inline Interval operator+(const Interval& a, double b) { return a + Interval::point(b); }
inline Interval operator+(double a, const Interval& b) { return Interval::point(a) + b; }
inline Interval operator-(const Interval& a, double b) { return a - Interval::point(b); }
inline Interval operator-(double a, const Interval& b) { return Interval::point(a) - b; }
inline Interval operator*(double a, const Interval& b) { return Interval::point(a) * b; }
inline Interval operator*(const Interval& a, double b) { return a * Interval::point(b); }
inline Interval operator/(const Interval& a, double b) { return a / Interval::point(b); }
inline Interval operator/(double a, const Interval& b) { return Interval::point(a) / b; }

inline Interval sqr(const Interval& a)
{
    const double l = std::fabs(a.lo), h = std::fabs(a.hi);
    const double mx = std::max(l, h);
    const double mn = (a.lo <= 0.0 && a.hi >= 0.0) ? 0.0 : std::min(l, h);
    return {a.lo <= 0.0 && a.hi >= 0.0 ? 0.0 : down(mn * mn), up(mx * mx)};
}

inline Interval exp(const Interval& a) { return {std::max(0.0, down(std::exp(a.lo))), up(std::exp(a.hi))}; }
inline Interval expm1(const Interval& a) { return widen(std::expm1(a.lo), std::expm1(a.hi)); }

inline Interval log(const Interval& a)
{
    if (!(a.lo > 0.0)) throw std::domain_error("interval log of non-positive argument");
    return widen(std::log(a.lo), std::log(a.hi));
}

inline Interval log1p(const Interval& a)
{
    if (!(a.lo > -1.0)) throw std::domain_error("interval log1p of argument <= -1");
    return widen(std::log1p(a.lo), std::log1p(a.hi));
}

inline Interval sqrt(const Interval& a)
{
    if (a.lo < 0.0) throw std::domain_error("interval sqrt of negative argument");
    return {std::max(0.0, down(std::sqrt(a.lo))), up(std::sqrt(a.hi))};
}

// cosh is decreasing on (-inf, 0] and increasing on [0, inf).
inline Interval cosh(const Interval& a)
{
    const double top = std::max(std::cosh(a.lo), std::cosh(a.hi));
    const double bottom = (a.lo <= 0.0 && a.hi >= 0.0) ? 1.0 : std::min(std::cosh(a.lo), std::cosh(a.hi));
    return {std::max(1.0, down(bottom)), up(top)};
}

// ---- special functions ----

namespace detail {

// sum_{j=2}^{J} x^j / j! plus a rigorous bound on the tail, for |x| <= 0.5.
inline Interval f_series_point(double x)
{
    constexpr int terms = 24;
    const Interval xi = Interval::point(x);
    Interval acc = Interval::point(0.0);
    Interval power = sqr(xi);  // x^j
    Interval fact = Interval::point(2.0);
    for (int j = 2; j <= terms; ++j) {
        acc = acc + power / fact;
        power = power * xi;
        fact = fact * static_cast<double>(j + 1);
    }
    // |tail| <= |x|^{J+1}/(J+1)! * 1/(1 - |x|/(J+2))
    const double ax = std::fabs(x);
    const double tail = up(up(std::pow(ax, terms + 1)) / fact.lo / (1.0 - ax / (terms + 2)) * 1.0001);
    return acc + Interval(-tail, tail);
}

} // namespace detail

// Enclosure of f(x) = e^x - 1 - x at a double x.
inline Interval f_point(double x)
{
    if (std::fabs(x) <= 0.5) {
        Interval r = detail::f_series_point(x);
        return {std::max(0.0, r.lo), r.hi};
    }
    Interval r = expm1(Interval::point(x)) - x;
    return {std::max(0.0, r.lo), r.hi};
}

// Range of f over a: decreasing for x < 0, increasing for x > 0.
inline Interval f(const Interval& a)
{
    if (a.lo >= 0.0) return {f_point(a.lo).lo, f_point(a.hi).hi};
    if (a.hi <= 0.0) return {f_point(a.hi).lo, f_point(a.lo).hi};
    return {0.0, std::max(f_point(a.lo).hi, f_point(a.hi).hi)};
}

// Enclosure of psi(x) = x f'(x) / f(x) at a double x > 0.
inline Interval psi_point(double x)
{
    if (!(x > 0.0)) throw std::domain_error("psi_point: x must be > 0");
    const Interval xi = Interval::point(x);
    return xi * expm1(xi) / f_point(x);
}

// Enclosure of x ln x at a double x in [0, 1].
inline Interval xlogx_point(double x)
{
    if (x == 0.0) return Interval::point(0.0);
    return Interval::point(x) * log(Interval::point(x));
}

// Enclosure of H(x) at a double x in [0, 1].
inline Interval entropy_point(double x)
{
    if (x < 0.0 || x > 1.0) throw std::domain_error("entropy_point: x outside [0, 1]");
    if (x == 0.0 || x == 1.0) return Interval::point(0.0);
    const Interval xi = Interval::point(x);
    const Interval first = xi * log(xi);
    const Interval second = (1.0 - xi) * log1p(-xi);
    const Interval r = -(first + second);
    return {std::max(0.0, r.lo), r.hi};
}

// Range of H over a subset of [0, 1]; increasing below 1/2, decreasing above.
inline Interval entropy(const Interval& a)
{
    if (a.lo < 0.0 || a.hi > 1.0) throw std::domain_error("interval entropy: argument outside [0, 1]");
    const Interval l = entropy_point(a.lo), h = entropy_point(a.hi);
    if (a.hi <= 0.5) return {l.lo, h.hi};
    if (a.lo >= 0.5) return {h.lo, l.hi};
    return {std::min(l.lo, h.lo), up(std::log(2.0))};
}

inline std::string to_string(const Interval& a)
{
    char buf[96];
    std::snprintf(buf, sizeof buf, "[%.17g, %.17g]", a.lo, a.hi);
    return buf;
}

} // namespace xorlab::iv
