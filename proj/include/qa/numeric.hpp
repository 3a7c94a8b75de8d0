#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string_view>

namespace qa {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Absolute tolerance for log-convexity checks in the log domain.
inline constexpr double kLogConvexTol = 1e-12;

// Absolute tolerance used when a computed real value is compared against an
// exact integer step boundary (floor/ceil of log-levels, tail-sum thresholds).
inline constexpr double kStepSnapTol = 1e-12;

inline double logaddexp(double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::fabs(a - b)));
}

// Snaps x to the nearest integer when it is within kStepSnapTol of one.
inline double snap_to_integer(double x) {
    const double r = std::round(x);
    if (std::fabs(x - r) <= kStepSnapTol * std::max(1.0, std::fabs(x))) return r;
    return x;
}

// Maximizes a unimodal-in-bracket function by golden-section search.
// The bracket [lo, hi] is shrunk until its width falls below xtol.
template <typename F>
double golden_section_max(F&& f, double lo, double hi, double xtol) {
    static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > xtol) {
        if (fc >= fd) {
            b = d; d = c; fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    const double mid = 0.5 * (a + b);
    return std::max({f(mid), fc, fd});
}

// Dense scan followed by local golden-section refinement; returns the maximum
// of f over [lo, hi] to roughly abs_tol accuracy for piecewise-unimodal f.
template <typename F>
double scan_max(F&& f, double lo, double hi, double step, double xtol) {
    if (hi <= lo) return f(lo);
    const long n = std::max(1L, static_cast<long>(std::ceil((hi - lo) / step)));
    double best = -kInf, best_x = lo;
    for (long i = 0; i <= n; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
        const double v = f(x);
        if (v > best) { best = v; best_x = x; }
    }
    const double h = (hi - lo) / static_cast<double>(n);
    const double a = std::max(lo, best_x - h);
    const double b = std::min(hi, best_x + h);
    return std::max(best, golden_section_max(f, a, b, xtol));
}

// Adaptive quadrature by interval halving; the error indicator is the
// midpoint-vs-trapezoid discrepancy.
namespace detail {
template <typename F>
double integrate_rec(F& f, double a, double b, double fa, double fb, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double h = b - a;
    const double trap = 0.5 * h * (fa + fb);
    const double mid = h * fm;
    const double simpson = (2.0 * mid + trap) / 3.0;
    if (depth <= 0 || std::fabs(trap - mid) <= 3.0 * tol) return simpson;
    return integrate_rec(f, a, m, fa, fm, 0.5 * tol, depth - 1) +
           integrate_rec(f, m, b, fm, fb, 0.5 * tol, depth - 1);
}
}  // namespace detail

template <typename F>
double integrate(F&& f, double a, double b, double abs_tol) {
    if (!(b > a)) return 0.0;
    return detail::integrate_rec(f, a, b, f(a), f(b), abs_tol, 48);
}

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace qa
