#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "qa/interval.hpp"
#include "qa/numeric.hpp"
#include "qa/sequences.hpp"

namespace qa {

inline constexpr double kFitTol = 1e-9;

// ---------------------------------------------------------------------------
// Polynomial helpers (monomial basis, coeffs[i] * x^i).
// ---------------------------------------------------------------------------
namespace poly {

inline double max_abs(std::span<const double> c) {
    double m = 0.0;
    for (double v : c) m = std::max(m, std::fabs(v));
    return m;
}

inline std::vector<double> trim(std::vector<double> c, double rel_tol = 1e-13) {
    const double scale = max_abs(c);
    const double tol = rel_tol * scale;
    while (!c.empty() && std::fabs(c.back()) <= tol) c.pop_back();
    return c;
}

inline long degree(std::span<const double> c) { return static_cast<long>(c.size()) - 1; }

inline double eval(std::span<const double> c, double x) {
    double acc = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
    return acc;
}

inline std::vector<double> derivative(std::span<const double> c) {
    if (c.size() <= 1) return {};
    std::vector<double> d(c.size() - 1);
    for (std::size_t i = 1; i < c.size(); ++i) d[i - 1] = c[i] * static_cast<double>(i);
    return d;
}

// coefficients of the j-th derivative: d_i = c_{i+j} (i+j)! / i!
inline std::vector<double> derivative_order(std::span<const double> c, long j) {
    if (j < 0) throw std::domain_error("derivative order must be non-negative");
    if (static_cast<std::size_t>(j) >= c.size()) return {};
    std::vector<double> d(c.size() - static_cast<std::size_t>(j));
    for (std::size_t i = 0; i < d.size(); ++i) {
        double fall = 1.0;
        for (long t = 0; t < j; ++t) fall *= static_cast<double>(i + static_cast<std::size_t>(j) - static_cast<std::size_t>(t));
        d[i] = c[i + static_cast<std::size_t>(j)] * fall;
    }
    return d;
}

inline std::vector<double> mul(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) return {};
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

// remainder of a mod b; b must be trimmed with a non-zero leading coefficient
inline std::vector<double> mod(std::vector<double> a, std::span<const double> b) {
    const long db = degree(b);
    while (degree(a) >= db && !a.empty()) {
        const double q = a.back() / b.back();
        const std::size_t shift = a.size() - b.size();
        for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= q * b[i];
        a.pop_back();
    }
    return a;
}

inline std::vector<double> divide(std::span<const double> a, std::span<const double> b) {
    std::vector<double> rem(a.begin(), a.end());
    const long db = degree(b);
    if (db < 0) throw std::invalid_argument("division by zero polynomial");
    if (degree(rem) < db) return {};
    std::vector<double> quot(rem.size() - b.size() + 1, 0.0);
    while (degree(rem) >= db && !rem.empty()) {
        const double q = rem.back() / b.back();
        quot[rem.size() - b.size()] = q;
        for (std::size_t i = 0; i < b.size(); ++i) rem[rem.size() - b.size() + i] -= q * b[i];
        rem.pop_back();
    }
    return quot;
}

inline std::vector<double> normalize(std::vector<double> c) {
    const double m = max_abs(c);
    if (m > 0.0)
        for (double& v : c) v /= m;
    return c;
}

// Euclidean gcd in the coefficient domain with per-step renormalization.
// Remainders whose coefficients fall below rel_tol of the operand scale are
// treated as zero.  Adequate for the low degrees and well-separated roots
// this module works with.
inline std::vector<double> gcd(std::vector<double> a, std::vector<double> b,
                               double rel_tol = 1e-10) {
    a = normalize(trim(std::move(a)));
    b = normalize(trim(std::move(b)));
    if (degree(a) < degree(b)) std::swap(a, b);
    while (degree(b) >= 0) {
        std::vector<double> r = mod(a, b);
        const double scale = max_abs(r);
        if (scale <= rel_tol) {
            r.clear();
        } else {
            r = trim(std::move(r), 1e-12);
            if (max_abs(r) <= rel_tol) r.clear();
        }
        a = std::move(b);
        b = normalize(std::move(r));
    }
    return a;
}

// Number of distinct real roots of a square-free polynomial in [I.lo, I.hi],
// by sign scan: samples within |s| <= eps count as roots, runs collapse to
// one, and strict sign changes between non-zero samples isolate one root.
inline long count_distinct_roots(std::span<const double> s, const Interval& iv) {
    const long deg = degree(s);
    if (deg <= 0) return 0;
    const double eps = 1e-11 * std::max(1.0, max_abs(s));
    const long grid = 1 << 13;
    long count = 0;
    int last_sign = 0;     // last non-zero sign seen
    bool in_zero_run = false;
    for (long i = 0; i <= grid; ++i) {
        const double x = iv.lo + iv.length() * static_cast<double>(i) / static_cast<double>(grid);
        const double v = eval(s, x);
        int sign = 0;
        if (v > eps) sign = 1;
        else if (v < -eps) sign = -1;
        if (sign == 0) {
            if (!in_zero_run) { ++count; in_zero_run = true; }
            continue;
        }
        if (in_zero_run) {
            in_zero_run = false;        // root already counted at the zero run
        } else if (last_sign != 0 && sign != last_sign) {
            ++count;                    // isolated bracket [x_prev, x]
        }
        last_sign = sign;
    }
    return count;
}

// Zeros counted with multiplicity: distinct roots of the square-free part
// plus, recursively, the zeros of gcd(p, p') (each m-fold root appears once
// at every one of the m levels).
inline long count_zeros_with_multiplicity(std::vector<double> p, const Interval& iv) {
    p = trim(std::move(p));
    if (p.empty()) throw std::invalid_argument("zero counting of the identically-zero polynomial");
    if (degree(p) <= 0) return 0;
    std::vector<double> g = gcd(p, derivative(p));
    if (degree(g) <= 0) return count_distinct_roots(p, iv);
    std::vector<double> square_free = trim(divide(p, g));
    return count_distinct_roots(square_free, iv) + count_zeros_with_multiplicity(std::move(g), iv);
}

}  // namespace poly

// ---------------------------------------------------------------------------
// Function models on [0,1] with derivative oracles of every order.
// ---------------------------------------------------------------------------

struct Polynomial {
    std::vector<double> coeffs;  // coeffs[i] * x^i
};

struct Sinusoid {
    int frequency = 1;        // k; f(x) = amplitude * sin(k pi x)
    double amplitude = 1.0;
};

// Truncated even power series with coefficients c_j = exp(-C j / log(j+e)),
// j even, plus certified tail bounds for every derivative order on [0,1].
class PowerSeries {
  public:
    PowerSeries(double growth, long truncation, double scale = 1.0)
        : growth_(growth), truncation_(truncation), scale_(scale) {
        if (!(growth > 0.0)) throw std::invalid_argument("series constant C must be positive");
        if (truncation < 10 || truncation % 2 != 0)
            throw std::invalid_argument("truncation order K must be even and >= 10");
        if (!(scale > 0.0)) throw std::invalid_argument("series scale must be positive");
        log_c_.reserve(static_cast<std::size_t>(truncation / 2 + 1));
        for (long j = 0; j <= truncation; j += 2) log_c_.push_back(log_coefficient(j));
        log_table_.resize(static_cast<std::size_t>(truncation) + 1, -kInf);
        for (long i = 1; i <= truncation; ++i)
            log_table_[static_cast<std::size_t>(i)] = std::log(static_cast<double>(i));
    }

    double growth() const { return growth_; }
    long truncation() const { return truncation_; }
    double scale() const { return scale_; }

    double log_coefficient(long j) const {
        return -growth_ * static_cast<double>(j) / std::log(static_cast<double>(j) + kE);
    }

    double coefficient(long j) const {
        if (j < 0 || j % 2 != 0 || j > truncation_) return 0.0;
        return std::exp(log_c_[static_cast<std::size_t>(j / 2)]);
    }

    // log |f^(n)(x)| of the truncated, scaled series; all terms are
    // non-negative on [0,1], so log-sum-exp loses nothing to cancellation.
    double log_abs_derivative(long n, double x) const {
        const double lx = x > 0.0 ? std::log(x) : -kInf;
        double acc = 0.0, acc_max = -kInf;
        const long j0 = n + (n % 2 == 0 ? 0 : 1);
        double log_fall = 0.0;  // log of j(j-1)...(j-n+1), updated incrementally
        for (long t = 0; t < n; ++t) log_fall += log_int(j0 - t);
        for (long j = j0; j <= truncation_; j += 2) {
            if (j > j0)
                log_fall += log_int(j) + log_int(j - 1) - log_int(j - n) - log_int(j - n - 1);
            double lt = log_c_[static_cast<std::size_t>(j / 2)] + log_fall;
            if (j > n) {
                if (x <= 0.0) continue;
                lt += static_cast<double>(j - n) * lx;
            }
            if (lt <= acc_max) {
                acc += std::exp(lt - acc_max);
            } else {
                acc = acc * std::exp(acc_max - lt) + 1.0;
                acc_max = lt;
            }
        }
        if (acc_max == -kInf) return -kInf;
        return acc_max + std::log(acc) + std::log(scale_);
    }

    // Certified upper bound on sum_{j > K, j even} j^n c_j (unscaled, log
    // domain): the terms up to 4096 are summed directly and the far tail is
    // covered by closed-form geometric bounds over dyadic blocks.
    double log_tail(long n) const {
        long j1 = 4096;
        while (j1 < 2 * truncation_) j1 *= 2;
        double acc = -kInf;
        for (long j = truncation_ + 2; j <= j1; j += 2) {
            const double t = static_cast<double>(n) * std::log(static_cast<double>(j)) + log_coefficient(j);
            acc = logaddexp(acc, t);
        }
        double block_start = static_cast<double>(j1);
        for (int step = 0; step < 100; ++step) {
            const double l = std::log(2.0 * block_start + kE);
            const double log_block = static_cast<double>(n) * std::log(2.0 * block_start) -
                                     growth_ * block_start / l -
                                     std::log(-std::expm1(-growth_ / l));
            acc = logaddexp(acc, log_block);
            if (log_block < acc - 46.0) break;
            block_start *= 2.0;
        }
        return acc;
    }

    double log_tail_scaled(long n) const { return log_tail(n) + std::log(scale_); }

    // log upper bound on ||f^(n)|| over [0,1] (coefficient sum at x=1 plus tail)
    double log_sup_bound(long n) const {
        return logaddexp(log_abs_derivative(n, 1.0) - std::log(scale_), log_tail(n)) +
               std::log(scale_);
    }

  private:
    static constexpr double kE = 2.718281828459045235360287471352662498;
    double log_int(long i) const { return log_table_[static_cast<std::size_t>(i)]; }

    double growth_;
    long truncation_;
    double scale_;
    std::vector<double> log_c_;
    std::vector<double> log_table_;  // log(i) for i = 0..K
};

struct DerivEval {
    double log_abs = -kInf;
    int sign = 0;
    double value() const { return sign == 0 ? 0.0 : static_cast<double>(sign) * std::exp(log_abs); }
};

class FunctionModel {
  public:
    FunctionModel(Polynomial p) : model_(std::move(p)) {}          // NOLINT(google-explicit-constructor)
    FunctionModel(Sinusoid s) : model_(s) {}                       // NOLINT(google-explicit-constructor)
    FunctionModel(PowerSeries s) : model_(std::move(s)) {}         // NOLINT(google-explicit-constructor)

    bool is_polynomial() const { return std::holds_alternative<Polynomial>(model_); }
    bool is_sinusoid() const { return std::holds_alternative<Sinusoid>(model_); }
    bool is_power_series() const { return std::holds_alternative<PowerSeries>(model_); }
    const Polynomial& polynomial() const { return std::get<Polynomial>(model_); }
    const Sinusoid& sinusoid() const { return std::get<Sinusoid>(model_); }
    const PowerSeries& power_series() const { return std::get<PowerSeries>(model_); }

    DerivEval derivative_eval(long j, double x) const {
        if (j < 0) throw std::domain_error("derivative order must be non-negative");
        if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("argument must lie in [0,1]");
        if (const auto* p = std::get_if<Polynomial>(&model_)) {
            const std::vector<double> d = poly::derivative_order(p->coeffs, j);
            const double v = poly::eval(d, x);
            DerivEval e;
            if (v > 0.0) { e.sign = 1; e.log_abs = std::log(v); }
            else if (v < 0.0) { e.sign = -1; e.log_abs = std::log(-v); }
            return e;
        }
        if (const auto* s = std::get_if<Sinusoid>(&model_)) {
            // f^(j)(x) = amplitude (k pi)^j sin(k pi x + j pi/2): the phase
            // shift cycles through {sin, cos, -sin, -cos}.
            const double theta = static_cast<double>(s->frequency) * kPi * x;
            double trig = 0.0;
            switch (j % 4) {
                case 0: trig = std::sin(theta); break;
                case 1: trig = std::cos(theta); break;
                case 2: trig = -std::sin(theta); break;
                case 3: trig = -std::cos(theta); break;
            }
            const double signed_amp = s->amplitude * trig;
            DerivEval e;
            if (signed_amp == 0.0) return e;
            e.sign = signed_amp > 0.0 ? 1 : -1;
            e.log_abs = std::log(std::fabs(signed_amp)) +
                        static_cast<double>(j) * std::log(static_cast<double>(s->frequency) * kPi);
            return e;
        }
        const auto& ps = std::get<PowerSeries>(model_);
        DerivEval e;
        e.log_abs = ps.log_abs_derivative(j, x);
        e.sign = e.log_abs == -kInf ? 0 : 1;
        return e;
    }

    double value(double x) const { return derivative_eval(0, x).value(); }

    // Tail bound for the j-th derivative value (0 for exact kinds).
    double derivative_tail(long j) const {
        if (const auto* ps = std::get_if<PowerSeries>(&model_))
            return std::exp(ps->log_tail_scaled(j));
        return 0.0;
    }

    // Certified log upper bound on ||f^(j)|| over [0,1].
    double log_derivative_sup_bound(long j) const {
        if (const auto* p = std::get_if<Polynomial>(&model_)) {
            const std::vector<double> d = poly::derivative_order(p->coeffs, j);
            double sum = 0.0;
            for (double v : d) sum += std::fabs(v);
            return sum > 0.0 ? std::log(sum) : -kInf;
        }
        if (const auto* s = std::get_if<Sinusoid>(&model_)) {
            if (s->amplitude == 0.0) return -kInf;
            return std::log(std::fabs(s->amplitude)) +
                   static_cast<double>(j) * std::log(static_cast<double>(s->frequency) * kPi);
        }
        return std::get<PowerSeries>(model_).log_sup_bound(j);
    }

  private:
    static constexpr double kPi = 3.141592653589793238462643383279502884;
    std::variant<Polynomial, Sinusoid, PowerSeries> model_;
};

inline double derivative_at(const FunctionModel& f, long j, double x) {
    return f.derivative_eval(j, x).value();
}

// ---------------------------------------------------------------------------
// Certified sup-norm estimation on interval sets.
//
// The grid maximum is a lower bound for the true sup; adding the Lipschitz
// term L * spacing / 2 (plus twice the truncation tail for series models)
// gives an upper bound, so the true sup lies in [estimate, estimate + error].
// ---------------------------------------------------------------------------
struct SupNorm {
    double estimate = 0.0;
    double error_bound = 0.0;
    double log_estimate = -kInf;
    double log_upper = -kInf;
    double upper() const { return estimate + error_bound; }
};

inline SupNorm derivative_sup_norm(const FunctionModel& f, long j, const IntervalSet& set,
                                   double spacing) {
    if (!(spacing > 0.0)) throw std::invalid_argument("grid spacing must be positive");
    double log_grid_max = -kInf;
    for (const auto& part : set.parts()) {
        const long n = std::max(1L, static_cast<long>(std::ceil(part.length() / spacing)));
        for (long i = 0; i <= n; ++i) {
            const double x = part.lo + part.length() * static_cast<double>(i) / static_cast<double>(n);
            log_grid_max = std::max(log_grid_max, f.derivative_eval(j, x).log_abs);
        }
    }
    const double tail = f.derivative_tail(j);
    const double log_lip = f.log_derivative_sup_bound(j + 1);
    SupNorm out;
    out.estimate = std::max(0.0, std::exp(log_grid_max) - tail);
    out.log_estimate = out.estimate > 0.0 ? std::log(out.estimate) : -kInf;
    // exact kinds keep the pure grid value in the log field even when the
    // linear value overflows
    if (tail == 0.0) out.log_estimate = log_grid_max;
    const double log_err =
        logaddexp(log_lip + std::log(spacing / 2.0), tail > 0.0 ? std::log(2.0 * tail) : -kInf);
    out.error_bound = std::exp(log_err);
    out.log_upper = logaddexp(out.log_estimate, log_err);
    return out;
}

inline SupNorm sup_norm(const FunctionModel& f, const IntervalSet& set, double spacing) {
    return derivative_sup_norm(f, 0, set, spacing);
}

// ---------------------------------------------------------------------------
// Zero counting with multiplicity.
// ---------------------------------------------------------------------------
struct ZeroCount {
    long count = 0;
    bool exact = false;
};

inline ZeroCount count_zeros(const FunctionModel& f, const Interval& iv) {
    if (!(iv.lo < iv.hi)) throw std::invalid_argument("zero counting needs a nondegenerate interval");
    if (!(iv.lo >= 0.0 && iv.hi <= 1.0))
        throw std::invalid_argument("interval must lie within [0,1]");
    if (f.is_polynomial()) {
        return ZeroCount{poly::count_zeros_with_multiplicity(f.polynomial().coeffs, iv), true};
    }
    if (f.is_sinusoid()) {
        const auto& s = f.sinusoid();
        if (s.amplitude == 0.0)
            throw std::invalid_argument("zero counting of the identically-zero sinusoid");
        // zeros of sin(k pi x) at x = m/k, all simple
        const double k = static_cast<double>(s.frequency);
        const double a = snap_to_integer(iv.lo * k);
        const double b = snap_to_integer(iv.hi * k);
        const long m_lo = static_cast<long>(std::ceil(a));
        const long m_hi = static_cast<long>(std::floor(b));
        return ZeroCount{std::max(0L, m_hi - m_lo + 1), true};
    }
    // series model: sign changes on a fixed grid give a lower bound
    const double step = 1e-4;
    const long n = static_cast<long>(std::ceil(iv.length() / step));
    long count = 0;
    double prev = f.value(iv.lo);
    for (long i = 1; i <= n; ++i) {
        const double x = iv.lo + iv.length() * static_cast<double>(i) / static_cast<double>(n);
        const double v = f.value(x);
        if ((prev < 0.0 && v > 0.0) || (prev > 0.0 && v < 0.0)) ++count;
        if (v != 0.0) prev = v;
    }
    return ZeroCount{count, false};
}

// ---------------------------------------------------------------------------
// Class membership: sup-norm of every derivative order against M_j.
// ---------------------------------------------------------------------------
struct FitResult {
    bool fits = true;
    double max_violation = -kInf;  // max over j of estimate_j - M_j
    long worst_order = -1;
};

inline FitResult fits_class(const FunctionModel& f, const LogConvexSequence& seq,
                            double spacing) {
    const IntervalSet full = full_interval_set();
    FitResult out;
    for (long j = 0; j <= seq.max_index(); ++j) {
        const SupNorm sn = derivative_sup_norm(f, j, full, spacing);
        const double log_m = seq.log_at(j);
        // equality cases (||f^(j)|| = M_j) are compared in the log domain with
        // an ulp-scale relative slack; the absolute tolerance applies wherever
        // doubles can still express it
        bool ok = sn.log_estimate <= log_m + kLogConvexTol * std::max(1.0, std::fabs(log_m));
        if (!ok && log_m < 700.0 && sn.log_estimate < 700.0)
            ok = sn.estimate <= std::exp(log_m) + kFitTol;
        const double violation =
            std::exp(std::min(700.0, sn.log_estimate)) - std::exp(std::min(700.0, log_m));
        if (violation > out.max_violation) {
            out.max_violation = violation;
            out.worst_order = j;
        }
        if (!ok) out.fits = false;
    }
    return out;
}

// ---------------------------------------------------------------------------
// The even series f(x) = sum c_{2k} x^{2k}, c_j = exp(-C j / log(j+e)).
// ---------------------------------------------------------------------------
inline FunctionModel nonextendable_series(double growth, long truncation) {
    return FunctionModel(PowerSeries(growth, truncation));
}

}  // namespace qa
