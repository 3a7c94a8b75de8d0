#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qa/bang.hpp"
#include "qa/funcmodel.hpp"
#include "qa/interval.hpp"
#include "qa/numeric.hpp"
#include "qa/sequences.hpp"

namespace qa {

// ---------------------------------------------------------------------------
// Two-sided checks carry sup-norm error bands on both sides.  A check passes
// only when the certified minimum of the right side clears the certified
// maximum of the left side; a certified violation fails; anything inside the
// bands is inconclusive (callers refine the grid once before settling).
// ---------------------------------------------------------------------------
enum class Verdict { pass, fail, inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

struct RemezCheck {
    double bound = 0.0;       // multiplicative bound factor (may overflow to +inf)
    double log_bound = -kInf;
    double lhs = 0.0;         // measured ||f||_I with band
    double lhs_err = 0.0;
    double rhs = 0.0;         // certified minimum of the right-hand side
    double rhs_err = 0.0;
    double margin = 0.0;      // rhs - (lhs + lhs_err)
    double log_margin = 0.0;  // same margin in the log domain
    Verdict verdict = Verdict::inconclusive;
};

namespace detail {

inline Verdict band_verdict(double lhs_min, double lhs_max, double rhs_min, double rhs_max) {
    if (rhs_min > lhs_max) return Verdict::pass;
    if (rhs_max < lhs_min) return Verdict::fail;
    return Verdict::inconclusive;
}

inline Verdict log_band_verdict(double log_lhs_min, double log_lhs_max, double log_rhs_min,
                                double log_rhs_max) {
    if (log_rhs_min > log_lhs_max) return Verdict::pass;
    if (log_rhs_max < log_lhs_min) return Verdict::fail;
    return Verdict::inconclusive;
}

}  // namespace detail

// (4 |I| / |E|)^d, computed in the log domain.
inline double classical_remez_log_bound(long degree, double len_i, double len_e) {
    if (degree < 0) throw std::domain_error("degree must be non-negative");
    if (!(len_e > 0.0)) throw std::domain_error("subset length must be positive");
    if (!(len_e <= len_i)) throw std::domain_error("subset cannot be longer than the interval");
    return static_cast<double>(degree) * (std::log(4.0) + std::log(len_i) - std::log(len_e));
}

inline double classical_remez_bound(long degree, double len_i, double len_e) {
    return std::exp(classical_remez_log_bound(degree, len_i, len_e));
}

// ---------------------------------------------------------------------------
// n+1 interpolation nodes inside E whose consecutive gaps carry measure
// |E|/n each; the geometric gap is then at least |E|/n as well.  The node at
// level l is the smallest point of E accumulating measure l.
// ---------------------------------------------------------------------------
inline std::vector<double> well_spaced_points(const IntervalSet& set, long n) {
    if (n < 1) throw std::invalid_argument("node count must be >= 1");
    const double step = set.measure() / static_cast<double>(n);
    std::vector<double> points;
    points.reserve(static_cast<std::size_t>(n) + 1);
    const auto& parts = set.parts();
    std::size_t comp = 0;
    double before = 0.0;  // measure accumulated before parts[comp]
    for (long i = 0; i <= n; ++i) {
        const double level = std::min(set.measure(), static_cast<double>(i) * step);
        while (comp + 1 < parts.size() && before + parts[comp].length() < level) {
            before += parts[comp].length();
            ++comp;
        }
        const double x = parts[comp].lo + std::max(0.0, level - before);
        points.push_back(std::min(x, parts[comp].hi));
    }
    return points;
}

// RHS of the interpolation estimate: (2e lenI/lenE)^n supE + m_{n+1} lenI^{n+1}
inline double lagrange_rhs(long n, double len_i, double len_e, double sup_e, double m_next) {
    const double factor =
        std::exp(static_cast<double>(n) * (std::log(2.0 * std::exp(1.0)) + std::log(len_i) - std::log(len_e)));
    return factor * sup_e + m_next * std::pow(len_i, static_cast<double>(n) + 1.0);
}

struct LagrangeCheck {
    RemezCheck check;
    double remainder_term = 0.0;           // m_{n+1} |I|^{n+1}
    std::vector<double> nodes;             // the n+1 interpolation nodes
    std::vector<double> node_poly_deriv;   // Q'(x_j) at each node
    double max_abs_node_poly = 0.0;        // max |Q| over the grid on I
};

inline LagrangeCheck lagrange_bound(const FunctionModel& f, const LogConvexSequence& seq,
                                    const Interval& iv, const IntervalSet& set, long n,
                                    double spacing = 1e-3) {
    if (!set.subset_of(iv)) throw std::invalid_argument("E must be contained in I");
    if (n < 1) throw std::invalid_argument("interpolation order must be >= 1");
    if (n + 1 > seq.max_index())
        throw std::out_of_range("sequence too short for interpolation order");
    LagrangeCheck out;
    out.nodes = well_spaced_points(set, n);
    for (std::size_t j = 0; j < out.nodes.size(); ++j) {
        double prod = 1.0;
        for (std::size_t i = 0; i < out.nodes.size(); ++i)
            if (i != j) prod *= out.nodes[j] - out.nodes[i];
        out.node_poly_deriv.push_back(prod);
    }
    {
        const long grid = 256;
        for (long i = 0; i <= grid; ++i) {
            const double x = iv.lo + iv.length() * static_cast<double>(i) / static_cast<double>(grid);
            double q = 1.0;
            for (double node : out.nodes) q *= x - node;
            out.max_abs_node_poly = std::max(out.max_abs_node_poly, std::fabs(q));
        }
    }
    const double log_m_next = seq.log_at(n + 1) - std::lgamma(static_cast<double>(n) + 2.0);
    out.remainder_term =
        std::exp(log_m_next + (static_cast<double>(n) + 1.0) * std::log(iv.length()));
    const double log_factor = static_cast<double>(n) * (std::log(2.0 * std::exp(1.0)) +
                                                        std::log(iv.length()) - std::log(set.measure()));

    const IntervalSet i_set({iv});
    auto evaluate = [&](double h) {
        const SupNorm sup_i = sup_norm(f, i_set, h);
        const SupNorm sup_e = sup_norm(f, set, h);
        RemezCheck c;
        c.log_bound = log_factor;
        c.bound = std::exp(log_factor);
        c.lhs = sup_i.estimate;
        c.lhs_err = sup_i.error_bound;
        c.rhs = c.bound * sup_e.estimate + out.remainder_term;
        c.rhs_err = c.bound * sup_e.error_bound;
        c.margin = c.rhs - (c.lhs + c.lhs_err);
        c.log_margin = std::log(c.rhs) - sup_i.log_upper;
        c.verdict = detail::band_verdict(c.lhs, c.lhs + c.lhs_err, c.rhs, c.rhs + c.rhs_err);
        return c;
    };
    out.check = evaluate(spacing);
    if (out.check.verdict == Verdict::inconclusive) out.check = evaluate(spacing / 10.0);
    return out;
}

// ---------------------------------------------------------------------------
// (Gamma(2 n_f) |I| / |E|)^{2 n_f} in the log domain.  The plain variant uses
// the exponent 4 + gamma(2 n_f); the scaled variant uses 4 + (2/e) gamma with
// the global regularity supremum.
// ---------------------------------------------------------------------------
inline double theorem_b_log_bound(const Generator& gen, long n_f, double len_i, double len_e,
                                  GammaVariant variant = GammaVariant::plain) {
    if (n_f < 1) throw std::domain_error("bound needs a finite positive degree");
    if (!(len_e > 0.0 && len_e <= len_i)) throw std::domain_error("need 0 < |E| <= |I|");
    const double gamma = variant == GammaVariant::plain
                             ? gamma_sup(gen, 2.0 * static_cast<double>(n_f))
                             : gamma_global(gen);
    const double big = big_gamma(gamma, variant);
    return 2.0 * static_cast<double>(n_f) * (std::log(big) + std::log(len_i) - std::log(len_e));
}

inline double theorem_b_bound(const Generator& gen, long n_f, double len_i, double len_e,
                              GammaVariant variant = GammaVariant::plain) {
    return std::exp(theorem_b_log_bound(gen, n_f, len_i, len_e, variant));
}

// short-interval condition: log m_{2n_f} + 2 n_f log |I| <= -2 n_f (3 + gamma(2 n_f))
inline bool is_short_interval(const LogConvexSequence& seq, long n_f, double gamma2n,
                              double len_i) {
    if (n_f < 1) throw std::domain_error("degree must be >= 1");
    if (2 * n_f > seq.max_index()) throw std::out_of_range("sequence too short for 2 n_f");
    const double log_m = seq.log_at(2 * n_f) - std::lgamma(2.0 * static_cast<double>(n_f) + 1.0);
    const double two_n = 2.0 * static_cast<double>(n_f);
    return log_m + two_n * std::log(len_i) <= -two_n * (3.0 + gamma2n);
}

// Dyadic descent into the half with the larger share of E (ties left),
// stopping at the first short interval.  Density never decreases along the
// descent and the stopping length is within a factor 2 of the threshold.
inline Interval find_short_subinterval(const IntervalSet& set, const Interval& iv,
                                       const LogConvexSequence& seq, long n_f, double gamma2n) {
    if (!set.subset_of(iv)) throw std::invalid_argument("E must be contained in I");
    Interval cur = iv;
    if (is_short_interval(seq, n_f, gamma2n, cur.length())) return cur;
    for (int depth = 0; depth < 2000; ++depth) {
        const double mid = cur.midpoint();
        const Interval left{cur.lo, mid};
        const Interval right{mid, cur.hi};
        cur = set.measure_in(left) >= set.measure_in(right) ? left : right;
        if (is_short_interval(seq, n_f, gamma2n, cur.length())) return cur;
    }
    throw std::logic_error("dyadic descent failed to reach a short interval");
}

// ---------------------------------------------------------------------------
// Central-point Markov bound: |S^(k)(0)| <= (deg S)^k ||S||_{[-1,1]}.
// The polynomial is given by coefficients on [-1,1]; the sup norm is taken
// by remapping onto [0,1].
// ---------------------------------------------------------------------------
struct MarkovResidual {
    double residual = 0.0;    // (deg S)^k ||S|| - |S^(k)(0)|
    double error_band = 0.0;  // (deg S)^k times the sup-norm band
    long degree = 0;
    double derivative_at_zero = 0.0;
    double sup_estimate = 0.0;
};

inline MarkovResidual markov_pointwise(const Polynomial& s, long k, double spacing = 1e-4) {
    if (k < 0) throw std::domain_error("derivative order must be non-negative");
    const std::vector<double> c = poly::trim(s.coeffs);
    MarkovResidual out;
    out.degree = std::max(0L, poly::degree(c));
    if (static_cast<std::size_t>(k) < c.size()) {
        double fact = 1.0;
        for (long t = 2; t <= k; ++t) fact *= static_cast<double>(t);
        out.derivative_at_zero = std::fabs(c[static_cast<std::size_t>(k)]) * fact;
    }
    // remap S(2t - 1) onto [0,1]
    std::vector<double> remapped{0.0};
    std::vector<double> basis{1.0};
    for (double ci : c) {
        if (remapped.size() < basis.size()) remapped.resize(basis.size(), 0.0);
        for (std::size_t i = 0; i < basis.size(); ++i) remapped[i] += ci * basis[i];
        basis = poly::mul(basis, std::vector<double>{-1.0, 2.0});
    }
    const SupNorm sup = sup_norm(FunctionModel(Polynomial{remapped}), full_interval_set(), spacing);
    out.sup_estimate = sup.estimate;
    const double dk = k == 0 ? 1.0 : std::pow(static_cast<double>(out.degree), static_cast<double>(k));
    out.residual = dk * sup.estimate - out.derivative_at_zero;
    out.error_band = dk * sup.error_bound;
    return out;
}

// ---------------------------------------------------------------------------
// Propagation-of-smallness machinery: Omega and the relative smallness alpha.
// ---------------------------------------------------------------------------

// Omega(t) = exp[-(1/e) int_1^{log(e/t)} ds/A(s)]; exactly 1 at t = 1.
inline double omega(const Generator& gen, double t, double quad_tol = 1e-10) {
    if (!(t > 0.0 && t <= 1.0)) throw std::domain_error("omega argument must lie in (0,1]");
    const double upper = 1.0 - std::log(t);
    const double integral = integrate(
        [&](double s) {
            const double a = gen.value(s);
            return std::isfinite(a) ? 1.0 / a : 0.0;
        },
        1.0, upper, quad_tol);
    return std::exp(-integral / std::exp(1.0));
}

// alpha(E) = (1/3) / log(Gamma / |E|)
inline double alpha_smallness(double len_e, double big_gamma_value) {
    if (!(len_e > 0.0)) throw std::domain_error("set measure must be positive");
    if (!(big_gamma_value > len_e)) throw std::domain_error("Gamma must exceed |E|");
    return (1.0 / 3.0) / std::log(big_gamma_value / len_e);
}

struct PropagationReport {
    RemezCheck omega_check;                  // Omega(||f||_I) <= e Omega(||f||_E^alpha)
    std::optional<RemezCheck> analytic_form; // ||f||_I <= e eps^{alpha e^{-eC}} (analytic A only)
    double gamma = 0.0;
    double alpha = 0.0;
};

inline PropagationReport verify_propagation(const FunctionModel& f, const Generator& gen,
                                            const LogConvexSequence& seq, const IntervalSet& set,
                                            double spacing = 1e-3) {
    (void)seq;  // membership is certified by the caller
    PropagationReport out;
    out.gamma = gamma_global(gen);
    const double big = big_gamma(out.gamma, GammaVariant::two_over_e);
    out.alpha = alpha_smallness(set.measure(), big);

    auto omega_clamped = [&](double t) {
        if (!(t > 0.0)) return 0.0;
        return omega(gen, std::min(1.0, t));
    };
    const IntervalSet full = full_interval_set();
    auto evaluate = [&](double h) {
        const SupNorm sup_i = sup_norm(f, full, h);
        const SupNorm sup_e = sup_norm(f, set, h);
        RemezCheck c;
        c.bound = std::exp(1.0);
        c.log_bound = 1.0;
        const double lhs_min = omega_clamped(sup_i.estimate);
        const double lhs_max = omega_clamped(sup_i.upper());
        const double rhs_min = std::exp(1.0) * omega_clamped(std::pow(sup_e.estimate, out.alpha));
        const double rhs_max = std::exp(1.0) * omega_clamped(std::pow(sup_e.upper(), out.alpha));
        c.lhs = lhs_min;
        c.lhs_err = lhs_max - lhs_min;
        c.rhs = rhs_min;
        c.rhs_err = rhs_max - rhs_min;
        c.margin = c.rhs - lhs_max;
        c.log_margin = std::log(rhs_min) - std::log(lhs_max);
        c.verdict = detail::band_verdict(lhs_min, lhs_max, rhs_min, rhs_max);
        RemezCheck analytic;
        bool have_analytic = false;
        if (gen.kind() == Generator::Kind::analytic) {
            have_analytic = true;
            const double exponent = out.alpha * std::exp(-std::exp(1.0) * gen.scale());
            analytic.bound = std::exp(1.0);
            analytic.log_bound = 1.0;
            analytic.lhs = sup_i.estimate;
            analytic.lhs_err = sup_i.error_bound;
            analytic.rhs = std::exp(1.0) * std::pow(sup_e.estimate, exponent);
            analytic.rhs_err =
                std::exp(1.0) * std::pow(sup_e.upper(), exponent) - analytic.rhs;
            analytic.margin = analytic.rhs - sup_i.upper();
            analytic.log_margin = std::log(analytic.rhs) - sup_i.log_upper;
            analytic.verdict = detail::band_verdict(analytic.lhs, sup_i.upper(), analytic.rhs,
                                                    analytic.rhs + analytic.rhs_err);
        }
        return std::pair<RemezCheck, std::optional<RemezCheck>>(
            c, have_analytic ? std::optional<RemezCheck>(analytic) : std::nullopt);
    };
    auto [main_check, analytic_check] = evaluate(spacing);
    if (main_check.verdict == Verdict::inconclusive ||
        (analytic_check && analytic_check->verdict == Verdict::inconclusive)) {
        auto refined = evaluate(spacing / 10.0);
        main_check = refined.first;
        analytic_check = refined.second;
    }
    out.omega_check = main_check;
    out.analytic_form = analytic_check;
    return out;
}

}  // namespace qa
