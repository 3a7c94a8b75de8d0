#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qa/funcmodel.hpp"
#include "qa/numeric.hpp"
#include "qa/sequences.hpp"

namespace qa {

// ---------------------------------------------------------------------------
// Pointwise norms B_f(x) = max_j |f^(j)(x)| / (e^j M_j) and variants.
//
// For class members each term is at most e^{-j}, so the scan can stop as
// soon as e^{-j} drops below the running maximum.  When membership is not
// known the caller disables the early stop and the scan runs over the whole
// stored sequence.
// ---------------------------------------------------------------------------

namespace detail {

template <typename TermLog>
double max_term(const LogConvexSequence& seq, long j_from, TermLog&& term_log,
                bool assume_member) {
    double best = 0.0;
    for (long j = j_from; j <= seq.max_index(); ++j) {
        if (assume_member && best > 0.0 && -static_cast<double>(j) < std::log(best)) break;
        const double lt = term_log(j);
        if (lt != -kInf) best = std::max(best, std::exp(lt));
    }
    return best;
}

}  // namespace detail

inline double bang_norm(const FunctionModel& f, const LogConvexSequence& seq, double x,
                        bool assume_member = true) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("argument must lie in [0,1]");
    return detail::max_term(
        seq, 0,
        [&](long j) { return f.derivative_eval(j, x).log_abs - static_cast<double>(j) - seq.log_at(j); },
        assume_member);
}

// b_{f,n}(x) = max_{j >= n} |f^(j)(x)| / (e^j M_j)
inline double remainder_norm(const FunctionModel& f, const LogConvexSequence& seq, long n,
                             double x, bool assume_member = true) {
    if (n < 0 || n > seq.max_index()) throw std::out_of_range("remainder order out of range");
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("argument must lie in [0,1]");
    return detail::max_term(
        seq, n,
        [&](long j) { return f.derivative_eval(j, x).log_abs - static_cast<double>(j) - seq.log_at(j); },
        assume_member);
}

// Norm built from negative parts only: max_j max{-f^(j)(x), 0} / (e^j M_j).
inline double one_sided_norm(const FunctionModel& f, const LogConvexSequence& seq, double x,
                             bool assume_member = true) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("argument must lie in [0,1]");
    return detail::max_term(
        seq, 0,
        [&](long j) {
            const DerivEval e = f.derivative_eval(j, x);
            if (e.sign >= 0) return -kInf;
            return e.log_abs - static_cast<double>(j) - seq.log_at(j);
        },
        assume_member);
}

// L_f = log(1/B); +inf sentinel where B = 0.
inline double log_norm(double b) {
    if (b < 0.0) throw std::domain_error("norm value must be non-negative");
    if (b == 0.0) return kInf;
    const double v = -std::log(b);
    return v == 0.0 ? 0.0 : v;  // avoid -0.0 at B = 1
}

// ---------------------------------------------------------------------------
// Bang degree: the largest N with sum_{K < j <= N} M_{j-1}/M_j < e, where
// K = log(1/||f||).  The lower limit is strict, so summation starts at
// floor(K) + 1 (with an exact-integer snap against roundoff).
// ---------------------------------------------------------------------------
struct BangDegree {
    bool unbounded = false;
    long value = 0;            // meaningful only when !unbounded
    long threshold = 0;        // floor(log(1/||f||)), the lower summation limit
    double partial_sum = 0.0;  // final accumulated sum, always < e
};

inline BangDegree bang_degree(const LogConvexSequence& seq, double sup_norm_value) {
    if (!(sup_norm_value > 0.0 && sup_norm_value <= 1.0))
        throw std::domain_error("sup norm must lie in (0,1]");
    if (!seq.normalized())
        throw std::invalid_argument("bang degree needs a normalized sequence (M_0 = 1)");
    const double k_real = snap_to_integer(std::log(1.0 / sup_norm_value));
    BangDegree out;
    out.threshold = static_cast<long>(std::floor(k_real));
    const double e = std::exp(1.0);
    long n = out.threshold;
    double sum = 0.0;
    for (long j = out.threshold + 1;; ++j) {
        if (j > seq.max_index()) {
            // a finite-table class has ratio 0 beyond the table: the sum can
            // never reach e, so every larger N qualifies
            if (seq.finite_tail()) out.unbounded = true;
            break;
        }
        const double r = seq.ratio(j);
        if (sum + r >= e) break;
        sum += r;
        n = j;
    }
    out.value = n;
    out.partial_sum = sum;
    return out;
}

// ---------------------------------------------------------------------------
// Original norm over the log-convex minorant: the raw majorant sequence need
// not be log-convex; the norm takes an infimum over the contact set P of its
// largest log-convex minorant.
// ---------------------------------------------------------------------------
inline double original_bang_norm(const FunctionModel& f, std::span<const double> raw_values,
                                 double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("argument must lie in [0,1]");
    const MinorantResult mr = log_convex_minorant(raw_values);
    double best = kInf;
    double prefix_max = 0.0;
    long next_j = 0;
    for (long p : mr.contact_set) {
        for (long j = next_j; j <= p; ++j) {
            const double lt =
                f.derivative_eval(j, x).log_abs - static_cast<double>(j) - mr.minorant.log_at(j);
            if (lt != -kInf) prefix_max = std::max(prefix_max, std::exp(lt));
        }
        next_j = p + 1;
        best = std::min(best, std::max(std::exp(-static_cast<double>(p)), prefix_max));
    }
    return best;
}

// ---------------------------------------------------------------------------
// Envelope for members flat at 0: e^{-n*} with n* the first integer level
// whose ratio tail drops strictly below e*c.  Returns 0 when the stored
// sequence cannot certify convergent tails (no finite-table marker).
// Comparisons snap within kStepSnapTol of the threshold, so an exact
// boundary counts as "not below".
// ---------------------------------------------------------------------------
inline double flat_zero_envelope(const LogConvexSequence& seq, double c) {
    if (!(c > 0.0 && c <= 1.0)) throw std::domain_error("c must lie in (0,1]");
    if (!seq.finite_tail()) return 0.0;
    const double target = std::exp(1.0) * c;
    // suffix sums accumulated left to right per level
    for (long n = 0; n <= seq.max_index() + 1; ++n) {
        double tail = 0.0;
        for (long j = n + 1; j <= seq.max_index(); ++j) tail += seq.ratio(j);
        // the empty tail is exactly 0 and compares exactly; computed sums snap
        const bool at_boundary =
            tail > 0.0 && std::fabs(tail - target) <= kStepSnapTol * std::max(1.0, target);
        if (tail < target && !at_boundary) return std::exp(-static_cast<double>(n));
    }
    return 0.0;  // unreachable: the tail past the table is 0 < e*c
}

// ---------------------------------------------------------------------------
// Residuals of the fundamental inequality
//   B_f(x+h) < max{B_f(x), e^{-q}} e^{e|h|A(q)}                  (level form)
// together with its remainder-norm analogue (the same inequality applied to
// f^(n) in the shifted class, evaluated at n = 1) and the log-norm form
//   |L_f(x+h) - L_f(x)| < e|h| A(floor(L)+1)
// checked in each direction with the level of its own base point.
// A(q) is read off the sequence as the ratio M_q / M_{q-1}.
// ---------------------------------------------------------------------------
struct FundamentalResiduals {
    double fundamental = kInf;
    std::optional<double> remainder_form;
    std::optional<double> log_form;

    double min_residual() const {
        double m = fundamental;
        if (remainder_form) m = std::min(m, *remainder_form);
        if (log_form) m = std::min(m, *log_form);
        return m;
    }
};

namespace detail {

inline double seq_ratio_up(const LogConvexSequence& seq, long q) {
    // A(q) = M_q / M_{q-1}; +inf beyond a finite table
    if (q > seq.max_index()) {
        if (seq.finite_tail()) return kInf;
        throw std::out_of_range("level " + std::to_string(q) + " beyond sequence");
    }
    return std::exp(seq.log_at(q) - seq.log_at(q - 1));
}

inline double travel_factor(double h, double a) {
    // exp(e |h| A); A may be +inf on a finite-table class, where a zero step
    // must still give factor 1
    if (h == 0.0) return 1.0;
    return std::exp(std::exp(1.0) * std::fabs(h) * a);
}

}  // namespace detail

inline FundamentalResiduals verify_fundamental(const FunctionModel& f,
                                               const LogConvexSequence& seq, double x, double h,
                                               long q) {
    if (!(x >= 0.0 && x <= 1.0 && x + h >= 0.0 && x + h <= 1.0))
        throw std::domain_error("x and x+h must lie in [0,1]");
    if (q < 1 || q > seq.max_index()) throw std::out_of_range("level q out of range");
    const double e = std::exp(1.0);
    const double bx = bang_norm(f, seq, x);
    const double bxh = bang_norm(f, seq, x + h);
    const double aq = detail::seq_ratio_up(seq, q);
    FundamentalResiduals out;
    out.fundamental =
        std::max(bx, std::exp(-static_cast<double>(q))) * detail::travel_factor(h, aq) - bxh;

    const long n = 1;
    if (n + q <= seq.max_index() || seq.finite_tail()) {
        const double bn_x = remainder_norm(f, seq, n, x);
        const double bn_xh = remainder_norm(f, seq, n, x + h);
        const double a_nq = detail::seq_ratio_up(seq, n + q);
        out.remainder_form = std::max(bn_x, std::exp(-static_cast<double>(q + n))) *
                                 detail::travel_factor(h, a_nq) -
                             bn_xh;
    }

    const double lx = log_norm(bx);
    const double lxh = log_norm(bxh);
    if (std::isfinite(lx) && std::isfinite(lxh)) {
        const long qx = std::max(1L, static_cast<long>(std::floor(snap_to_integer(lx))) + 1);
        const long qxh = std::max(1L, static_cast<long>(std::floor(snap_to_integer(lxh))) + 1);
        if (h == 0.0) {
            out.log_form = 0.0;
        } else if ((qx <= seq.max_index() || seq.finite_tail()) &&
                   (qxh <= seq.max_index() || seq.finite_tail())) {
            const double move = e * std::fabs(h);
            const double slack_down = move * detail::seq_ratio_up(seq, qx) - (lx - lxh);
            const double slack_up = move * detail::seq_ratio_up(seq, qxh) - (lxh - lx);
            out.log_form = std::min(slack_down, slack_up);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Level-crossing check: with L the smallest level above max B and N the
// largest level below min B,  sum_{L+1 <= j <= N} M_{j-1}/M_j < e, plus the
// integral form  int_{L_*+1}^{L^*+1} ds/A(s) < e  by adaptive quadrature.
// Grid extrema only tighten both ranges, so a genuine failure cannot be a
// discretization artifact.
// ---------------------------------------------------------------------------
struct LevelCrossingReport {
    long level_low = 0;           // L
    bool n_unbounded = false;     // min B = 0 on the grid
    long level_high = 0;          // N (when bounded)
    bool truncated = false;       // N exceeded the stored sequence
    double ratio_sum = 0.0;
    bool sum_ok = true;
    double integral = 0.0;
    bool integral_ok = true;
    double min_b = 0.0;
    double max_b = 0.0;
};

inline LevelCrossingReport verify_level_crossing(const FunctionModel& f, const Generator& gen,
                                                 const LogConvexSequence& seq, double grid_step) {
    if (!(grid_step > 0.0 && grid_step <= 1e-2 + 1e-15))
        throw std::invalid_argument("grid step must be positive and at most 1e-2");
    const double e = std::exp(1.0);
    const long n_pts = static_cast<long>(std::ceil(1.0 / grid_step));
    double max_b = 0.0, min_b = kInf;
    for (long i = 0; i <= n_pts; ++i) {
        const double x = static_cast<double>(i) / static_cast<double>(n_pts);
        const double b = bang_norm(f, seq, x);
        max_b = std::max(max_b, b);
        min_b = std::min(min_b, b);
    }
    LevelCrossingReport out;
    out.max_b = max_b;
    out.min_b = min_b;
    const double l_star = snap_to_integer(log_norm(max_b));   // min of L_f on the grid
    out.level_low = static_cast<long>(std::ceil(std::max(0.0, l_star)));
    if (min_b == 0.0) {
        out.n_unbounded = true;
        return out;  // vacuous: no finite top level; flagged for review upstream
    }
    const double l_top = snap_to_integer(log_norm(min_b));    // max of L_f on the grid
    out.level_high = static_cast<long>(std::floor(l_top));
    long hi = out.level_high;
    if (hi > seq.max_index() && !seq.finite_tail()) {
        out.truncated = true;
        hi = seq.max_index();
    }
    for (long j = out.level_low + 1; j <= hi; ++j) out.ratio_sum += seq.ratio(j);
    out.sum_ok = out.ratio_sum < e;
    out.integral = integrate([&](double s) { const double a = gen.value(s); return std::isfinite(a) ? 1.0 / a : 0.0; },
                             std::max(0.0, l_star) + 1.0, l_top + 1.0, 1e-9);
    out.integral_ok = out.integral < e;
    return out;
}

// ---------------------------------------------------------------------------
// Pointwise profile of B_f and L_f over a grid (CSV export surface).
// ---------------------------------------------------------------------------
struct BangProfile {
    std::vector<double> grid;
    std::vector<double> b_values;
    std::vector<double> l_values;  // +inf sentinel where B = 0
};

inline BangProfile compute_profile(const FunctionModel& f, const LogConvexSequence& seq,
                                   long points) {
    if (points < 2) throw std::invalid_argument("profile needs at least 2 grid points");
    BangProfile out;
    out.grid.reserve(static_cast<std::size_t>(points));
    for (long i = 0; i < points; ++i) {
        const double x = static_cast<double>(i) / static_cast<double>(points - 1);
        const double b = bang_norm(f, seq, x);
        out.grid.push_back(x);
        out.b_values.push_back(b);
        out.l_values.push_back(log_norm(b));
    }
    return out;
}

}  // namespace qa
