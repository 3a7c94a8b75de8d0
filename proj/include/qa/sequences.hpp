#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qa/numeric.hpp"

namespace qa {

// ---------------------------------------------------------------------------
// Generator: a non-decreasing function A on [1, inf) producing the majorant
// sequence M_j = M_{j-1} A(j).  Tabulated generators are finite tables
// A(1..J) extended by +inf beyond the table (finite smoothness).
// ---------------------------------------------------------------------------
class Generator {
  public:
    enum class Kind { analytic, logarithmic, constant_ratio, tabulated };

    static Generator analytic(double scale) {
        require(scale > 0.0, "analytic generator needs scale C > 0");
        Generator g(Kind::analytic);
        g.c_ = scale;
        return g;
    }

    static Generator logarithmic(double scale, double alpha) {
        require(scale > 0.0, "logarithmic generator needs scale C > 0");
        require(alpha >= 0.0, "logarithmic generator needs alpha >= 0");
        Generator g(Kind::logarithmic);
        g.c_ = scale;
        g.alpha_ = alpha;
        return g;
    }

    static Generator constant_ratio(double a) {
        require(a > 0.0, "constant-ratio generator needs a > 0");
        Generator g(Kind::constant_ratio);
        g.c_ = a;
        return g;
    }

    static Generator tabulated(std::vector<double> values) {
        require(!values.empty(), "tabulated generator needs at least one value");
        for (std::size_t i = 0; i < values.size(); ++i) {
            require(values[i] > 0.0, "tabulated generator values must be positive");
            require(i == 0 || values[i] >= values[i - 1],
                    "tabulated generator values must be non-decreasing");
        }
        Generator g(Kind::tabulated);
        g.table_ = std::move(values);
        return g;
    }

    Kind kind() const { return kind_; }
    double scale() const { return c_; }
    double alpha() const { return alpha_; }
    const std::vector<double>& table() const { return table_; }
    bool finite_smoothness() const { return kind_ == Kind::tabulated; }

    // A(s) for real s >= 1.  Tabulated tables are interpolated piecewise
    // linearly on [1, J] and are +inf beyond J.
    double value(double s) const {
        if (!(s >= 1.0)) throw std::domain_error("generator argument must be >= 1");
        switch (kind_) {
            case Kind::analytic: return c_ * s;
            case Kind::logarithmic: return c_ * s * std::pow(std::log(s + kE), alpha_);
            case Kind::constant_ratio: return c_;
            case Kind::tabulated: {
                const double j_max = static_cast<double>(table_.size());
                if (s > j_max) return kInf;
                if (table_.size() == 1) return table_[0];
                const auto seg = static_cast<std::size_t>(std::min(s - 1.0, j_max - 2.0));
                const double t = s - 1.0 - static_cast<double>(seg);
                return table_[seg] + t * (table_[seg + 1] - table_[seg]);
            }
        }
        return kInf;
    }

    double log_value_at(long j) const {
        if (j < 1) throw std::domain_error("generator index must be >= 1");
        switch (kind_) {
            case Kind::analytic:
                return std::log(c_) + std::log(static_cast<double>(j));
            case Kind::logarithmic:
                return std::log(c_) + std::log(static_cast<double>(j)) +
                       alpha_ * std::log(std::log(static_cast<double>(j) + kE));
            case Kind::constant_ratio:
                return std::log(c_);
            case Kind::tabulated:
                if (static_cast<std::size_t>(j) > table_.size())
                    throw std::out_of_range("index " + std::to_string(j) +
                                            " exceeds tabulated generator of length " +
                                            std::to_string(table_.size()));
                return std::log(table_[static_cast<std::size_t>(j) - 1]);
        }
        return kInf;
    }

    // s A'(s) / A(s) with the closed-form derivative where one exists; for
    // tabulated generators the left derivative of the linear interpolant.
    double log_derivative_ratio(double s) const {
        switch (kind_) {
            case Kind::analytic: return 1.0;
            case Kind::constant_ratio: return 0.0;
            case Kind::logarithmic: {
                const double l = std::log(s + kE);
                return 1.0 + alpha_ * s / ((s + kE) * l);
            }
            case Kind::tabulated: {
                if (table_.size() < 2) return 0.0;
                const double j_max = static_cast<double>(table_.size());
                const double sc = std::min(s, j_max);
                // left derivative: the slope of the segment ending at sc
                auto seg = static_cast<std::size_t>(std::ceil(sc - 1.0)) ;
                if (seg >= 1) --seg; else seg = 0;
                seg = std::min(seg, table_.size() - 2);
                const double slope = table_[seg + 1] - table_[seg];
                return sc * slope / value(sc);
            }
        }
        return 0.0;
    }

  private:
    static constexpr double kE = 2.718281828459045235360287471352662498;
    static void require(bool ok, const char* msg) {
        if (!ok) throw std::invalid_argument(msg);
    }
    explicit Generator(Kind k) : kind_(k) {}

    Kind kind_;
    double c_ = 1.0;
    double alpha_ = 0.0;
    std::vector<double> table_;
};

// ---------------------------------------------------------------------------
// LogConvexSequence: the majorant sequence {M_j} stored in the log domain.
// ---------------------------------------------------------------------------

inline bool is_log_convex(std::span<const double> values, double tol) {
    if (tol < 0.0) throw std::domain_error("tolerance must be non-negative");
    std::vector<double> lg(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 0.0)) throw std::domain_error("sequence values must be positive");
        lg[i] = std::log(values[i]);
    }
    for (std::size_t j = 1; j + 1 < lg.size(); ++j)
        if (2.0 * lg[j] > lg[j - 1] + lg[j + 1] + tol) return false;
    return true;
}

inline bool is_log_convex_logs(std::span<const double> log_values, double tol) {
    for (std::size_t j = 1; j + 1 < log_values.size(); ++j)
        if (2.0 * log_values[j] > log_values[j - 1] + log_values[j + 1] + tol) return false;
    return true;
}

class LogConvexSequence {
  public:
    // log_values[j] = log M_j.  finite_tail marks sequences whose generator is
    // a finite table: ratios M_{j-1}/M_j are exactly 0 beyond the stored range.
    static LogConvexSequence from_log_values(std::vector<double> log_values,
                                             bool finite_tail = false) {
        if (log_values.empty())
            throw std::invalid_argument("sequence must have at least one entry");
        if (!is_log_convex_logs(log_values, kLogConvexTol))
            throw std::invalid_argument("sequence is not log-convex within tolerance");
        return LogConvexSequence(std::move(log_values), finite_tail);
    }

    static LogConvexSequence from_values(std::span<const double> values,
                                         bool finite_tail = false) {
        std::vector<double> lg(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (!(values[i] > 0.0)) throw std::domain_error("sequence values must be positive");
            lg[i] = std::log(values[i]);
        }
        return from_log_values(std::move(lg), finite_tail);
    }

    std::size_t size() const { return log_m_.size(); }
    long max_index() const { return static_cast<long>(log_m_.size()) - 1; }
    bool normalized() const { return log_m_[0] == 0.0; }
    bool finite_tail() const { return finite_tail_; }
    const std::vector<double>& log_values() const { return log_m_; }

    double log_at(long j) const {
        check_index(j);
        return log_m_[static_cast<std::size_t>(j)];
    }

    double value_at(long j) const { return std::exp(log_at(j)); }

    // M_{j-1} / M_j; exactly 0 beyond a finite-tail sequence.
    double ratio(long j) const {
        if (j < 1) throw std::out_of_range("ratio index must be >= 1");
        if (j > max_index()) {
            if (finite_tail_) return 0.0;
            throw std::out_of_range("ratio index " + std::to_string(j) +
                                    " beyond sequence of length " + std::to_string(size()));
        }
        return std::exp(log_m_[static_cast<std::size_t>(j - 1)] -
                        log_m_[static_cast<std::size_t>(j)]);
    }

  private:
    LogConvexSequence(std::vector<double> lg, bool finite_tail)
        : log_m_(std::move(lg)), finite_tail_(finite_tail) {}
    void check_index(long j) const {
        if (j < 0 || j > max_index())
            throw std::out_of_range("sequence index " + std::to_string(j) + " out of range");
    }

    std::vector<double> log_m_;
    bool finite_tail_;
};

// M_0 = 1, log M_j = log M_{j-1} + log A(j).  count is the total number of
// entries, M_0 .. M_{count-1}.
inline LogConvexSequence from_generator(const Generator& gen, long count) {
    if (count < 1) throw std::invalid_argument("sequence length must be >= 1");
    if (gen.kind() == Generator::Kind::tabulated &&
        static_cast<std::size_t>(count - 1) > gen.table().size())
        throw std::out_of_range("requested " + std::to_string(count) +
                                " entries but tabulated generator supplies only " +
                                std::to_string(gen.table().size() + 1));
    std::vector<double> lg(static_cast<std::size_t>(count));
    lg[0] = 0.0;
    for (long j = 1; j < count; ++j)
        lg[static_cast<std::size_t>(j)] = lg[static_cast<std::size_t>(j - 1)] + gen.log_value_at(j);
    return LogConvexSequence::from_log_values(std::move(lg), gen.finite_smoothness());
}

// Sum of M_{j-1}/M_j over lo <= j <= hi, accumulated left to right.
inline double quasianalytic_sum(const LogConvexSequence& seq, long lo, long hi) {
    if (lo < 1 || lo > hi) throw std::out_of_range("invalid summation range");
    if (hi > seq.max_index() && !seq.finite_tail())
        throw std::out_of_range("summation range beyond sequence");
    double acc = 0.0;
    for (long j = lo; j <= hi; ++j) acc += seq.ratio(j);
    return acc;
}

// ---------------------------------------------------------------------------
// Largest log-convex minorant via the monotone-chain lower hull of the
// points (j, log M_j).  The contact set is the set of indices where the
// minorant equals the input (within kLogConvexTol in the log domain).
// ---------------------------------------------------------------------------
struct MinorantResult {
    LogConvexSequence minorant;
    std::vector<long> contact_set;
};

inline std::vector<double> lower_hull_logs(std::span<const double> lg) {
    const long n = static_cast<long>(lg.size());
    std::vector<long> hull;
    hull.reserve(lg.size());
    auto cross = [&](long a, long b, long c) {
        return static_cast<double>(b - a) * (lg[static_cast<std::size_t>(c)] - lg[static_cast<std::size_t>(a)]) -
               (lg[static_cast<std::size_t>(b)] - lg[static_cast<std::size_t>(a)]) * static_cast<double>(c - a);
    };
    for (long j = 0; j < n; ++j) {
        while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), j) <= 0.0)
            hull.pop_back();
        hull.push_back(j);
    }
    std::vector<double> out(lg.size());
    for (std::size_t v = 0; v + 1 < hull.size(); ++v) {
        const long a = hull[v], b = hull[v + 1];
        const double ya = lg[static_cast<std::size_t>(a)], yb = lg[static_cast<std::size_t>(b)];
        for (long j = a; j < b; ++j)
            out[static_cast<std::size_t>(j)] =
                ya + (yb - ya) * static_cast<double>(j - a) / static_cast<double>(b - a);
    }
    out.back() = lg.back();
    return out;
}

inline MinorantResult log_convex_minorant(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("minorant of empty sequence");
    std::vector<double> lg(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 0.0)) throw std::domain_error("sequence values must be positive");
        lg[i] = std::log(values[i]);
    }
    std::vector<double> hull = lower_hull_logs(lg);
    std::vector<long> contact;
    for (std::size_t j = 0; j < lg.size(); ++j)
        if (std::fabs(hull[j] - lg[j]) <= kLogConvexTol * std::max(1.0, std::fabs(lg[j])))
            contact.push_back(static_cast<long>(j));
    return MinorantResult{LogConvexSequence::from_log_values(std::move(hull)), std::move(contact)};
}

// ---------------------------------------------------------------------------
// Regularity quantities gamma(n) = sup_{1<=s<=n} s A'(s)/A(s) and
// Gamma = 4 e^{4+gamma} (or 4 e^{4+(2/e)gamma} in the scaled variant).
// ---------------------------------------------------------------------------

inline double gamma_sup(const Generator& gen, double n) {
    if (!(n >= 1.0)) throw std::domain_error("gamma_sup needs n >= 1");
    switch (gen.kind()) {
        case Generator::Kind::analytic: return 1.0;
        case Generator::Kind::constant_ratio: return 0.0;
        case Generator::Kind::logarithmic: {
            if (gen.alpha() == 0.0) return 1.0;
            // single interior extremum of s/((s+e) log(s+e)); dense scan plus
            // golden-section refinement resolves it to ~1e-9
            auto ratio = [&](double s) { return gen.log_derivative_ratio(s); };
            return scan_max(ratio, 1.0, n, 1e-3, 1e-11);
        }
        case Generator::Kind::tabulated: {
            const double hi = std::min(n, static_cast<double>(gen.table().size()));
            auto ratio = [&](double s) { return gen.log_derivative_ratio(s); };
            if (hi <= 1.0) return ratio(1.0);
            return scan_max(ratio, 1.0, hi, 1e-3, 1e-11);
        }
    }
    return 0.0;
}

// Supremum of s A'(s)/A(s) over the whole half-line, for regular generators.
// The built-in kinds have a single interior maximum (logarithmic) or are
// constant, so a bounded scan captures the global value.
inline double gamma_global(const Generator& gen) {
    switch (gen.kind()) {
        case Generator::Kind::analytic: return 1.0;
        case Generator::Kind::constant_ratio: return 0.0;
        case Generator::Kind::logarithmic: return gamma_sup(gen, 1024.0);
        case Generator::Kind::tabulated:
            return gamma_sup(gen, static_cast<double>(gen.table().size()));
    }
    return 0.0;
}

enum class GammaVariant {
    plain,       // exponent 4 + gamma
    two_over_e,  // exponent 4 + (2/e) gamma
};

inline double big_gamma(double gamma_value, GammaVariant variant = GammaVariant::plain) {
    if (!(gamma_value >= 0.0)) throw std::domain_error("gamma must be non-negative");
    const double scaled =
        variant == GammaVariant::plain ? gamma_value : (2.0 / std::exp(1.0)) * gamma_value;
    return 4.0 * std::exp(4.0 + scaled);
}

// log m_j = log M_j - log j!  (factorial-normalized view).  Defined for any
// positive sequence; log-convexity is not required.
inline std::vector<double> factorial_normalized_logs(std::span<const double> log_values) {
    std::vector<double> out(log_values.size());
    double log_fact = 0.0;
    for (std::size_t j = 0; j < log_values.size(); ++j) {
        if (j > 0) log_fact += std::log(static_cast<double>(j));
        out[j] = log_values[j] - log_fact;
    }
    return out;
}

inline std::vector<double> factorial_normalized(const LogConvexSequence& seq) {
    return factorial_normalized_logs(seq.log_values());
}

}  // namespace qa
