#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "qa/numeric.hpp"

namespace qa {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double length() const { return hi - lo; }
    double midpoint() const { return 0.5 * (lo + hi); }
    bool contains(double x) const { return x >= lo && x <= hi; }
};

// A finite union of disjoint closed subintervals of [0,1].
class IntervalSet {
  public:
    explicit IntervalSet(std::vector<Interval> parts) : parts_(std::move(parts)) {
        if (parts_.empty()) throw std::invalid_argument("interval set must be non-empty");
        double total = 0.0;
        for (std::size_t i = 0; i < parts_.size(); ++i) {
            const auto& p = parts_[i];
            if (!(p.lo <= p.hi))
                throw std::invalid_argument("interval endpoints out of order");
            if (p.lo < 0.0 || p.hi > 1.0)
                throw std::invalid_argument("interval set must lie within [0,1]");
            if (i > 0 && !(parts_[i - 1].hi < p.lo))
                throw std::invalid_argument("interval set components must be disjoint and sorted");
            total += p.length();
        }
        if (!(total > 0.0)) throw std::invalid_argument("interval set must have positive measure");
        measure_ = total;
    }

    const std::vector<Interval>& parts() const { return parts_; }
    double measure() const { return measure_; }
    double min() const { return parts_.front().lo; }
    double max() const { return parts_.back().hi; }

    double smallest_component_length() const {
        double m = kInf;
        for (const auto& p : parts_) m = std::min(m, p.length());
        return m;
    }

    // Lebesgue measure of the intersection with [i.lo, i.hi].
    double measure_in(const Interval& i) const {
        double total = 0.0;
        for (const auto& p : parts_) {
            const double lo = std::max(p.lo, i.lo);
            const double hi = std::min(p.hi, i.hi);
            if (hi > lo) total += hi - lo;
        }
        return total;
    }

    bool subset_of(const Interval& i, double slack = 1e-12) const {
        return min() >= i.lo - slack && max() <= i.hi + slack;
    }

  private:
    std::vector<Interval> parts_;
    double measure_ = 0.0;
};

inline IntervalSet full_interval_set() { return IntervalSet({Interval{0.0, 1.0}}); }

}  // namespace qa
