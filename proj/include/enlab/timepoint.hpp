// timepoint.hpp — points of the extended half-line [0, inf].
#pragma once

#include <compare>
#include <string>

#include "enlab/rational.hpp"

namespace enlab {

struct TimePoint {
    bool infinite = false;
    Rational t;     // meaningful only when finite

    TimePoint() = default;
    static TimePoint inf() { TimePoint p; p.infinite = true; return p; }
    static TimePoint at(Rational v) { TimePoint p; p.t = std::move(v); return p; }
    static TimePoint at(long long v) { return at(Rational(v)); }

    bool is_finite() const { return !infinite; }

    bool operator==(const TimePoint& o) const {
        if (infinite != o.infinite) return false;
        return infinite || t == o.t;
    }
    std::strong_ordering operator<=>(const TimePoint& o) const {
        if (infinite && o.infinite) return std::strong_ordering::equal;
        if (infinite) return std::strong_ordering::greater;
        if (o.infinite) return std::strong_ordering::less;
        return t <=> o.t;
    }

    std::string to_string() const { return infinite ? "inf" : t.to_string(); }
    static TimePoint parse(std::string_view s) {
        if (s == "inf" || s == "Inf" || s == "infinity") return inf();
        return at(Rational::parse(s));
    }
};

} // namespace enlab
