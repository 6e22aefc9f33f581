#pragma once

#include <compare>
#include <limits>
#include <string>

namespace hardy {

/// A real number or +infinity. Used for exponents such as p^* and p_JL that
/// become infinite on whole parameter regions, so interval logic can test
/// infinity explicitly instead of relying on a large float.
class ExtReal {
public:
    constexpr ExtReal() = default;
    constexpr explicit ExtReal(double v) : value_(v) {}

    static constexpr ExtReal infinity() {
        ExtReal r;
        r.infinite_ = true;
        return r;
    }

    constexpr bool is_infinite() const { return infinite_; }
    constexpr bool is_finite() const { return !infinite_; }

    /// Finite value; throws if infinite.
    double value() const;

    /// Finite value, or +inf as an IEEE double for plotting/printing only.
    double as_double() const {
        return infinite_ ? std::numeric_limits<double>::infinity() : value_;
    }

    friend constexpr bool operator==(const ExtReal& a, const ExtReal& b) {
        if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
        return a.value_ == b.value_;
    }

    friend constexpr std::partial_ordering operator<=>(const ExtReal& a, const ExtReal& b) {
        if (a.infinite_ && b.infinite_) return std::partial_ordering::equivalent;
        if (a.infinite_) return std::partial_ordering::greater;
        if (b.infinite_) return std::partial_ordering::less;
        return a.value_ <=> b.value_;
    }

    friend constexpr bool operator==(const ExtReal& a, double b) { return !a.infinite_ && a.value_ == b; }
    friend constexpr std::partial_ordering operator<=>(const ExtReal& a, double b) {
        if (a.infinite_) return std::partial_ordering::greater;
        return a.value_ <=> b;
    }

private:
    double value_ = 0.0;
    bool infinite_ = false;
};

} // namespace hardy
