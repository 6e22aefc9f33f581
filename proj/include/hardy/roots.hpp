#pragma once

#include <cmath>
#include <utility>

namespace hardy {

/// Brent's method on a bracket [a, b] with f(a), f(b) of opposite sign (or one
/// of them zero). Stops when |f| <= ftol or the bracket shrinks below xtol.
template <class F>
double brent_root(F&& f, double a, double b, double ftol, double xtol = 0.0, int max_iter = 200) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (std::abs(fa) < std::abs(fb)) {
        std::swap(a, b);
        std::swap(fa, fb);
    }
    double c = a, fc = fa, d = b - a;
    bool bisected = true;
    for (int it = 0; it < max_iter; ++it) {
        if (std::abs(fb) <= ftol) return b;
        const double tol = xtol + 4.0 * 2.220446049250313e-16 * std::abs(b);
        if (std::abs(b - a) <= tol) return b;

        double s;
        if (fa != fc && fb != fc) {
            // inverse quadratic interpolation
            s = a * fb * fc / ((fa - fb) * (fa - fc)) + b * fa * fc / ((fb - fa) * (fb - fc)) +
                c * fa * fb / ((fc - fa) * (fc - fb));
        } else {
            s = b - fb * (b - a) / (fb - fa);
        }
        const double lo = (3.0 * a + b) / 4.0;
        const bool outside = !((s > std::min(lo, b) && s < std::max(lo, b)));
        const bool slow = bisected ? std::abs(s - b) >= std::abs(b - c) / 2.0
                                   : std::abs(s - b) >= std::abs(c - d) / 2.0;
        const bool tiny = bisected ? std::abs(b - c) < tol : std::abs(c - d) < tol;
        if (outside || slow || tiny) {
            s = 0.5 * (a + b);
            bisected = true;
        } else {
            bisected = false;
        }
        const double fs = f(s);
        d = c;
        c = b;
        fc = fb;
        if ((fa < 0.0) != (fs < 0.0)) {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if (std::abs(fa) < std::abs(fb)) {
            std::swap(a, b);
            std::swap(fa, fb);
        }
    }
    return b;
}

} // namespace hardy
