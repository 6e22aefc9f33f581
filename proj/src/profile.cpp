#include "hardy/profile.hpp"

#include "hardy/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hardy {

const char* to_string(DecayClass d) {
    switch (d) {
    case DecayClass::slow: return "slow";
    case DecayClass::fast: return "fast";
    case DecayClass::unclassified: return "unclassified";
    }
    return "?";
}

double RadialProfile::radius(std::size_t i) const { return std::exp(log_r[i]); }

double RadialProfile::value_at(double t) const {
    const std::size_t n = log_r.size();
    if (n == 0) throw Error(ErrorCode::insufficient_grid, "empty profile");
    const double span_tol = 1e-12 * std::max(1.0, std::abs(t));
    if (t < log_r.front() - span_tol || t > log_r.back() + span_tol) {
        std::ostringstream os;
        os << "log r = " << format_double(t) << " outside profile grid [" << format_double(log_r.front()) << ", "
           << format_double(log_r.back()) << "]";
        throw Error(ErrorCode::insufficient_grid, os.str());
    }
    if (n == 1) return values[0];
    auto it = std::upper_bound(log_r.begin(), log_r.end(), t);
    std::size_t i = it == log_r.begin() ? 0 : std::size_t(it - log_r.begin()) - 1;
    if (i >= n - 1) i = n - 2;
    const double h = log_r[i + 1] - log_r[i];
    const double s = std::clamp((t - log_r[i]) / h, 0.0, 1.0);
    if (s == 0.0) return values[i];
    if (s == 1.0) return values[i + 1];
    if (slopes.size() == n) {
        const double s2 = s * s, s3 = s2 * s;
        const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
        const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
        return h00 * values[i] + h10 * h * slopes[i] + h01 * values[i + 1] + h11 * h * slopes[i + 1];
    }
    return std::exp((1 - s) * std::log(values[i]) + s * std::log(values[i + 1]));
}

void validate_profile(const RadialProfile& pr, std::size_t positive_from) {
    const std::size_t n = pr.log_r.size();
    if (n == 0) throw Error(ErrorCode::validation, "profile has no samples");
    if (pr.values.size() != n) throw Error(ErrorCode::validation, "profile values/grid size mismatch");
    if (!pr.slopes.empty() && pr.slopes.size() != n) {
        throw Error(ErrorCode::validation, "profile slopes/grid size mismatch");
    }
    if (!pr.singular_gap.empty() && pr.singular_gap.size() != n) {
        throw Error(ErrorCode::validation, "profile singular_gap/grid size mismatch");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(pr.log_r[i])) throw Error(ErrorCode::validation, "non-finite log radius");
        if (i > 0 && !(pr.log_r[i] > pr.log_r[i - 1])) {
            throw Error(ErrorCode::validation, "log radius grid must be strictly increasing");
        }
        const bool ok = i >= positive_from ? pr.values[i] > 0.0 : pr.values[i] >= 0.0;
        if (!ok || !std::isfinite(pr.values[i])) {
            std::ostringstream os;
            os << "profile value must be positive and finite (U = " << format_double(pr.values[i]) << " at log r = "
               << format_double(pr.log_r[i]) << ")";
            throw Error(ErrorCode::validation, os.str());
        }
    }
}

RadialProfile profile_from_radii(std::span<const double> r, std::span<const double> u) {
    if (r.size() != u.size()) throw Error(ErrorCode::validation, "radius/value size mismatch");
    RadialProfile pr;
    pr.log_r.reserve(r.size());
    for (double ri : r) {
        if (!(ri > 0.0)) {
            std::ostringstream os;
            os << "profile radius must be positive (got r = " << format_double(ri) << ")";
            throw Error(ErrorCode::validation, os.str());
        }
        pr.log_r.push_back(std::log(ri));
    }
    pr.values.assign(u.begin(), u.end());
    validate_profile(pr);
    return pr;
}

RadialProfile power_law_profile(double coefficient, double exponent, std::span<const double> log_r) {
    RadialProfile pr;
    pr.log_r.assign(log_r.begin(), log_r.end());
    pr.values.resize(log_r.size());
    pr.slopes.resize(log_r.size());
    for (std::size_t i = 0; i < log_r.size(); ++i) {
        pr.values[i] = coefficient * std::exp(exponent * log_r[i]);
        pr.slopes[i] = exponent * pr.values[i];
    }
    return pr;
}

RadialProfile singular_profile(const Params& params, std::span<const double> log_r) {
    RadialProfile pr = power_law_profile(singular_coefficient(params), -params.slow_rate(), log_r);
    pr.singular_gap.assign(log_r.size(), 0.0);
    pr.lambda = ExtReal::infinity();
    pr.decay_class = DecayClass::slow;
    return pr;
}

std::vector<double> uniform_log_grid(double lo, double hi, std::size_t n) {
    if (n < 2 || !(hi > lo)) throw Error(ErrorCode::validation, "uniform_log_grid needs n >= 2 and hi > lo");
    std::vector<double> g(n);
    const double h = (hi - lo) / double(n - 1);
    for (std::size_t i = 0; i < n; ++i) g[i] = lo + h * double(i);
    g.back() = hi;
    return g;
}

std::vector<double> spaced_log_grid(double lo, double hi, double h) {
    if (!(h > 0.0) || !(hi > lo)) throw Error(ErrorCode::validation, "spaced_log_grid needs h > 0 and hi > lo");
    const auto n = std::size_t(std::llround((hi - lo) / h)) + 1;
    std::vector<double> g(std::max<std::size_t>(n, 2));
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = lo + h * double(i);
    return g;
}

} // namespace hardy
