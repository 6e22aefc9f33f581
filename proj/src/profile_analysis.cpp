#include "hardy/profile_analysis.hpp"

#include "hardy/error.hpp"
#include "hardy/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace hardy {

namespace {

constexpr double kDecade = std::numbers::ln10;

std::size_t decade_start(const std::vector<double>& t, bool from_end) {
    if (from_end) {
        const double lo = t.back() - kDecade;
        return std::size_t(std::lower_bound(t.begin(), t.end(), lo - 1e-12) - t.begin());
    }
    const double hi = t.front() + kDecade;
    return std::size_t(std::upper_bound(t.begin(), t.end(), hi + 1e-12) - t.begin());
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms = 0.0;
};

LineFit fit_log_slope(const RadialProfile& pr, std::size_t lo, std::size_t hi) {
    const double n = double(hi - lo);
    double mt = 0.0, my = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
        mt += pr.log_r[i];
        my += std::log(pr.values[i]);
    }
    mt /= n;
    my /= n;
    double stt = 0.0, sty = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
        const double dt = pr.log_r[i] - mt;
        stt += dt * dt;
        sty += dt * (std::log(pr.values[i]) - my);
    }
    LineFit f;
    f.slope = stt > 0.0 ? sty / stt : 0.0;
    f.intercept = my - f.slope * mt;
    double ss = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
        const double r = std::log(pr.values[i]) - (f.intercept + f.slope * pr.log_r[i]);
        ss += r * r;
    }
    f.rms = std::sqrt(ss / n);
    return f;
}

// w = U r^{2/(p-1)}, through the stored gap when available
std::vector<double> fowler_values(const RadialProfile& pr, const Params& params) {
    const double a = params.slow_rate();
    std::vector<double> w(pr.size());
    const bool gap = pr.singular_gap.size() == pr.size() && params.gamma > 0.0;
    const double c = gap ? singular_coefficient(params) : 0.0;
    for (std::size_t i = 0; i < pr.size(); ++i) {
        w[i] = gap ? c + pr.singular_gap[i] : pr.values[i] * std::exp(a * pr.log_r[i]);
    }
    return w;
}

std::vector<double> trapezoid_weights(const std::vector<double>& t, std::size_t lo, std::size_t hi) {
    std::vector<double> w(hi - lo, 0.0);
    for (std::size_t i = lo; i + 1 < hi; ++i) {
        const double h = 0.5 * (t[i + 1] - t[i]);
        w[i - lo] += h;
        w[i + 1 - lo] += h;
    }
    return w;
}

} // namespace

const char* to_string(ProfileEnd e) { return e == ProfileEnd::origin ? "origin" : "infinity"; }

const char* to_string(StabilityVerdict v) {
    switch (v) {
    case StabilityVerdict::certified_stable: return "certified_stable";
    case StabilityVerdict::witness_unstable: return "witness_unstable";
    case StabilityVerdict::inconclusive: return "inconclusive";
    }
    return "?";
}

DecayFit classify_decay(const RadialProfile& pr, const Params& params) {
    validate_profile(pr, pr.log_r.empty() ? 0 : decade_start(pr.log_r, true));
    if (pr.log_r.back() - pr.log_r.front() < 2.0 * kDecade - 1e-9) {
        throw Error(ErrorCode::insufficient_grid, "decay classification needs a tail spanning two decades of r");
    }
    const std::size_t lo = decade_start(pr.log_r, true);
    const std::size_t hi = pr.size();
    if (hi - lo < 3) throw Error(ErrorCode::insufficient_grid, "fewer than three samples in the last decade");

    const LineFit f = fit_log_slope(pr, lo, hi);
    DecayFit out;
    out.fitted_exponent = f.slope;
    out.fit_residual = f.rms;
    out.window_lo = std::exp(pr.log_r[lo]);
    out.window_hi = std::exp(pr.log_r.back());
    out.candidate_slow = -params.slow_rate();
    out.candidate_fast = -params.nu_star - params.nu;

    constexpr double rel = 0.05, max_rms = 1e-2;
    const double ds = std::abs(f.slope - out.candidate_slow), df = std::abs(f.slope - out.candidate_fast);
    const bool slow_ok = ds < rel * std::abs(out.candidate_slow);
    const bool fast_ok = df < rel * std::abs(out.candidate_fast);
    if (f.rms < max_rms && (slow_ok || fast_ok)) {
        out.classification = (slow_ok && (!fast_ok || ds <= df)) ? DecayClass::slow : DecayClass::fast;
    }
    if (out.classification == DecayClass::slow) {
        out.limit_constant = fowler_values(pr, params).back();
    } else if (out.classification == DecayClass::fast) {
        out.limit_constant = pr.values.back() * std::exp(-out.candidate_fast * pr.log_r.back());
    }
    return out;
}

PhragmenReport phragmen_check(const RadialProfile& pr, const Params& params, ProfileEnd location) {
    validate_profile(pr);
    PhragmenReport rep;
    rep.location = location;
    rep.lower = -params.nu_star - params.nu;
    rep.upper = -params.nu_star + params.nu;
    std::size_t lo = 0, hi = pr.size();
    if (location == ProfileEnd::infinity) {
        lo = decade_start(pr.log_r, true);
    } else {
        hi = decade_start(pr.log_r, false);
    }
    if (hi - lo < 2) {
        rep.message = "fewer than two samples in the end decade";
        return rep;
    }
    rep.fitted_exponent = fit_log_slope(pr, lo, hi).slope;
    const double tol = 1e-3 * std::max(1.0, params.nu_star + params.nu);
    const bool below = rep.fitted_exponent < rep.lower - tol;
    const bool above = rep.fitted_exponent > rep.upper + tol;
    rep.pass = !below && !above;
    if (rep.pass) {
        rep.message = "log-slope inside the admissible exponent interval";
        return rep;
    }
    // the extreme end sample is where the offending power grows or decays most
    const std::size_t w = location == ProfileEnd::infinity ? hi - 1 : lo;
    rep.witness_index = w;
    rep.witness_log_r = pr.log_r[w];
    const double e = below ? -rep.lower : -rep.upper;
    rep.witness_value = pr.values[w] * std::exp(e * pr.log_r[w]);
    rep.message = std::string(below ? "U r^{nu_*+nu}" : "U r^{nu_*-nu}") + " degenerates at the " +
                  to_string(location) + ": log-slope " + format_double(rep.fitted_exponent) + " outside [" +
                  format_double(rep.lower) + ", " + format_double(rep.upper) + "]";
    return rep;
}

StabilityWitness witness_form(const RadialProfile& pr, const Params& params, double t0, double length) {
    if (!(length > 2.0)) throw Error(ErrorCode::validation, "annulus length must exceed both ramps");
    const double t1 = t0 + length;
    if (t0 < pr.log_r.front() - 1e-12 || t1 > pr.log_r.back() + 1e-12) {
        throw Error(ErrorCode::insufficient_grid, "annulus exceeds the profile grid");
    }
    const std::size_t lo = std::size_t(std::lower_bound(pr.log_r.begin(), pr.log_r.end(), t0 - 1e-12) - pr.log_r.begin());
    const std::size_t hi = std::size_t(std::upper_bound(pr.log_r.begin(), pr.log_r.end(), t1 + 1e-12) - pr.log_r.begin());
    const std::vector<double> w = fowler_values(pr, params);
    const std::size_t n = hi - lo;
    std::vector<double> g(n), coef(n);
    const double nu2 = params.nu * params.nu;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = pr.log_r[lo + k];
        g[k] = std::clamp(std::min(t - t0, t1 - t), 0.0, 1.0);
        const double v = params.p * std::exp((params.p - 1.0) * std::log(w[lo + k]));
        coef[k] = (nu2 - v) * g[k];
    }
    const std::vector<double> tw = trapezoid_weights(pr.log_r, lo, hi);
    double grad = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double h = pr.log_r[lo + k + 1] - pr.log_r[lo + k];
        const double d = (g[k + 1] - g[k]) / h;
        grad += d * d * h;
    }
    const auto& kt = kernels::active();
    StabilityWitness out;
    out.r_inner = std::exp(t0);
    out.r_outer = std::exp(t1);
    out.length = length;
    out.quadratic_form = grad + kt.weighted_dot(coef.data(), g.data(), tw.data(), n);
    out.weight = kt.weighted_dot(g.data(), g.data(), tw.data(), n);
    return out;
}

StabilityCertificate stability_certificate(const RadialProfile& pr, const Params& params) {
    validate_profile(pr);
    const std::vector<double> w = fowler_values(pr, params);
    StabilityCertificate cert;
    double sup = 0.0;
    for (double wi : w) sup = std::max(sup, params.p * std::exp((params.p - 1.0) * std::log(wi)));
    cert.sup_potential = sup;
    const double nu2 = params.nu * params.nu;
    const std::size_t lo = decade_start(pr.log_r, true);
    double inf = sup;
    for (std::size_t i = lo; i < pr.size(); ++i) inf = std::min(inf, params.p * std::exp((params.p - 1.0) * std::log(w[i])));
    cert.tail_liminf = inf;
    if (sup <= nu2 + 1e-12 * std::max(1.0, nu2)) {
        cert.verdict = StabilityVerdict::certified_stable;
        return cert;
    }
    if (!(inf >= nu2 + 1e-9 * std::max(1.0, nu2))) return cert;

    const double span = pr.log_r.back() - pr.log_r.front();
    for (double L = 5.0; L <= span; L *= 2.0) {
        StabilityWitness sw = witness_form(pr, params, pr.log_r.back() - L, L);
        cert.witness = sw;
        if (sw.quadratic_form < 0.0) {
            cert.verdict = StabilityVerdict::witness_unstable;
            return cert;
        }
    }
    return cert;
}

SignChanges tail_sign_changes(const RadialProfile& a, const RadialProfile& b, double R, const Params* params) {
    validate_profile(a);
    validate_profile(b);
    if (!(R > 0.0)) throw Error(ErrorCode::validation, "R must be positive");
    const double tR = std::log(R);
    const double lo = std::max({tR, a.log_r.front(), b.log_r.front()});
    const double hi = std::min(a.log_r.back(), b.log_r.back());
    double need = 0.0;
    if (params && params->gamma > 0.0) {
        const double disc = params->beta * params->beta - (params->p - 1.0) * params->gamma;
        if (disc < 0.0) need = std::numbers::pi / std::sqrt(-disc);
    }
    if (!(hi > lo) || hi - lo < need) {
        throw Error(ErrorCode::insufficient_grid, "profile overlap beyond R is shorter than one spiral period");
    }
    const bool same_grid = a.log_r == b.log_r;
    const bool use_gap = same_grid && params && params->gamma > 0.0 && a.singular_gap.size() == a.size() &&
                         b.singular_gap.size() == b.size();
    const double c = use_gap ? singular_coefficient(*params) : 0.0;

    SignChanges out;
    int prev_sign = 0;
    double prev_t = 0.0, prev_d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double t = a.log_r[i];
        if (t <= tR || t < lo || t > hi) continue;
        double d, mag;
        if (use_gap) {
            d = a.singular_gap[i] - b.singular_gap[i];
            mag = std::max(std::abs(c + a.singular_gap[i]), std::abs(c + b.singular_gap[i]));
        } else {
            const double ub = same_grid ? b.values[i] : b.value_at(t);
            d = a.values[i] - ub;
            mag = std::max(std::abs(a.values[i]), std::abs(ub));
        }
        if (std::abs(d) <= 1e-12 * mag) continue;
        const int s = d > 0.0 ? 1 : -1;
        if (prev_sign != 0 && s != prev_sign) {
            ++out.count;
            out.log_r.push_back(prev_t + (t - prev_t) * prev_d / (prev_d - d));
        }
        prev_sign = s;
        prev_t = t;
        prev_d = d;
    }
    return out;
}

double radial_residual(const RadialProfile& pr, const Params& params) {
    validate_profile(pr);
    const std::size_t n = pr.size();
    if (pr.slopes.size() != n) throw Error(ErrorCode::validation, "residual needs profile slopes");
    if (n < 5) throw Error(ErrorCode::insufficient_grid, "residual needs at least five samples");
    const double h = (pr.log_r.back() - pr.log_r.front()) / double(n - 1);
    for (std::size_t i = 1; i < n; ++i) {
        if (std::abs(pr.log_r[i] - pr.log_r[i - 1] - h) > 1e-9 * h) {
            throw Error(ErrorCode::validation, "residual needs a uniform log grid");
        }
    }
    std::vector<double> utt(n, 0.0), g(n);
    const auto& kt = kernels::active();
    kt.deriv5(pr.slopes.data(), utt.data(), n, 1.0 / (12.0 * h));
    for (std::size_t i = 0; i < n; ++i) g[i] = std::exp(2.0 * pr.log_r[i] + params.p * std::log(pr.values[i]));
    return kt.residual_ratio_max(pr.values.data() + 2, pr.slopes.data() + 2, utt.data() + 2, g.data() + 2, n - 4,
                                 2.0 * params.nu_star, params.mu, params.nu * params.nu);
}

double singular_residual(const Params& params, const std::vector<double>& log_r) {
    const double c = singular_coefficient(params), a = params.slow_rate();
    const std::size_t n = log_r.size();
    std::vector<double> u(n), ut(n), utt(n), g(n);
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = c * std::exp(-a * log_r[i]);
        ut[i] = -a * u[i];
        utt[i] = a * a * u[i];
        g[i] = std::exp(2.0 * log_r[i] + params.p * std::log(u[i]));
    }
    return kernels::active().residual_ratio_max(u.data(), ut.data(), utt.data(), g.data(), n, 2.0 * params.nu_star,
                                                params.mu, params.nu * params.nu);
}

} // namespace hardy
