#include "hardy/exponent_atlas.hpp"

#include "hardy/error.hpp"
#include "hardy/roots.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hardy {

namespace {

std::string describe(const char* name, double got, const char* bound) {
    std::ostringstream os;
    os << name << " must be " << bound << " (got " << format_double(got) << ")";
    return os.str();
}

} // namespace

void check_dimension_pair(int N, double nu) {
    if (N < 3) {
        throw Error(ErrorCode::validation, "N must be >= 3 (got " + std::to_string(N) + ")");
    }
    if (!(nu > 0.0) || !std::isfinite(nu)) {
        throw Error(ErrorCode::validation, describe("nu", nu, "> 0"));
    }
}

Params make_params(int N, double nu, double p) {
    check_dimension_pair(N, nu);
    if (!(p > 1.0) || !std::isfinite(p)) {
        throw Error(ErrorCode::validation, describe("p", p, "> 1"));
    }
    Params out;
    out.N = N;
    out.nu = nu;
    out.p = p;
    out.nu_star = 0.5 * (N - 2);
    out.mu = nu * nu - out.nu_star * out.nu_star;
    out.beta = out.nu_star - 2.0 / (p - 1.0);
    out.gamma = nu * nu - out.beta * out.beta;
    return out;
}

double singular_coefficient(const Params& params) {
    const ExponentBounds b = exponent_bounds(params.N, params.nu);
    if (!(params.p > b.p_lower && b.p_upper > params.p) || !(params.gamma > 0.0)) {
        std::ostringstream os;
        os << "U_inf does not exist: p = " << format_double(params.p) << " is outside (p_*, p^*), C^{p-1} = "
           << format_double(params.gamma);
        throw Error(ErrorCode::range, os.str());
    }
    return std::pow(params.gamma, 1.0 / (params.p - 1.0));
}

ExponentBounds exponent_bounds(int N, double nu) {
    check_dimension_pair(N, nu);
    const double ns = 0.5 * (N - 2);
    ExponentBounds b;
    b.p_lower = 1.0 + 2.0 / (ns + nu);
    b.p_sobolev = double(N + 2) / double(N - 2);
    b.p_upper = nu < ns ? ExtReal(1.0 + 2.0 / (ns - nu)) : ExtReal::infinity();
    return b;
}

double theta(double s, double nu_star) {
    const double a = s + nu_star;
    return a * a * (s - 2.0);
}

double theta_min_location(double nu_star) { return -(nu_star - 4.0) / 3.0; }

const char* to_string(RootCase c) {
    switch (c) {
    case RootCase::low_dim_no_root: return "low_dim_no_root";
    case RootCase::low_dim_one_root: return "low_dim_one_root";
    case RootCase::high_dim_no_root: return "high_dim_no_root";
    case RootCase::high_dim_two_roots: return "high_dim_two_roots";
    case RootCase::high_dim_one_root: return "high_dim_one_root";
    }
    return "?";
}

ThetaRoots theta_roots(int N, double nu) {
    check_dimension_pair(N, nu);
    const double ns = 0.5 * (N - 2);
    const double target = 2.0 * nu * nu;
    const auto f = [&](double s) { return theta(s, ns) + target; };
    const double ftol = 0.0;

    ThetaRoots r;
    // θ increases on (-inf, -nu_*): f(-nu_*-nu) = -nu^2 (nu_*+nu) < 0 < 2 nu^2 = f(-nu_*)
    r.sigma_sharp = brent_root(f, -ns - nu, -ns, ftol);

    const double s_min = theta_min_location(ns);
    if (N <= 10) {
        // θ decreases on (-nu_*, 0] since s_min >= 0
        if (nu >= ns) {
            r.root_case = RootCase::low_dim_no_root;
        } else {
            r.root_case = RootCase::low_dim_one_root;
            r.sigma_minus = brent_root(f, -ns, -ns + nu, ftol);
        }
        return r;
    }

    if (nu <= ns) {
        r.root_case = RootCase::high_dim_one_root;
        r.sigma_minus = brent_root(f, -ns, std::min(s_min, -ns + nu), ftol);
        return r;
    }

    const double f_min = f(s_min);
    if (std::abs(f_min) <= tol_root * std::max(1.0, target)) {
        r.root_case = RootCase::high_dim_two_roots;
        r.sigma_minus = s_min;
        r.sigma_plus = s_min;
        r.double_root = true;
    } else if (f_min > 0.0) {
        r.root_case = RootCase::high_dim_no_root;
    } else {
        r.root_case = RootCase::high_dim_two_roots;
        r.sigma_minus = brent_root(f, -ns, s_min, ftol);
        r.sigma_plus = brent_root(f, s_min, 0.0, ftol);
    }
    return r;
}

double nu_bar(int N) {
    if (N < 3) throw Error(ErrorCode::validation, "N must be >= 3 (got " + std::to_string(N) + ")");
    const double t = 2.0 + 0.5 * (N - 2);
    return std::sqrt(2.0 / 27.0 * t * t * t);
}

StabilityExponents stability_exponents(int N, double nu) {
    const ThetaRoots roots = theta_roots(N, nu);
    const auto to_p = [](double s) { return 1.0 - 2.0 / s; };
    StabilityExponents e;
    e.p_sharp = to_p(roots.sigma_sharp);
    if (roots.sigma_minus) e.p_minus = to_p(*roots.sigma_minus);
    if (roots.sigma_plus) e.p_plus = to_p(*roots.sigma_plus);
    return e;
}

ExtReal joseph_lundgren_exponent(int N) {
    if (N < 3) throw Error(ErrorCode::validation, "N must be >= 3 (got " + std::to_string(N) + ")");
    if (N <= 10) return ExtReal::infinity();
    const double q = 2.0 * std::sqrt(double(N - 1));
    return ExtReal((N - q) / (N - 4 - q));
}

const char* to_string(Lemma2Case c) {
    switch (c) {
    case Lemma2Case::a: return "a";
    case Lemma2Case::b: return "b";
    case Lemma2Case::c: return "c";
    }
    return "?";
}

namespace {

Lemma2Case case_from_roots(const ThetaRoots& r) {
    switch (r.root_case) {
    case RootCase::high_dim_two_roots: return Lemma2Case::a;
    case RootCase::low_dim_one_root:
    case RootCase::high_dim_one_root: return Lemma2Case::b;
    default: return Lemma2Case::c;
    }
}

} // namespace

Lemma2Case lemma2_case(int N, double nu) { return case_from_roots(theta_roots(N, nu)); }

bool PInterval::contains(double p) const {
    const bool above = lower_closed ? lower <= p : lower < p;
    const bool below = upper_closed ? upper >= p : upper > p;
    return above && below;
}

bool operator==(const PInterval& a, const PInterval& b) {
    return a.lower == b.lower && a.upper == b.upper && a.lower_closed == b.lower_closed &&
           a.upper_closed == b.upper_closed;
}

bool operator==(const ExponentReport& a, const ExponentReport& b) {
    return a.N == b.N && a.nu == b.nu && a.p_lower == b.p_lower && a.p_sobolev == b.p_sobolev &&
           a.p_upper == b.p_upper && a.sigma_sharp == b.sigma_sharp && a.sigma_minus == b.sigma_minus &&
           a.sigma_plus == b.sigma_plus && a.p_sharp == b.p_sharp && a.p_minus == b.p_minus &&
           a.p_plus == b.p_plus && a.nu_bar == b.nu_bar &&
           a.stability_intervals == b.stability_intervals && a.lemma2_case == b.lemma2_case &&
           a.root_case == b.root_case && a.double_root == b.double_root;
}

ExponentReport exponent_report(int N, double nu) {
    const ExponentBounds bounds = exponent_bounds(N, nu);
    const ThetaRoots roots = theta_roots(N, nu);
    const auto to_p = [](double s) { return 1.0 - 2.0 / s; };

    ExponentReport rep;
    rep.N = N;
    rep.nu = nu;
    rep.p_lower = bounds.p_lower;
    rep.p_sobolev = bounds.p_sobolev;
    rep.p_upper = bounds.p_upper;
    rep.sigma_sharp = roots.sigma_sharp;
    rep.sigma_minus = roots.sigma_minus;
    rep.sigma_plus = roots.sigma_plus;
    rep.p_sharp = to_p(roots.sigma_sharp);
    if (roots.sigma_minus) rep.p_minus = to_p(*roots.sigma_minus);
    if (roots.sigma_plus) rep.p_plus = to_p(*roots.sigma_plus);
    rep.nu_bar = nu_bar(N);
    rep.root_case = roots.root_case;
    rep.double_root = roots.double_root;
    rep.lemma2_case = case_from_roots(roots);

    rep.stability_intervals.push_back({ExtReal(rep.p_lower), ExtReal(rep.p_sharp), false, true});
    if (rep.p_minus && rep.p_plus) {
        rep.stability_intervals.push_back({ExtReal(*rep.p_minus), ExtReal(*rep.p_plus), true, true});
    } else if (rep.p_minus) {
        rep.stability_intervals.push_back({ExtReal(*rep.p_minus), rep.p_upper, true, false});
    }
    return rep;
}

bool ordering_chain_holds(const ExponentReport& r) {
    if (!(1.0 < r.p_lower && r.p_lower < r.p_sharp && r.p_sharp < r.p_sobolev)) return false;
    double last = r.p_sobolev;
    if (r.p_minus) {
        if (!(*r.p_minus > last)) return false;
        last = *r.p_minus;
    }
    if (r.p_plus) {
        if (!(*r.p_plus >= last)) return false;
        last = *r.p_plus;
    }
    return r.p_upper > last;
}

const char* to_string(RegimeVerdict v) {
    switch (v) {
    case RegimeVerdict::stable: return "stable";
    case RegimeVerdict::unstable: return "unstable";
    case RegimeVerdict::outside_range: return "outside_range";
    }
    return "?";
}

SingularStability classify_singular_stability(const Params& params) {
    const ExponentReport rep = exponent_report(params.N, params.nu);
    SingularStability out;
    out.lemma2_case = rep.lemma2_case;
    if (!(params.p > rep.p_lower && rep.p_upper > params.p)) {
        return out; // p_* and p^* themselves included: U_∞ degenerates there
    }

    // closed boundaries at p_#, p_-, p_+: allow a few ulps on the inequality
    const double lhs = params.p * params.gamma;
    const double rhs = params.nu * params.nu;
    const double slack = 16.0 * 2.220446049250313e-16 * std::max(std::abs(lhs), rhs);
    out.verdict = lhs - rhs <= slack ? RegimeVerdict::stable : RegimeVerdict::unstable;

    const bool in_interval = std::any_of(rep.stability_intervals.begin(), rep.stability_intervals.end(),
                                         [&](const PInterval& iv) { return iv.contains(params.p); });
    out.interval_verdict = in_interval ? RegimeVerdict::stable : RegimeVerdict::unstable;
    out.consistent = out.verdict == out.interval_verdict;
    return out;
}

} // namespace hardy
