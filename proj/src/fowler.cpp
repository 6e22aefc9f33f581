#include "hardy/fowler.hpp"

#include "hardy/error.hpp"
#include "hardy/profile.hpp"

#include <cmath>
#include <sstream>

namespace hardy {

const char* to_string(AttractorType t) {
    switch (t) {
    case AttractorType::node: return "node";
    case AttractorType::focus: return "focus";
    case AttractorType::center: return "center";
    case AttractorType::repeller: return "repeller";
    }
    return "?";
}

const char* to_string(Approach a) {
    switch (a) {
    case Approach::monotone: return "monotone";
    case Approach::spiral: return "spiral";
    case Approach::unknown: return "unknown";
    }
    return "?";
}

double fowler_pow(double x, double p) {
    if (x < 0.0 || std::isnan(x)) {
        std::ostringstream os;
        os << "Fowler system is defined on x >= 0 (got x = " << format_double(x) << ")";
        throw Error(ErrorCode::domain, os.str());
    }
    if (x == 0.0) return 0.0;
    return std::exp(p * std::log(x));
}

PhaseState vector_field(const PhaseState& s, const Params& pr) {
    return {s.y, -2.0 * pr.beta * s.y + pr.gamma * s.x - fowler_pow(s.x, pr.p)};
}

Mat2 jacobian(const PhaseState& s, const Params& pr) {
    const double dxp = s.x > 0.0 ? pr.p * fowler_pow(s.x, pr.p - 1.0) : 0.0;
    return {{{0.0, 1.0}, {pr.gamma - dxp, -2.0 * pr.beta}}};
}

Equilibria equilibria(const Params& pr) {
    Equilibria eq;
    eq.points.push_back({0.0, 0.0});
    if (pr.gamma > 0.0) {
        eq.points.push_back({std::pow(pr.gamma, 1.0 / (pr.p - 1.0)), 0.0});
    } else {
        eq.warning = "gamma <= 0: p outside (p_*, p^*), only the trivial equilibrium exists";
    }
    return eq;
}

EigenData eigen_analysis(const Params& pr) {
    if (!(pr.gamma > 0.0)) {
        std::ostringstream os;
        os << "eigen analysis needs gamma > 0 (got " << format_double(pr.gamma) << ")";
        throw Error(ErrorCode::range, os.str());
    }
    EigenData e;
    const double root = std::sqrt(pr.beta * pr.beta + pr.gamma); // = nu
    e.alpha_plus = -pr.beta + root;
    e.alpha_minus = -pr.beta - root;
    e.eigvec_plus = {1.0, e.alpha_plus};
    e.eigvec_minus = {1.0, e.alpha_minus};

    e.discriminant = pr.beta * pr.beta - (pr.p - 1.0) * pr.gamma;
    if (e.discriminant >= 0.0) {
        const double d = std::sqrt(e.discriminant);
        e.alpha_star_plus = {-pr.beta + d, 0.0};
        e.alpha_star_minus = {-pr.beta - d, 0.0};
    } else {
        e.omega_spiral = std::sqrt(-e.discriminant);
        e.alpha_star_plus = {-pr.beta, e.omega_spiral};
        e.alpha_star_minus = {-pr.beta, -e.omega_spiral};
    }

    // beta vanishes at p = p_S up to rounding of 2/(p-1)
    constexpr double beta_zero = 1e-12;
    if (std::abs(pr.beta) <= beta_zero) {
        e.attractor_type = AttractorType::center;
    } else if (pr.beta < 0.0) {
        e.attractor_type = AttractorType::repeller;
    } else {
        e.attractor_type = e.discriminant >= 0.0 ? AttractorType::node : AttractorType::focus;
    }
    return e;
}

double lyapunov_energy(const PhaseState& s, const Params& pr) {
    return 0.5 * s.y * s.y - 0.5 * pr.gamma * s.x * s.x + fowler_pow(s.x, pr.p + 1.0) / (pr.p + 1.0);
}

std::array<double, 2> lyapunov_gradient(const PhaseState& s, const Params& pr) {
    return {fowler_pow(s.x, pr.p) - pr.gamma * s.x, s.y};
}

std::array<double, 2> linear_flow(const Mat2& A, const std::array<double, 2>& z, double t) {
    const double tr = A[0][0] + A[1][1];
    const double det = A[0][0] * A[1][1] - A[0][1] * A[1][0];
    const double half = 0.5 * tr;
    const double disc = half * half - det;
    // exp(At) = e^{half t} [c I + s (A - half I)]
    double c, s, scale;
    if (disc > 0.0) {
        const double d = std::sqrt(disc);
        // cosh/sinh folded into the exponential to avoid overflow at large t
        const double ep = std::exp((half + d) * t), em = std::exp((half - d) * t);
        c = 0.5 * (ep + em);
        s = 0.5 * (ep - em) / d;
        scale = 1.0;
    } else if (disc < 0.0) {
        const double w = std::sqrt(-disc);
        c = std::cos(w * t);
        s = std::sin(w * t) / w;
        scale = std::exp(half * t);
    } else {
        c = 1.0;
        s = t;
        scale = std::exp(half * t);
    }
    const double b00 = A[0][0] - half, b11 = A[1][1] - half;
    return {scale * (c * z[0] + s * (b00 * z[0] + A[0][1] * z[1])),
            scale * (c * z[1] + s * (A[1][0] * z[0] + b11 * z[1]))};
}

namespace {

// dU/dt by second-order differences on a nonuniform grid
std::vector<double> difference_slopes(const std::vector<double>& t, const std::vector<double>& u) {
    const std::size_t n = t.size();
    std::vector<double> d(n, 0.0);
    if (n < 3) {
        if (n == 2) d[0] = d[1] = (u[1] - u[0]) / (t[1] - t[0]);
        return d;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h0 = t[i] - t[i - 1], h1 = t[i + 1] - t[i];
        d[i] = (-h1 / (h0 * (h0 + h1))) * u[i - 1] + ((h1 - h0) / (h0 * h1)) * u[i] +
               (h0 / (h1 * (h0 + h1))) * u[i + 1];
    }
    {
        const double h0 = t[1] - t[0], h1 = t[2] - t[1];
        d[0] = (-(2 * h0 + h1) / (h0 * (h0 + h1))) * u[0] + ((h0 + h1) / (h0 * h1)) * u[1] -
               (h0 / (h1 * (h0 + h1))) * u[2];
    }
    {
        const double h0 = t[n - 2] - t[n - 3], h1 = t[n - 1] - t[n - 2];
        d[n - 1] = (h1 / (h0 * (h0 + h1))) * u[n - 3] - ((h0 + h1) / (h0 * h1)) * u[n - 2] +
                   ((2 * h1 + h0) / (h1 * (h0 + h1))) * u[n - 1];
    }
    return d;
}

} // namespace

PhaseTrajectory fowler_forward(const Params& pr, const RadialProfile& profile) {
    validate_profile(profile);
    const std::size_t n = profile.size();
    const std::vector<double> slopes =
        profile.slopes.size() == n ? profile.slopes : difference_slopes(profile.log_r, profile.values);
    const double a = pr.slow_rate();

    PhaseTrajectory tr;
    tr.t = profile.log_r;
    tr.states.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double e = std::exp(a * profile.log_r[i]);
        tr.states[i] = {e * profile.values[i], e * (a * profile.values[i] + slopes[i])};
    }
    if (profile.singular_gap.size() == n) tr.gap = profile.singular_gap;
    return tr;
}

RadialProfile fowler_inverse(const Params& pr, const PhaseTrajectory& tr) {
    const double a = pr.slow_rate();
    RadialProfile out;
    out.log_r = tr.t;
    out.values.resize(tr.size());
    out.slopes.resize(tr.size());
    for (std::size_t i = 0; i < tr.size(); ++i) {
        const double e = std::exp(-a * tr.t[i]);
        out.values[i] = e * tr.states[i].x;
        out.slopes[i] = e * (tr.states[i].y - a * tr.states[i].x);
    }
    if (tr.gap.size() == tr.size()) out.singular_gap = tr.gap;
    out.lambda = ExtReal(1.0);
    return out;
}

} // namespace hardy
