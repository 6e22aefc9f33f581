#include "hardy/heteroclinic.hpp"

#include "hardy/error.hpp"
#include "hardy/roots.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace hardy {

namespace {

// first-return chart near the saddle: (log w, w'/w)
struct LogChartRun {
    std::vector<ode::DenseStep> steps;
    double t_ref = 0.0;  // integrator time at which w = x_ref
    double v_ref = 0.0;  // w'/w there
};

LogChartRun run_log_chart(const Params& pr, const EigenData& e, double x0, double y0, double x_ref,
                          const SolverOptions& opts) {
    // escape from the saddle takes about log(x_ref/x0)/alpha_+
    const double t_max = 10.0 * (std::log(x_ref / x0) / e.alpha_plus + 1.0);
    const double q = pr.p - 1.0;
    const double b2 = 2.0 * pr.beta, g = pr.gamma;
    const ode::Rhs f = [=](double, const ode::State& s) -> ode::State {
        return {s[1], -b2 * s[1] + g - std::exp(q * s[0]) - s[1] * s[1]};
    };
    const double u_ref = std::log(x_ref);
    ode::Options o;
    o.atol = {opts.atol, opts.atol};
    o.rtol = opts.rtol;
    const ode::StopFn stop = [=](double, const ode::State& s, const ode::DenseStep&) { return s[0] >= u_ref; };
    ode::Result r = ode::integrate(f, 0.0, {std::log(x0), y0 / x0}, t_max, o, stop);
    if (r.status != ode::Status::stopped) {
        throw Error(ErrorCode::non_convergence,
                    "heteroclinic shooting did not leave the saddle neighbourhood by t = " + format_double(t_max));
    }
    LogChartRun out;
    const ode::DenseStep& last = r.steps.back();
    const double ftol = 1e-15 * std::max(1.0, std::abs(u_ref));
    out.t_ref = brent_root([&](double t) { return last.eval(t)[0] - u_ref; }, last.t0, last.t1(), ftol, 1e-15);
    out.v_ref = last.eval(out.t_ref)[1];
    out.steps = std::move(r.steps);
    return out;
}

// (log x0 - a x0^q c) / alpha_+ : phase of the start point on the normalized unstable manifold
double analytic_shift(const EigenData& e, double head_coef, double q, double x0, bool corrected) {
    const double lead = head_coef * std::exp(q * std::log(x0));
    const double factor = corrected ? 1.0 : 1.0 + q * e.alpha_plus / (e.alpha_plus - e.alpha_minus);
    return (std::log(x0) - lead * factor) / e.alpha_plus;
}

std::size_t find_step(const std::vector<ode::DenseStep>& steps, double t) {
    auto it = std::upper_bound(steps.begin(), steps.end(), t,
                               [](double v, const ode::DenseStep& s) { return v < s.t0; });
    if (it == steps.begin()) return 0;
    return std::size_t(it - steps.begin()) - 1;
}

} // namespace

double default_t_max(const Params& pr) {
    const EigenData e = eigen_analysis(pr);
    const double slowest = std::min({std::abs(e.alpha_star_plus.real()), std::abs(e.alpha_star_minus.real()), pr.beta});
    return 200.0 / slowest;
}

OrbitSample OrbitModel::at(double tau) const {
    if (tau < tau_start_) {
        const double e = std::exp(alpha_plus_ * tau);
        const double eq = std::exp((params_.p - 1.0) * alpha_plus_ * tau);
        const double x = e * (1.0 + head_coef_ * eq);
        const double ratio = alpha_plus_ * (1.0 + head_coef_ * params_.p * eq) / (1.0 + head_coef_ * eq);
        return {x, alpha_plus_ * e * (1.0 + head_coef_ * params_.p * eq), x - c_,
                alpha_plus_ * tau + std::log1p(head_coef_ * eq), ratio};
    }
    if (tau < tau_switch_) {
        const double t = tau - shift_;
        const ode::State s = log_chart_[find_step(log_chart_, t)].eval(t);
        const double x = std::exp(s[0]);
        return {x, s[1] * x, x - c_, s[0], s[1]};
    }
    if (tau <= tau_arrival_) {
        const ode::State s = gap_chart_[find_step(gap_chart_, tau)].eval(tau);
        return {c_ + s[0], s[1], s[0], std::log(c_ + s[0]), s[1] / (c_ + s[0])};
    }
    const auto z = linear_flow(attractor_jacobian_, arrival_state_, tau - tau_arrival_);
    return {c_ + z[0], z[1], z[0], std::log(c_ + z[0]), z[1] / (c_ + z[0])};
}

class HeteroclinicBuilder {
public:
    static std::shared_ptr<const OrbitModel> build(const Params& pr, const SolverOptions& opts) {
        const ExponentBounds b = exponent_bounds(pr.N, pr.nu);
        if (!(pr.p > b.p_sobolev) || !(pr.p < b.p_upper)) {
            throw Error(ErrorCode::range, "heteroclinic orbit needs p_S < p < p^* (p = " + format_double(pr.p) +
                                              ", p_S = " + format_double(b.p_sobolev) + ")");
        }
        if (!(opts.eps_start > 0.0) || !(opts.tol_attr > 0.0) || !(opts.grid_dt > 0.0) || opts.head_span < 0.0) {
            throw Error(ErrorCode::validation, "solver options must be positive");
        }
        const EigenData e = eigen_analysis(pr);
        const double q = pr.p - 1.0;
        const double c = singular_coefficient(pr);
        const double t_max = opts.t_max > 0.0 ? opts.t_max : default_t_max(pr);

        auto m = std::make_shared<OrbitModel>();
        m->params_ = pr;
        m->c_ = c;
        m->alpha_plus_ = e.alpha_plus;
        const double lp = pr.p * e.alpha_plus;
        m->head_coef_ = -1.0 / (lp * lp + 2.0 * pr.beta * lp - pr.gamma);

        // the unstable-manifold error of a linear start is O(x0^{p-1}); keep it below 1e-10
        const double x_cap = std::exp(std::log(1e-10) / q);
        const double x0 = std::min(opts.eps_start / std::hypot(1.0, e.alpha_plus), x_cap);
        const double x_ref = 0.5 * c;

        auto start_y = [&](double x) {
            double y = e.alpha_plus * x;
            if (opts.manifold_correction) y += m->head_coef_ * q * e.alpha_plus * std::exp(pr.p * std::log(x));
            return y;
        };

        LogChartRun run = run_log_chart(pr, e, x0, start_y(x0), x_ref, opts);
        const double shift0 = analytic_shift(e, m->head_coef_, q, x0, opts.manifold_correction);
        double tau_ref = run.t_ref + shift0;
        if (opts.richardson) {
            const double x1 = 0.25 * x0;
            const LogChartRun fine = run_log_chart(pr, e, x1, start_y(x1), x_ref, opts);
            const double tau_fine = fine.t_ref + analytic_shift(e, m->head_coef_, q, x1, opts.manifold_correction);
            m->normalization_spread_ = std::abs(tau_fine - tau_ref);
            const double k = std::pow(4.0, 2.0 * q);
            tau_ref = k > 1.001 ? (k * tau_fine - tau_ref) / (k - 1.0) : tau_fine;
        }
        m->shift_ = tau_ref - run.t_ref;
        m->tau_start_ = m->shift_;
        m->tau_switch_ = tau_ref;
        // drop steps past the switch
        while (run.steps.size() > 1 && run.steps.back().t0 >= run.t_ref) run.steps.pop_back();
        m->log_chart_ = std::move(run.steps);

        // deviation chart near the attractor: (w - C, w') with relative accuracy in the gap
        const double cp = std::exp(pr.p * std::log(c));
        const double b2 = 2.0 * pr.beta, g = pr.gamma, p = pr.p;
        const ode::Rhs f = [=](double, const ode::State& s) -> ode::State {
            return {s[1], -b2 * s[1] + g * s[0] - cp * std::expm1(p * std::log1p(s[0] / c))};
        };
        ode::Options o;
        o.atol = {opts.atol * opts.tol_attr, opts.atol * opts.tol_attr};
        o.rtol = opts.rtol;
        const double tol = opts.tol_attr;
        // a focus is followed past arrival until the gap has changed sign twice
        const bool focus = e.attractor_type == AttractorType::focus;
        const double extend = focus ? 2.5 * std::numbers::pi / e.omega_spiral : 0.0;
        if (focus) o.atol = {1e-300, 1e-300};
        struct Watch {
            double arrived = -1.0;
            int crossings = 0;
            double last = 0.0;
        };
        auto w = std::make_shared<Watch>();
        const ode::StopFn stop = [=](double t, const ode::State& s, const ode::DenseStep&) {
            if (w->last != 0.0 && (s[0] > 0.0) != (w->last > 0.0)) ++w->crossings;
            if (s[0] != 0.0) w->last = s[0];
            const double d = std::hypot(s[0], s[1]);
            if (w->arrived < 0.0 && d < tol) w->arrived = t;
            if (w->arrived < 0.0) return false;
            return !focus || w->crossings >= 2 || t >= w->arrived + extend || d < 1e-250;
        };
        const double tau_end = tau_ref + t_max + extend;
        ode::Result r = ode::integrate(f, tau_ref, {x_ref - c, run.v_ref * x_ref}, tau_end, o, stop);
        if (r.status != ode::Status::stopped && w->arrived >= 0.0) r.status = ode::Status::stopped;
        if (r.status != ode::Status::stopped) {
            throw Error(ErrorCode::non_convergence, "heteroclinic orbit did not reach the attractor within t_max = " +
                                                        format_double(t_max) + " (distance " +
                                                        format_double(std::hypot(r.y[0], r.y[1])) + ")");
        }
        m->gap_chart_ = std::move(r.steps);
        m->tau_arrival_ = r.t;
        m->arrival_state_ = {r.y[0], r.y[1]};
        m->attractor_jacobian_ = {{{0.0, 1.0}, {-q * pr.gamma, -2.0 * pr.beta}}};
        return m;
    }
};

PhaseTrajectory shoot_heteroclinic(const Params& params, const SolverOptions& opts) {
    auto model = HeteroclinicBuilder::build(params, opts);
    PhaseTrajectory tr;
    const double dt = opts.grid_dt;
    const long k_lo = -long(std::ceil(opts.head_span / dt));
    const long k_hi = long(std::ceil((model->tau_arrival() - model->tau_start()) / dt));
    tr.t.reserve(std::size_t(k_hi - k_lo + 1));
    tr.states.reserve(tr.t.capacity());
    tr.gap.reserve(tr.t.capacity());
    for (long k = k_lo; k <= k_hi; ++k) {
        const double tau = model->tau_start() + double(k) * dt;
        const OrbitSample s = model->at(tau);
        tr.t.push_back(tau);
        tr.states.push_back({s.x, s.y});
        tr.gap.push_back(s.gap);
    }
    tr.normalization_shift = model->tau_start();
    tr.orbit = model;
    try {
        tr.approach = detect_approach(tr, params).approach;
    } catch (const Error& err) {
        if (err.code() != ErrorCode::ambiguous) throw;
        tr.approach = Approach::unknown;
    }
    return tr;
}

namespace {

RadialProfile profile_from_orbit(const OrbitModel* orbit, const PhaseTrajectory& traj, double log_lambda,
                                 const Params& pr, std::span<const double> log_r, std::span<const double> taus) {
    const double a = pr.slow_rate();
    RadialProfile out;
    out.log_r.assign(log_r.begin(), log_r.end());
    out.values.resize(log_r.size());
    out.slopes.resize(log_r.size());
    out.singular_gap.resize(log_r.size());
    for (std::size_t i = 0; i < log_r.size(); ++i) {
        OrbitSample s;
        if (orbit) {
            s = orbit->at(taus.empty() ? log_r[i] + log_lambda : taus[i]);
        } else {
            const std::size_t k = i + std::size_t(taus.data() - traj.t.data());
            const auto& st = traj.states[k];
            s = {st.x, st.y, traj.gap.empty() ? 0.0 : traj.gap[k], std::log(st.x), st.y / st.x};
        }
        // U = r^{-a} w through log w
        out.values[i] = std::exp(s.log_x - a * log_r[i]);
        out.slopes[i] = out.values[i] * (s.ratio - a);
        out.singular_gap[i] = s.gap;
    }
    out.decay_class = DecayClass::unclassified;
    return out;
}

} // namespace

RadialProfile build_profile(const PhaseTrajectory& traj, ExtReal lambda, const Params& params) {
    if (traj.size() == 0) throw Error(ErrorCode::validation, "empty trajectory");
    const double a = params.slow_rate();
    constexpr double log_max = 700.0;
    if (lambda.is_infinite()) {
        const double lc = std::log(singular_coefficient(params));
        std::size_t k0 = 0, k1 = traj.size();
        while (k0 + 1 < k1 && std::abs(lc - a * traj.t[k0]) > log_max) ++k0;
        while (k1 - 1 > k0 && std::abs(lc - a * traj.t[k1 - 1]) > log_max) --k1;
        return singular_profile(params, std::span<const double>(traj.t).subspan(k0, k1 - k0));
    }
    const double lam = lambda.value();
    if (!(lam > 0.0)) throw Error(ErrorCode::validation, "lambda must be positive (got " + format_double(lam) + ")");
    const double ll = std::log(lam);
    // samples at either end where U_λ leaves the double range are dropped
    auto log_u = [&](std::size_t i) {
        const double lx = traj.orbit ? traj.orbit->at(traj.t[i]).log_x : std::log(traj.states[i].x);
        return lx - a * (traj.t[i] - ll);
    };
    std::size_t k0 = 0, k1 = traj.size();
    while (k0 + 1 < k1 && std::abs(log_u(k0)) > log_max) ++k0;
    while (k1 - 1 > k0 && std::abs(log_u(k1 - 1)) > log_max) --k1;
    const std::span<const double> taus = std::span<const double>(traj.t).subspan(k0, k1 - k0);
    std::vector<double> grid(taus.size());
    for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = taus[i] - ll;
    RadialProfile out = profile_from_orbit(traj.orbit.get(), traj, ll, params, grid, taus);
    if (traj.gap.size() != traj.size()) {
        const double c = singular_coefficient(params);
        for (std::size_t i = 0; i < grid.size(); ++i) out.singular_gap[i] = traj.states[k0 + i].x - c;
    }
    // log r_i = tau_i - log λ, so U_λ(r_i) = r_i^{-2/(p-1)} w(tau_i) exactly
    out.lambda = lambda;
    return out;
}

RadialProfile build_profile_on(const PhaseTrajectory& traj, ExtReal lambda, const Params& params,
                               std::span<const double> log_r) {
    if (lambda.is_infinite()) return singular_profile(params, log_r);
    if (!traj.orbit) throw Error(ErrorCode::validation, "trajectory has no orbit model");
    const double lam = lambda.value();
    if (!(lam > 0.0)) throw Error(ErrorCode::validation, "lambda must be positive (got " + format_double(lam) + ")");
    RadialProfile out = profile_from_orbit(traj.orbit.get(), traj, std::log(lam), params, log_r, {});
    out.lambda = lambda;
    return out;
}

ApproachReport detect_approach(const PhaseTrajectory& traj, const Params& params) {
    const std::size_t n = traj.size();
    if (n < 2) throw Error(ErrorCode::validation, "trajectory too short for approach detection");
    const EigenData e = eigen_analysis(params);
    ApproachReport rep;
    rep.predicted = e.discriminant >= 0.0 ? Approach::monotone : Approach::spiral;

    bool monotone = true;
    for (std::size_t i = 1; i < n; ++i) {
        if (traj.states[i].x - traj.states[i - 1].x < -1e-9) {
            monotone = false;
            break;
        }
    }
    const double c = singular_coefficient(params);
    auto gap = [&](std::size_t i) { return traj.gap.size() == n ? traj.gap[i] : traj.states[i].x - c; };
    for (std::size_t i = 1; i < n; ++i) {
        const double g0 = gap(i - 1), g1 = gap(i);
        if ((g0 < 0.0 && g1 >= 0.0) || (g0 > 0.0 && g1 <= 0.0)) {
            if (g1 == 0.0 && i + 1 < n && (gap(i + 1) > 0.0) == (g0 > 0.0)) continue; // touch, no crossing
            rep.crossing_times.push_back(traj.t[i - 1] + (traj.t[i] - traj.t[i - 1]) * g0 / (g0 - g1));
        }
    }
    if (rep.crossing_times.size() >= 2) {
        rep.approach = Approach::spiral;
    } else if (monotone) {
        rep.approach = Approach::monotone;
    } else {
        throw Error(ErrorCode::ambiguous, "trajectory is neither monotone nor crosses the attractor level twice");
    }
    const std::size_t m = rep.crossing_times.size();
    if (m >= 2) {
        const std::size_t first = m > 10 ? m - 10 : 0;
        rep.crossing_spacing = (rep.crossing_times[m - 1] - rep.crossing_times[first]) / double(m - 1 - first);
    }
    rep.agrees_with_prediction = rep.approach == rep.predicted;
    return rep;
}

AttractorRate attractor_rate(const PhaseTrajectory& traj, const Params& params) {
    const EigenData e = eigen_analysis(params);
    const ApproachReport rep = detect_approach(traj, params);
    if (rep.approach != Approach::monotone) {
        throw Error(ErrorCode::range, "attractor rate is defined for monotone trajectories only");
    }
    const std::size_t n = traj.size();
    const double c = singular_coefficient(params);
    auto gap = [&](std::size_t i) { return traj.gap.size() == n ? traj.gap[i] : traj.states[i].x - c; };
    const double g_end = std::abs(gap(n - 1));
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = n; i-- > 0;) {
        const double g = gap(i);
        if (std::abs(g) > 10.0 * g_end) break;
        sxy += g * traj.states[i].y;
        sxx += g * g;
    }
    AttractorRate out;
    out.expected = e.alpha_star_plus.real();
    out.rate = sxx > 0.0 ? sxy / sxx : 0.0;
    out.double_root = std::abs(e.discriminant) <= 1e-9 * std::max(1.0, params.beta * params.beta);
    out.tolerance = out.double_root ? 0.05 : 0.01;
    return out;
}

} // namespace hardy
