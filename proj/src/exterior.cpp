#include "hardy/exterior.hpp"

#include "hardy/error.hpp"
#include "hardy/heteroclinic.hpp"
#include "hardy/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

namespace hardy {

namespace {

// Decaying root of rho + 1/rho = 2 + x, x >= 0, and 1 - rho, both without cancellation.
struct DecayMode {
    double rho = 1.0;
    double one_minus_rho = 0.0;
};

DecayMode decay_mode(double x) {
    const double s = std::sqrt(x + 0.25 * x * x);
    const double den = 1.0 + 0.5 * x + s;
    return {1.0 / den, (0.5 * x + s) / den};
}

// Tridiagonal system in the Liouville variable, scaled by dt^2:
//   -f_{i-1} + (2 + e_i) f_i - f_{i+1} = b_i,  i = 1..n,  f_0 given,
// with the ghost value f_{n+1} = rho f_n. Pivots are kept as 1 + g_i so that
// the small excess g_i retains full relative precision.
class TridiagSolver {
public:
    TridiagSolver(const std::vector<double>& e, DecayMode end) : g_(e.size()) {
        const std::size_t n = e.size() - 1;
        if (n == 0) return;
        if (n == 1) {
            g_[1] = e[1] + end.one_minus_rho;
            return;
        }
        g_[1] = 1.0 + e[1];
        for (std::size_t i = 2; i < n; ++i) g_[i] = e[i] + g_[i - 1] / (1.0 + g_[i - 1]);
        g_[n] = e[n] + end.one_minus_rho - 1.0 / (1.0 + g_[n - 1]);
        for (std::size_t i = 1; i <= n; ++i) {
            if (!(1.0 + g_[i] > 0.0)) throw Error(ErrorCode::noncoercive, "discrete operator lost positivity");
        }
    }

    // b[1..n] is overwritten; f[0] must hold the boundary value.
    void solve(std::vector<double>& b, std::vector<double>& f) const {
        const std::size_t n = g_.size() - 1;
        if (n == 0) return;
        b[1] += f[0];
        for (std::size_t i = 2; i <= n; ++i) b[i] += b[i - 1] / (1.0 + g_[i - 1]);
        f[n] = b[n] / (1.0 + g_[n]);
        for (std::size_t i = n - 1; i >= 1; --i) f[i] = (b[i] + f[i + 1]) / (1.0 + g_[i]);
    }

private:
    std::vector<double> g_;
};

// 1 - (1 - x)^p for 0 <= x <= 1
double convex_gap(double x, double p) {
    if (x < 1e-4) {
        const double c1 = p, c2 = -p * (p - 1.0) / 2.0, c3 = p * (p - 1.0) * (p - 2.0) / 6.0,
                     c4 = -p * (p - 1.0) * (p - 2.0) * (p - 3.0) / 24.0;
        return x * (c1 + x * (c2 + x * (c3 + x * c4)));
    }
    if (x >= 1.0) return 1.0;
    return -std::expm1(p * std::log1p(-x));
}

std::vector<double> liouville_decay(const TGrid& g, double nu_star) {
    std::vector<double> d(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) d[i] = std::exp(-nu_star * g.dt * double(i));
    return d;
}

// Solves -f'' + (nu^2 - W_i) f = 0 with f_0 = b and the decaying end mode of W_n.
std::vector<double> solve_potential(const TGrid& grid, const std::vector<double>& W, double nu, double b) {
    const std::size_t n = grid.n;
    const double nu2 = nu * nu, h2 = grid.dt * grid.dt;
    std::vector<double> e(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        if (W[i] > nu2 * (1.0 + 1e-12) + 1e-300) {
            throw Error(ErrorCode::noncoercive, "r^2 V = " + format_double(W[i]) + " exceeds nu^2 = " + format_double(nu2) +
                                                    " at log r = " + format_double(grid.t(i)));
        }
        e[i] = h2 * std::max(nu2 - W[i], 0.0);
    }
    std::vector<double> f(n + 1, 0.0), rhs(n + 1, 0.0);
    f[0] = b;
    if (b == 0.0) return f;
    TridiagSolver(e, decay_mode(e[n])).solve(rhs, f);
    return f;
}

void check_grid_options(const ExteriorOptions& o) {
    if (!(o.span > 0.0) || !(o.spacing > 0.0) || o.spacing > o.span) {
        throw Error(ErrorCode::validation, "exterior grid needs span > 0 and 0 < spacing <= span");
    }
    if (o.max_iters < 1 || !(o.tol > 0.0) || o.residual_stride < 1) {
        throw Error(ErrorCode::validation, "exterior iteration options must be positive");
    }
}

} // namespace

TGrid make_tgrid(double R_K, const ExteriorOptions& opts) {
    check_grid_options(opts);
    if (!(R_K > 0.0)) throw Error(ErrorCode::validation, "R_K must be positive (got " + format_double(R_K) + ")");
    TGrid g;
    g.t0 = std::log(R_K);
    g.dt = opts.spacing;
    g.n = std::size_t(std::llround(opts.span / opts.spacing));
    if (g.n < 4) throw Error(ErrorCode::validation, "exterior grid needs at least four intervals");
    return g;
}

LinearHardyProblem make_linear_problem(double R_K, double boundary_value, const std::function<double(double)>& W,
                                       const ExteriorOptions& opts) {
    LinearHardyProblem prob;
    prob.R_K = R_K;
    prob.boundary_value = boundary_value;
    prob.grid = make_tgrid(R_K, opts);
    prob.scaled_potential.resize(prob.grid.size());
    for (std::size_t i = 0; i < prob.grid.size(); ++i) prob.scaled_potential[i] = W(prob.grid.t(i));
    return prob;
}

double LinearHardySolution::value(std::size_t i) const {
    return liouville[i] * std::exp(-nu_star * grid.dt * double(i));
}

RadialProfile LinearHardySolution::profile(std::size_t stride) const {
    if (stride < 1) stride = 1;
    RadialProfile pr;
    const double h = grid.dt;
    for (std::size_t i = 0; i < grid.size(); i += stride) {
        const double f = liouville[i];
        double df;
        if (i == 0) {
            df = (-3.0 * liouville[0] + 4.0 * liouville[1] - liouville[2]) / (2.0 * h);
        } else if (i == grid.n) {
            df = (3.0 * liouville[i] - 4.0 * liouville[i - 1] + liouville[i - 2]) / (2.0 * h);
        } else {
            df = (liouville[i + 1] - liouville[i - 1]) / (2.0 * h);
        }
        const double d = std::exp(-nu_star * h * double(i));
        pr.log_r.push_back(grid.t(i));
        pr.values.push_back(d * f);
        pr.slopes.push_back(d * (df - nu_star * f));
    }
    pr.lambda = ExtReal(1.0);
    return pr;
}

LinearHardySolution solve_linear_hardy(const LinearHardyProblem& prob, const Params& params) {
    if (prob.boundary_value < 0.0) throw Error(ErrorCode::validation, "boundary value must be nonnegative");
    if (prob.scaled_potential.size() != prob.grid.size()) {
        throw Error(ErrorCode::validation, "potential must be sampled on every grid node");
    }
    for (double w : prob.scaled_potential) {
        if (w < 0.0 || !std::isfinite(w)) throw Error(ErrorCode::validation, "potential must be nonnegative and finite");
    }
    LinearHardySolution sol;
    sol.grid = prob.grid;
    sol.nu_star = params.nu_star;
    sol.liouville = solve_potential(prob.grid, prob.scaled_potential, params.nu, prob.boundary_value);
    return sol;
}

double ExteriorBase::ustar(std::size_t i) const {
    return w[i] * std::exp(-params.slow_rate() * grid.t(i));
}

double ExteriorBase::ustar_t(std::size_t i) const {
    const double a = params.slow_rate();
    return std::exp(-a * grid.t(i)) * (wp[i] - a * w[i]);
}

ExteriorProblem make_exterior_problem(const Params& params, double R_K, double psi, ExtReal lambda,
                                      const PhaseTrajectory* traj, const ExteriorOptions& opts) {
    if (!(psi >= 0.0) || !std::isfinite(psi)) throw Error(ErrorCode::validation, "psi must be nonnegative");
    const double nu2 = params.nu * params.nu;
    if (!(params.gamma > 0.0) || params.p * params.gamma > nu2 * (1.0 + 1e-12)) {
        throw Error(ErrorCode::validation, "exterior problem needs the stable regime p gamma <= nu^2 (p gamma = " +
                                               format_double(params.p * params.gamma) + ", nu^2 = " + format_double(nu2) + ")");
    }
    ExteriorProblem ext;
    ext.params = params;
    ext.R_K = R_K;
    ext.psi = psi;
    ext.opts = opts;
    auto base = std::make_shared<ExteriorBase>();
    base->params = params;
    base->grid = make_tgrid(R_K, opts);
    base->lambda = lambda;
    base->c = singular_coefficient(params);
    const std::size_t m = base->grid.size();
    base->w.resize(m);
    base->wp.resize(m);
    base->gap.resize(m);
    base->fstar.resize(m);
    const double a = params.slow_rate(), t0 = base->grid.t0;
    if (lambda.is_infinite()) {
        std::fill(base->w.begin(), base->w.end(), base->c);
        std::fill(base->wp.begin(), base->wp.end(), 0.0);
        std::fill(base->gap.begin(), base->gap.end(), 0.0);
    } else {
        if (!traj || !traj->orbit) throw Error(ErrorCode::validation, "finite lambda needs a heteroclinic trajectory");
        const double lam = lambda.value();
        if (!(lam > 0.0)) throw Error(ErrorCode::validation, "lambda must be positive");
        const double ll = std::log(lam);
        for (std::size_t i = 0; i < m; ++i) {
            const OrbitSample s = traj->orbit->at(base->grid.t(i) + ll);
            base->w[i] = s.x;
            base->wp[i] = s.y;
            base->gap[i] = s.gap;
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        const double t = base->grid.t(i);
        if (base->gap[i] > 1e-12 * base->c) {
            throw Error(ErrorCode::validation, "base solution exceeds U_inf at log r = " + format_double(t));
        }
        base->fstar[i] = base->w[i] * std::exp(-a * t + params.nu_star * (t - t0));
    }
    const double u_k = base->ustar(0);
    if (psi > u_k * (1.0 + 1e-14)) {
        throw Error(ErrorCode::validation,
                    "psi = " + format_double(psi) + " exceeds the base solution at R_K (" + format_double(u_k) + ")");
    }
    ext.base = std::move(base);
    return ext;
}

double ExteriorField::deviation(std::size_t i) const {
    return liouville[i] * std::exp(-base->params.nu_star * base->grid.dt * double(i));
}

double ExteriorField::value(std::size_t i) const {
    // U_* - v = U_* (1 - f / F_*)
    return base->ustar(i) * (1.0 - liouville[i] / base->fstar[i]);
}

RadialProfile ExteriorField::profile(std::size_t stride) const {
    if (stride < 1) stride = 1;
    const ExteriorBase& b = *base;
    const double a = b.params.slow_rate(), ns = b.params.nu_star, h = b.grid.dt;
    const std::size_t n = b.grid.n;
    RadialProfile pr;
    for (std::size_t i = 0; i <= n; i += stride) {
        const double f = liouville[i];
        double df;
        if (i == 0) {
            df = (-3.0 * liouville[0] + 4.0 * liouville[1] - liouville[2]) / (2.0 * h);
        } else if (i == n) {
            df = (3.0 * liouville[i] - 4.0 * liouville[i - 1] + liouville[i - 2]) / (2.0 * h);
        } else {
            df = (liouville[i + 1] - liouville[i - 1]) / (2.0 * h);
        }
        const double t = b.grid.t(i);
        const double d = std::exp(-ns * h * double(i));
        const double v = d * f, vt = d * (df - ns * f);
        pr.log_r.push_back(t);
        pr.values.push_back(value(i));
        pr.slopes.push_back(b.ustar_t(i) - vt);
        // (U - U_∞) r^{2/(p-1)} = gap_* - v r^{2/(p-1)}
        pr.singular_gap.push_back(b.gap[i] - v * std::exp(a * t));
    }
    pr.lambda = b.lambda;
    return pr;
}

ResidualStats field_residual(const ExteriorField& field, const ExteriorProblem& ext) {
    const ExteriorBase& b = *field.base;
    const Params& pr = b.params;
    const std::size_t s = ext.opts.residual_stride;
    const std::size_t m = b.grid.n / s + 1;
    if (m < 5) throw Error(ErrorCode::insufficient_grid, "residual stride too coarse for the grid");
    const double H = b.grid.dt * double(s);
    std::vector<double> fs(m), us_t(m), df(m, 0.0), dut(m, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
        fs[k] = field.liouville[k * s];
        us_t[k] = b.ustar_t(k * s);
    }
    const auto& kt = kernels::active();
    kt.deriv5(fs.data(), df.data(), m, 1.0 / (12.0 * H));
    kt.deriv5(us_t.data(), dut.data(), m, 1.0 / (12.0 * H));
    const double ns = pr.nu_star, nu2 = pr.nu * pr.nu;
    ResidualStats st;
    st.min_signed = std::numeric_limits<double>::infinity();
    st.max_signed = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 2; k + 2 < m; ++k) {
        const std::size_t i = k * s;
        const double d2f = (-fs[k - 2] + 16.0 * fs[k - 1] - 30.0 * fs[k] + 16.0 * fs[k + 1] - fs[k + 2]) / (12.0 * H * H);
        const double d = std::exp(-ns * b.grid.dt * double(i));
        const double f = fs[k], f1 = df[k];
        const double vt = d * (f1 - ns * f), vtt = d * (d2f - 2.0 * ns * f1 + ns * ns * f);
        const double u = field.value(i);
        const double ut = us_t[k] - vt;
        const double utt = dut[k] - vtt;
        const double g = u > 0.0 ? std::exp(2.0 * b.grid.t(i) + pr.p * std::log(u)) : 0.0;
        const double t1 = utt, t2 = 2.0 * ns * ut, t3 = pr.mu * u;
        const double scale = std::abs(t1) + std::abs(t2) + std::abs(t3) + std::abs(g) + nu2 * std::abs(u);
        if (scale == 0.0) continue;
        const double r = (-(t1 + t2) + t3 - g) / scale;
        st.max_abs = std::max(st.max_abs, std::abs(r));
        st.min_signed = std::min(st.min_signed, r);
        st.max_signed = std::max(st.max_signed, r);
        ++st.samples;
    }
    if (st.samples == 0) st.min_signed = st.max_signed = 0.0;
    return st;
}

namespace {

ExteriorField linear_field(const ExteriorProblem& ext, double coupling) {
    const ExteriorBase& b = *ext.base;
    const std::size_t m = b.grid.size();
    std::vector<double> W(m);
    for (std::size_t i = 0; i < m; ++i) W[i] = coupling * std::exp((b.params.p - 1.0) * std::log(b.w[i]));
    ExteriorField out;
    out.base = ext.base;
    out.liouville = solve_potential(b.grid, W, b.params.nu, b.fstar[0] - ext.psi);
    return out;
}

} // namespace

ExteriorField build_subsolution(const ExteriorProblem& ext) {
    ExteriorField f = linear_field(ext, ext.params.p);
    for (std::size_t i = 1; i < f.liouville.size(); ++i) {
        if (f.liouville[i] >= f.base->fstar[i]) {
            throw Error(ErrorCode::monotonicity_broken,
                        "subsolution is not positive at log r = " + format_double(f.base->grid.t(i)));
        }
    }
    return f;
}

ExteriorField build_supersolution(const ExteriorProblem& ext) { return linear_field(ext, 1.0); }

IterationResult monotone_iterate(const ExteriorField& sub, const ExteriorField& super, const ExteriorProblem& ext) {
    const ExteriorBase& b = *ext.base;
    if (sub.base != ext.base || super.base != ext.base) {
        throw Error(ErrorCode::validation, "sub/supersolution were built for a different problem");
    }
    const std::size_t n = b.grid.n, m = n + 1;
    const Params& pr = b.params;
    const double h2 = b.grid.dt * b.grid.dt, nu2 = pr.nu * pr.nu, p = pr.p;
    // deviations: sub -> f_h (largest), super -> f_eta (smallest)
    const std::vector<double>& fh = sub.liouville;
    const std::vector<double>& fe = super.liouville;
    for (std::size_t i = 0; i < m; ++i) {
        if (fe[i] < -1e-12 * std::abs(fh[i]) || fe[i] > fh[i] * (1.0 + 1e-12) + 1e-300) {
            throw Error(ErrorCode::monotonicity_broken,
                        "subsolution exceeds supersolution at log r = " + format_double(b.grid.t(i)));
        }
    }
    std::vector<double> wpm1(m);
    double coupling = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        wpm1[i] = std::exp((p - 1.0) * std::log(b.w[i]));
        const double ws = b.w[i] * (1.0 - fe[i] / b.fstar[i]);
        coupling = std::max(coupling, p * std::exp((p - 1.0) * std::log(ws)));
    }
    std::vector<double> e(m, h2 * (nu2 + coupling));
    const DecayMode end = decay_mode(h2 * std::max(nu2 - p * wpm1[n], 0.0));
    const TridiagSolver solver(e, end);
    const std::vector<double> decay = liouville_decay(b.grid, pr.nu_star);

    double unorm = 0.0;
    for (std::size_t i = 0; i < m; ++i) unorm = std::max(unorm, sub.value(i));
    for (std::size_t i = 0; i < m; ++i) unorm = std::max(unorm, super.value(i));

    IterationResult res;
    res.coupling = coupling;
    res.solution.base = ext.base;
    std::vector<double> f = fh, next(m), rhs(m);
    for (int k = 1; k <= ext.opts.max_iters; ++k) {
        for (std::size_t i = 1; i < m; ++i) {
            const double fs = b.fstar[i];
            rhs[i] = h2 * (wpm1[i] * fs * convex_gap(f[i] / fs, p) + coupling * f[i]);
        }
        next[0] = f[0];
        solver.solve(rhs, next);
        double change = 0.0;
        for (std::size_t i = 1; i < m; ++i) {
            const double slack = 1e-10 * fh[i] + 1e-300;
            if (next[i] > f[i] + slack || next[i] < fe[i] - slack) {
                std::ostringstream os;
                os << "iterate " << k << " left the sandwich at log r = " << format_double(b.grid.t(i))
                   << " (f = " << format_double(next[i]) << ", bounds [" << format_double(fe[i]) << ", "
                   << format_double(f[i]) << "])";
                throw Error(ErrorCode::monotonicity_broken, os.str());
            }
            change = std::max(change, std::abs(next[i] - f[i]) * decay[i]);
        }
        f.swap(next);
        res.iterations = k;
        res.last_change = unorm > 0.0 ? change / unorm : change;
        if (res.last_change < ext.opts.tol) {
            res.solution.liouville = std::move(f);
            return res;
        }
    }
    throw Error(ErrorCode::max_iters, "monotone iteration did not converge in " + std::to_string(ext.opts.max_iters) +
                                          " iterations (last change " + format_double(res.last_change) + ")");
}

ExteriorReport solve_exterior(const ExteriorProblem& ext) {
    ExteriorReport rep;
    rep.lambda = ext.base->lambda;
    rep.sub = build_subsolution(ext);
    rep.super = build_supersolution(ext);
    rep.result = monotone_iterate(rep.sub, rep.super, ext);
    rep.sub_residual = field_residual(rep.sub, ext);
    rep.super_residual = field_residual(rep.super, ext);
    rep.residual = field_residual(rep.result.solution, ext);

    const std::vector<double>& fh = rep.sub.liouville;
    const std::vector<double>& fe = rep.super.liouville;
    const std::vector<double>& fu = rep.result.solution.liouville;
    rep.ordered = true;
    rep.positive = true;
    for (std::size_t i = 0; i < fu.size(); ++i) {
        const double slack = 1e-10 * fh[i];
        if (fe[i] < 0.0 || fe[i] > fh[i] + slack || fu[i] < fe[i] - slack || fu[i] > fh[i] + slack) rep.ordered = false;
        if (i > 0 && !(rep.result.solution.value(i) > 0.0)) rep.positive = false;
    }
    const double scale = std::exp(ext.params.nu_star * ext.base->grid.t0);
    rep.tail_deviation = fu.back() * scale;
    rep.boundary_deviation = fu.front() * scale;
    return rep;
}

double lambda_psi(const PhaseTrajectory& traj, const Params& params, double R_K, double psi) {
    if (!(R_K > 0.0)) throw Error(ErrorCode::validation, "R_K must be positive");
    if (psi < 0.0) throw Error(ErrorCode::validation, "psi must be nonnegative");
    if (psi == 0.0) return 0.0;
    const double tK = std::log(R_K);
    const double target = psi * std::exp(params.slow_rate() * tK); // level of w
    const double c = singular_coefficient(params);
    if (target >= c) {
        throw Error(ErrorCode::validation, "psi must stay below U_inf(R_K) = " + format_double(c * std::exp(-params.slow_rate() * tK)));
    }
    if (!traj.orbit) throw Error(ErrorCode::validation, "trajectory has no orbit model");
    const OrbitModel& orb = *traj.orbit;
    // first sample at or above the level, then bisection on the orbit
    double hi = traj.t.back();
    bool found = false;
    double lo = traj.t.front();
    for (std::size_t i = 0; i < traj.size(); ++i) {
        if (traj.states[i].x >= target) {
            hi = traj.t[i];
            lo = i > 0 ? traj.t[i - 1] : traj.t[0] - 1.0;
            found = true;
            break;
        }
    }
    if (!found) {
        for (int k = 0; k < 200 && orb.at(hi).x < target; ++k) hi += 10.0;
        lo = traj.t.back();
    }
    while (orb.at(lo).x >= target) lo -= 10.0;
    for (int k = 0; k < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++k) {
        const double mid = 0.5 * (lo + hi);
        (orb.at(mid).x >= target ? hi : lo) = mid;
    }
    return std::exp(hi - tK);
}

FamilyReport continuum_family(const Params& params, double R_K, double psi, const std::vector<ExtReal>& lambdas,
                              const PhaseTrajectory& traj, const ExteriorOptions& opts, int workers) {
    if (lambdas.empty()) throw Error(ErrorCode::validation, "lambda list is empty");
    const double lpsi = lambda_psi(traj, params, R_K, psi);
    for (const ExtReal& l : lambdas) {
        if (!l.is_infinite() && !(l.value() > lpsi)) {
            throw Error(ErrorCode::validation, "lambda = " + format_double(l.value()) + " must exceed lambda_psi = " + format_double(lpsi));
        }
    }
    const std::size_t m = lambdas.size();
    FamilyReport out;
    out.members.resize(m);
    std::vector<std::exception_ptr> errors(m);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < m; i = next++) {
            try {
                const ExteriorProblem ext = make_exterior_problem(params, R_K, psi, lambdas[i], &traj, opts);
                out.members[i] = solve_exterior(ext);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int nthreads = std::clamp(workers, 1, int(m));
    std::vector<std::thread> pool;
    for (int k = 1; k < nthreads; ++k) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    out.separation.assign(m, std::vector<double>(m, 0.0));
    out.distinct = true;
    if (m < 2) return out;
    const ExteriorBase& b0 = *out.members[0].result.solution.base;
    const double a = params.slow_rate(), ns = params.nu_star;
    const double scale = std::exp(ns * b0.grid.t0);
    const std::size_t n = b0.grid.n;
    const auto first = std::size_t(std::max(0.0, double(n) - std::numbers::ln10 / b0.grid.dt));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            const ExteriorBase& bi = *out.members[i].result.solution.base;
            const ExteriorBase& bj = *out.members[j].result.solution.base;
            const auto& fi = out.members[i].result.solution.liouville;
            const auto& fj = out.members[j].result.solution.liouville;
            double sep = std::numeric_limits<double>::infinity();
            bool ok = true;
            for (std::size_t k = first; k <= n; ++k) {
                const double t = b0.grid.t(k);
                const double s = std::abs(bj.gap[k] - bi.gap[k]) * std::exp((ns - a) * t);
                sep = std::min(sep, s);
                if (!(s > (std::abs(fi[k]) + std::abs(fj[k])) * scale)) ok = false;
            }
            out.separation[i][j] = out.separation[j][i] = sep;
            if (!ok) out.distinct = false;
        }
    }
    return out;
}

} // namespace hardy
