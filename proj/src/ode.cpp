#include "hardy/ode.hpp"

#include <algorithm>
#include <cmath>

namespace hardy::ode {

namespace {

// Dormand–Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// continuous extension
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

State axpy(const State& y, double h, std::initializer_list<std::pair<double, const State*>> terms) {
    State out = y;
    for (const auto& [c, k] : terms) {
        out[0] += h * c * (*k)[0];
        out[1] += h * c * (*k)[1];
    }
    return out;
}

double error_norm(const State& err, const State& y0, const State& y1, const Options& opt) {
    double acc = 0.0;
    for (int i = 0; i < 2; ++i) {
        const double sc = opt.atol[i] + opt.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        const double r = err[i] / sc;
        acc += r * r;
    }
    return std::sqrt(acc / 2.0);
}

double initial_step(const Rhs& f, double t0, const State& y0, const State& k1, double dir,
                    const Options& opt) {
    double dnf = 0.0, dny = 0.0;
    for (int i = 0; i < 2; ++i) {
        const double sk = opt.atol[i] + opt.rtol * std::abs(y0[i]);
        dnf += (k1[i] / sk) * (k1[i] / sk);
        dny += (y0[i] / sk) * (y0[i] / sk);
    }
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
    h = std::min(h, opt.h_max);
    const State y1 = axpy(y0, dir * h, {{1.0, &k1}});
    const State k2 = f(t0 + dir * h, y1);
    double der2 = 0.0;
    for (int i = 0; i < 2; ++i) {
        const double sk = opt.atol[i] + opt.rtol * std::abs(y0[i]);
        const double d = (k2[i] - k1[i]) / sk;
        der2 += d * d;
    }
    der2 = std::sqrt(der2) / h;
    const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
    const double h1 = der12 <= 1e-15 ? std::max(1e-6, std::abs(h) * 1e-3) : std::pow(0.01 / der12, 0.2);
    return std::min({100 * std::abs(h), h1, opt.h_max});
}

} // namespace

State DenseStep::eval(double t) const {
    const double th = (t - t0) / h, th1 = 1.0 - th;
    State y;
    for (int i = 0; i < 2; ++i) {
        y[i] = rc[0][i] + th * (rc[1][i] + th1 * (rc[2][i] + th * (rc[3][i] + th1 * rc[4][i])));
    }
    return y;
}

State DenseStep::eval_derivative(double t) const {
    // d/dθ of rc0 + θ(rc1 + θ1(rc2 + θ(rc3 + θ1 rc4))), θ1 = 1 - θ
    const double th = (t - t0) / h;
    State d;
    for (int i = 0; i < 2; ++i) {
        const double a = rc[1][i], b = rc[2][i], c = rc[3][i], e = rc[4][i];
        // expand: θ a + θ(1-θ) b + θ^2 (1-θ) c + θ^2 (1-θ)^2 e
        const double dpoly = a + (1 - 2 * th) * b + (2 * th - 3 * th * th) * c +
                             (2 * th - 6 * th * th + 4 * th * th * th) * e;
        d[i] = dpoly / h;
    }
    return d;
}

Result integrate(const Rhs& f, double t0, const State& y0, double t_end, const Options& opt,
                 const StopFn& stop) {
    Result res;
    res.t = t0;
    res.y = y0;
    const double dir = t_end >= t0 ? 1.0 : -1.0;
    State k1 = f(t0, y0);
    double h = opt.h_init > 0.0 ? opt.h_init : initial_step(f, t0, y0, k1, dir, opt);
    double t = t0;
    State y = y0;
    bool last_rejected = false;
    const double uround = 2.220446049250313e-16;

    for (long n = 0;; ++n) {
        if (n >= opt.max_steps) {
            res.status = Status::too_many_steps;
            break;
        }
        if (0.1 * std::abs(h) <= std::abs(t) * uround) {
            res.status = Status::step_underflow;
            break;
        }
        bool final_step = false;
        if ((t + 1.01 * h - t_end) * dir > 0.0) {
            h = t_end - t;
            final_step = true;
        }
        const double hs = dir * std::abs(h);
        const State y2 = axpy(y, hs, {{a21, &k1}});
        const State k2 = f(t + c2 * hs, y2);
        const State y3 = axpy(y, hs, {{a31, &k1}, {a32, &k2}});
        const State k3 = f(t + c3 * hs, y3);
        const State y4 = axpy(y, hs, {{a41, &k1}, {a42, &k2}, {a43, &k3}});
        const State k4 = f(t + c4 * hs, y4);
        const State y5 = axpy(y, hs, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
        const State k5 = f(t + c5 * hs, y5);
        const State y6 = axpy(y, hs, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
        const State k6 = f(t + hs, y6);
        const State yn = axpy(y, hs, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
        const State k7 = f(t + hs, yn);
        State err;
        for (int i = 0; i < 2; ++i) {
            err[i] = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        }
        const bool finite = std::isfinite(yn[0]) && std::isfinite(yn[1]);
        const double en = finite ? error_norm(err, y, yn, opt) : 1e10;

        if (en <= 1.0) {
            DenseStep ds;
            ds.t0 = t;
            ds.h = hs;
            for (int i = 0; i < 2; ++i) {
                const double ydiff = yn[i] - y[i];
                const double bspl = hs * k1[i] - ydiff;
                ds.rc[0][i] = y[i];
                ds.rc[1][i] = ydiff;
                ds.rc[2][i] = bspl;
                ds.rc[3][i] = ydiff - hs * k7[i] - bspl;
                ds.rc[4][i] = hs * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
            }
            res.steps.push_back(ds);
            ++res.accepted;
            t = final_step ? t_end : t + hs;
            y = yn;
            k1 = k7;
            res.t = t;
            res.y = y;
            if (stop && stop(t, y, res.steps.back())) {
                res.status = Status::stopped;
                return res;
            }
            if (final_step) {
                res.status = Status::reached_end;
                return res;
            }
            double fac = 0.9 * std::pow(std::max(en, 1e-10), -0.2);
            fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 10.0);
            h = std::min(std::abs(h) * fac, opt.h_max);
            last_rejected = false;
        } else {
            if (!finite && std::abs(h) < 1e-300) {
                res.status = Status::non_finite;
                return res;
            }
            ++res.rejected;
            const double fac = std::clamp(0.9 * std::pow(en, -0.2), 0.1, 0.9);
            h = std::abs(h) * fac;
            last_rejected = true;
        }
    }
    return res;
}

} // namespace hardy::ode
