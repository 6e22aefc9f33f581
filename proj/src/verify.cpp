#include "hardy/verify.hpp"

#include "hardy/error.hpp"
#include "hardy/exponent_atlas.hpp"
#include "hardy/exterior.hpp"
#include "hardy/profile_analysis.hpp"
#include "hardy/serialize.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <thread>

namespace hardy {

namespace {

struct Triple {
    int N;
    double nu;
    double p;
};

const std::vector<Triple> stable_triples = {
    {11, 4.5, 10.0}, {12, 5.0, 8.0},  {13, 5.5, 5.0},  {15, 6.5, 3.0},  {15, 6.5, 6.5},  {20, 9.0, 2.0},
    {20, 9.0, 3.0},  {25, 11.5, 2.0}, {30, 14.0, 1.8}, {12, 4.0, 2.5},  {14, 6.0, 4.0},  {12, 5.02, 10.0},
};

const std::vector<Triple> unstable_triples = {
    {3, 0.5, 7.0}, {3, 1.0, 7.0}, {4, 1.0, 4.0},  {5, 1.5, 5.0}, {5, 2.0, 6.0}, {6, 2.0, 4.0},
    {8, 3.0, 3.0}, {10, 4.0, 3.0}, {11, 4.5, 3.0}, {7, 2.0, 3.0}, {9, 3.0, 2.5}, {3, 1.5, 8.0},
};

struct Shot {
    Triple triple;
    Params params;
    PhaseTrajectory traj;
    std::string error;
};

template <class F>
void parallel_for(std::size_t n, int workers, F&& body) {
    std::atomic<std::size_t> next{0};
    auto run = [&] {
        for (std::size_t i = next++; i < n; i = next++) body(i);
    };
    const int k = std::max(1, std::min<int>(workers, int(n)));
    std::vector<std::thread> pool;
    for (int i = 1; i < k; ++i) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
}

class ShotPool {
public:
    explicit ShotPool(int workers) : workers_(workers) {}

    const std::vector<Shot>& get() {
        if (!ready_) {
            std::vector<Triple> all = stable_triples;
            all.insert(all.end(), unstable_triples.begin(), unstable_triples.end());
            shots_.resize(all.size());
            parallel_for(all.size(), workers_, [&](std::size_t i) {
                Shot& s = shots_[i];
                s.triple = all[i];
                try {
                    s.params = make_params(all[i].N, all[i].nu, all[i].p);
                    s.traj = shoot_heteroclinic(s.params);
                } catch (const std::exception& e) {
                    s.error = e.what();
                }
            });
            ready_ = true;
        }
        return shots_;
    }

    const Shot& find(int N, double nu, double p) {
        for (const auto& s : get())
            if (s.triple.N == N && s.triple.nu == nu && s.triple.p == p) return s;
        throw Error(ErrorCode::validation, "triple not in the pool");
    }

private:
    int workers_;
    bool ready_ = false;
    std::vector<Shot> shots_;
};

std::string label(const Triple& t) {
    return "(" + std::to_string(t.N) + ", " + format_double(t.nu) + ", " + format_double(t.p) + ")";
}

std::string sci(double v) {
    std::ostringstream os;
    os.precision(2);
    os << std::scientific << v;
    return os.str();
}

bool is_stable(const Triple& t) {
    return std::any_of(stable_triples.begin(), stable_triples.end(),
                       [&](const Triple& s) { return s.N == t.N && s.nu == t.nu && s.p == t.p; });
}

// Random (N, nu) with nu spread over both sides of nu_* and nu_bar.
std::pair<int, double> random_pair(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> nd(3, 40);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    const int N = nd(rng);
    const double top = 2.0 * std::max(nu_bar(N), 0.5 * (N - 2)) + 1.0;
    double nu = 0.0;
    while (!(nu > 0.0)) nu = top * ud(rng);
    return {N, nu};
}

CriterionResult c1_closed_forms() {
    CriterionResult r{1, "exponent atlas closed forms", false, {}, 0.0};
    double err_nu_star = 0.0, err_nu_bar = 0.0, err_jl = 0.0;
    for (int N = 11; N <= 30; ++N) {
        const double s = std::sqrt(double(N - 1));
        const ExponentReport rep = exponent_report(N, 0.5 * (N - 2));
        const double sharp = (N + 2 * s) / (N - 4 + 2 * s);
        const double minus = (N - 2 * s) / (N - 4 - 2 * s);
        err_nu_star = std::max(err_nu_star, std::abs(rep.p_sharp / sharp - 1));
        err_nu_star = rep.p_minus ? std::max(err_nu_star, std::abs(*rep.p_minus / minus - 1)) : 1.0;
        err_jl = std::max(err_jl, std::abs(joseph_lundgren_exponent(N).value() / minus - 1));

        const ExponentReport bar = exponent_report(N, nu_bar(N));
        const double pair = double(N + 2) / double(N - 10);
        if (!bar.p_minus || !bar.p_plus) {
            err_nu_bar = 1.0;
            continue;
        }
        err_nu_bar = std::max({err_nu_bar, std::abs(*bar.p_minus / pair - 1), std::abs(*bar.p_plus / pair - 1)});
    }
    r.pass = err_nu_star <= 1e-9 && err_jl <= 1e-9 && err_nu_bar <= 1e-8;
    r.detail = "N=11..30: nu=nu_* rel err " + sci(err_nu_star) + " (tol 1e-9), Joseph-Lundgren " + sci(err_jl) +
               ", nu=nu_bar p_-=p_+ rel err " + sci(err_nu_bar) + " (tol 1e-8)";
    return r;
}

CriterionResult c2_ordering() {
    CriterionResult r{2, "ordering chain on random (N, nu)", false, {}, 0.0};
    std::mt19937_64 rng(20240601);
    int violations = 0, with_pair = 0;
    const int n = 10000;
    for (int k = 0; k < n; ++k) {
        const auto [N, nu] = random_pair(rng);
        const ExponentReport rep = exponent_report(N, nu);
        if (rep.p_minus) ++with_pair;
        if (!ordering_chain_holds(rep)) ++violations;
    }
    r.pass = violations == 0;
    r.detail = std::to_string(n) + " pairs (" + std::to_string(with_pair) + " with p_-), " +
               std::to_string(violations) + " violations";
    return r;
}

CriterionResult c3_dual_path() {
    CriterionResult r{3, "dual-path stability consistency", false, {}, 0.0};
    std::mt19937_64 rng(7741);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    int disagreements = 0, stable = 0, outside = 0;
    const int n = 10000;
    for (int k = 0; k < n; ++k) {
        const auto [N, nu] = random_pair(rng);
        const ExponentReport rep = exponent_report(N, nu);
        double hi = 0.0;
        if (rep.p_upper.is_finite()) {
            hi = rep.p_upper.value();
        } else {
            hi = 3.0 * rep.p_sobolev;
            if (rep.p_plus) hi = std::max(hi, 1.5 * *rep.p_plus);
        }
        double p = rep.p_lower;
        while (!(p > rep.p_lower && p < hi)) p = rep.p_lower + (hi - rep.p_lower) * ud(rng);
        const SingularStability s = classify_singular_stability(make_params(N, nu, p));
        if (s.verdict == RegimeVerdict::outside_range) ++outside;
        if (s.verdict == RegimeVerdict::stable) ++stable;
        if (!s.consistent) ++disagreements;
    }
    r.pass = disagreements == 0 && outside == 0;
    r.detail = std::to_string(n) + " triples (" + std::to_string(stable) + " stable), " +
               std::to_string(disagreements) + " disagreements";
    return r;
}

CriterionResult c4_singular_residual() {
    CriterionResult r{4, "singular solution residual", false, {}, 0.0};
    const std::vector<double> grid = uniform_log_grid(-10.0, 10.0, 201);
    double worst = 0.0;
    int points = 0;
    for (int N : {3, 4, 6, 10, 11, 15, 20, 30}) {
        const double ns = 0.5 * (N - 2);
        for (double nu : {0.3, 1.0, ns, ns + 1.0}) {
            const ExponentReport rep = exponent_report(N, nu);
            const double hi = rep.p_upper.is_finite() ? rep.p_upper.value() : 4.0 * rep.p_sobolev;
            for (double frac : {0.1, 0.35, 0.6, 0.85}) {
                const double p = rep.p_lower + frac * (hi - rep.p_lower);
                worst = std::max(worst, singular_residual(make_params(N, nu, p), grid));
                ++points;
            }
        }
    }
    r.pass = points >= 100 && worst <= 1e-12;
    r.detail = std::to_string(points) + " triples x 201 radii, max scaled residual " + sci(worst) + " (tol 1e-12)";
    return r;
}

CriterionResult c5_asymptotics(ShotPool& pool) {
    CriterionResult r{5, "heteroclinic asymptotics", false, {}, 0.0};
    double tail = 0.0, head = 0.0;
    int count = 0, stable = 0;
    std::string failures;
    for (const auto& s : pool.get()) {
        if (!s.error.empty()) {
            failures += " " + label(s.triple) + ": " + s.error;
            continue;
        }
        const RadialProfile u = build_profile(s.traj, ExtReal(1.0), s.params);
        const double C = singular_coefficient(s.params);
        const double t_end = u.log_r.back(), t_head = u.log_r.front();
        tail = std::max(tail, std::abs(u.values.back() * std::exp(s.params.slow_rate() * t_end) / C - 1));
        head = std::max(head, std::abs(u.values.front() * std::exp((s.params.nu_star - s.params.nu) * t_head) - 1));
        ++count;
        if (is_stable(s.triple)) ++stable;
    }
    r.pass = failures.empty() && count >= 20 && stable >= 5 && count - stable >= 5 && tail <= 1e-3 && head <= 5e-3;
    r.detail = std::to_string(count) + " triples (" + std::to_string(stable) + " stable): tail rel err " + sci(tail) +
               " (tol 1e-3), head rel err " + sci(head) + " (tol 5e-3)" + failures;
    return r;
}

CriterionResult c6_lyapunov_oracle(ShotPool& pool, int workers) {
    CriterionResult r{6, "Lyapunov monotonicity and RK4 oracle", false, {}, 0.0};
    double worst_rise = 0.0, worst_diff = 0.0, worst_self = 0.0;
    std::string failures;
    const auto& shots = pool.get();
    std::vector<OracleComparison> cmp(shots.size());
    parallel_for(shots.size(), workers, [&](std::size_t i) {
        if (shots[i].error.empty()) cmp[i] = rk4_oracle_compare(shots[i].traj, shots[i].params);
    });
    for (std::size_t i = 0; i < shots.size(); ++i) {
        const auto& s = shots[i];
        if (!s.error.empty()) {
            failures += " " + label(s.triple) + ": " + s.error;
            continue;
        }
        double scale = 0.0;
        std::vector<double> e(s.traj.size());
        for (std::size_t k = 0; k < e.size(); ++k) {
            e[k] = lyapunov_energy(s.traj.states[k], s.params);
            scale = std::max(scale, std::abs(e[k]));
        }
        for (std::size_t k = 1; k < e.size(); ++k) worst_rise = std::max(worst_rise, (e[k] - e[k - 1]) / scale);
        worst_diff = std::max(worst_diff, cmp[i].max_diff);
        worst_self = std::max(worst_self, cmp[i].self_estimate);
    }
    r.pass = failures.empty() && worst_rise <= 1e-12 && worst_diff <= 1e-6;
    r.detail = "max relative energy rise " + sci(worst_rise) + " (tol 1e-12), oracle sup|dw| " + sci(worst_diff) +
               " (tol 1e-6), oracle h vs h/2 " + sci(worst_self) + failures;
    return r;
}

CriterionResult c7_dichotomy(ShotPool& pool) {
    CriterionResult r{7, "stable ordering / unstable oscillation", false, {}, 0.0};
    std::string failures;
    double min_sep = std::numeric_limits<double>::infinity(), worst_spacing = 0.0;
    std::size_t min_changes = std::numeric_limits<std::size_t>::max();
    for (const auto& s : pool.get()) {
        if (!s.error.empty()) {
            failures += " " + label(s.triple) + ": " + s.error;
            continue;
        }
        const Params& P = s.params;
        const double dt = s.traj.t[1] - s.traj.t[0];
        if (is_stable(s.triple)) {
            const auto grid = spaced_log_grid(s.traj.t.front(), s.traj.t.back(), dt);
            const RadialProfile a = build_profile_on(s.traj, ExtReal(1.0), P, grid);
            const RadialProfile b = build_profile_on(s.traj, ExtReal(2.0), P, grid);
            const double C = singular_coefficient(P);
            bool ordered = true;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const bool head = a.values[i] * std::exp(P.slow_rate() * grid[i]) < 0.5 * C;
                const bool lt = head ? a.values[i] < b.values[i] : a.singular_gap[i] < b.singular_gap[i];
                ordered = ordered && lt && b.singular_gap[i] < 0.0;
            }
            const double t_tail = grid.back() - std::log(10.0);
            double lo = std::numeric_limits<double>::infinity(), first = 0.0;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                if (grid[i] < t_tail) continue;
                const double d = (b.singular_gap[i] - a.singular_gap[i]) * std::exp(P.beta * grid[i]);
                if (first == 0.0) first = d;
                lo = std::min(lo, d);
            }
            const bool bounded = lo > 0.0 && lo >= 0.5 * first;
            min_sep = std::min(min_sep, lo);
            if (!ordered || !bounded) failures += " " + label(s.triple) + (ordered ? " tail bound" : " ordering");
        } else {
            const EigenData eig = eigen_analysis(P);
            const double period = M_PI / eig.omega_spiral;
            const ApproachReport ap = detect_approach(s.traj, P);
            const double t0 = ap.crossing_times.empty() ? s.traj.t.front() : ap.crossing_times.front() - 0.5;
            const auto grid = spaced_log_grid(t0, t0 + 15.0, dt);
            const RadialProfile a = build_profile_on(s.traj, ExtReal(1.0), P, grid);
            const RadialProfile b = build_profile_on(s.traj, ExtReal::infinity(), P, grid);
            const SignChanges sc = tail_sign_changes(a, b, std::exp(grid.front()), &P);
            double spacing_err = 1.0;
            if (sc.count >= 2) {
                const double mean = (sc.log_r.back() - sc.log_r.front()) / double(sc.count - 1);
                spacing_err = std::abs(mean / period - 1);
            }
            min_changes = std::min(min_changes, sc.count);
            worst_spacing = std::max(worst_spacing, spacing_err);
            if (sc.count < 3 || spacing_err > 0.05)
                failures += " " + label(s.triple) + " " + std::to_string(sc.count) + " changes";
        }
    }
    r.pass = failures.empty();
    r.detail = "stable: min tail (U_2-U_1) r^nu_* " + sci(min_sep) + "; unstable: min sign changes " +
               std::to_string(min_changes) + " in 15 units, spacing vs pi/omega " + sci(worst_spacing) +
               " (tol 5e-2)" + failures;
    return r;
}

double linear_error(const Params& P, double W, double spacing, bool tail_only) {
    ExteriorOptions opts;
    opts.spacing = spacing;
    const LinearHardySolution sol = solve_linear_hardy(make_linear_problem(1.0, 1.0, [W](double) { return W; }, opts), P);
    const double rate = P.nu_star + std::sqrt(P.nu * P.nu - W);
    const double t_tail = sol.grid.t(sol.grid.n) - std::log(10.0);
    double err = 0.0;
    for (std::size_t i = 0; i < sol.grid.size(); ++i) {
        const double t = sol.grid.t(i);
        if (tail_only && t < t_tail) continue;
        err = std::max(err, std::abs(sol.value(i) * std::exp(rate * t) - 1));
    }
    return err;
}

CriterionResult c8_linear() {
    CriterionResult r{8, "linear Hardy solver closed forms", false, {}, 0.0};
    const Params P = make_params(15, 6.5, 3.0);
    double worst_order_dev = 0.0, worst_tail = 0.0;
    std::string orders;
    for (double W : {0.0, P.p * P.gamma}) {
        const double e1 = linear_error(P, W, 1.0 / 64.0, false);
        const double e2 = linear_error(P, W, 1.0 / 128.0, false);
        const double e3 = linear_error(P, W, 1.0 / 256.0, false);
        const double o1 = std::log2(e1 / e2), o2 = std::log2(e2 / e3);
        worst_order_dev = std::max({worst_order_dev, std::abs(o1 - 2), std::abs(o2 - 2)});
        worst_tail = std::max(worst_tail, linear_error(P, W, ExteriorOptions{}.spacing, true));
        orders += " " + format_double(std::round(o2 * 1000) / 1000);
    }
    r.pass = worst_order_dev <= 0.1 && worst_tail <= 1e-6;
    r.detail = "observed orders (V=0, V=p gamma)" + orders + ", tail rel err at default spacing " + sci(worst_tail) +
               " (tol 1e-6)";
    return r;
}

CriterionResult c9_exterior(ShotPool& pool, int workers) {
    CriterionResult r{9, "exterior problem psi=0 continuum", false, {}, 0.0};
    const Shot& s = pool.find(15, 6.5, 3.0);
    if (!s.error.empty()) {
        r.detail = s.error;
        return r;
    }
    const std::vector<ExtReal> lambdas = {ExtReal(1.0), ExtReal(2.0), ExtReal(4.0), ExtReal::infinity()};
    const FamilyReport fam = continuum_family(s.params, 1.0, 0.0, lambdas, s.traj, {}, workers);
    const double target = std::sqrt(12.0);
    int max_it = 0;
    double max_res = 0.0, worst_const = 0.0, worst_tail = 0.0;
    bool ok = fam.distinct;
    for (const auto& m : fam.members) {
        max_it = std::max(max_it, m.result.iterations);
        max_res = std::max(max_res, m.residual.max_abs);
        const DecayFit fit = classify_decay(m.result.solution.profile(64), s.params);
        worst_const = std::max(worst_const, std::abs(fit.limit_constant / target - 1));
        worst_tail = std::max(worst_tail, m.tail_deviation / m.boundary_deviation);
        ok = ok && m.ordered && m.positive && fit.classification == DecayClass::slow;
    }
    r.pass = ok && max_it <= 500 && max_res <= 1e-6 && worst_const <= 1e-3 && worst_tail <= 1e-6;
    r.detail = "lambda={1,2,4,inf}: max iterations " + std::to_string(max_it) + ", residual " + sci(max_res) +
               " (tol 1e-6), tail constant vs sqrt(12) " + sci(worst_const) + " (tol 1e-3), tail/boundary deviation " +
               sci(worst_tail) + ", distinct " + (fam.distinct ? "yes" : "no");
    return r;
}

CriterionResult c10_certificates(ShotPool& pool) {
    CriterionResult r{10, "stability certificates", false, {}, 0.0};
    int certified = 0, stable_total = 0, witnessed = 0, unstable_total = 0;
    std::string failures;
    for (const auto& s : pool.get()) {
        if (!s.error.empty()) {
            failures += " " + label(s.triple) + ": " + s.error;
            continue;
        }
        if (is_stable(s.triple)) {
            for (double lam : {0.25, 1.0, 4.0}) {
                ++stable_total;
                const auto cert = stability_certificate(build_profile(s.traj, ExtReal(lam), s.params), s.params);
                if (cert.verdict == StabilityVerdict::certified_stable) ++certified;
                else failures += " " + label(s.triple) + " lambda=" + format_double(lam);
            }
        } else {
            ++unstable_total;
            const auto cert = stability_certificate(build_profile(s.traj, ExtReal::infinity(), s.params), s.params);
            if (cert.verdict == StabilityVerdict::witness_unstable && cert.witness && cert.witness->quadratic_form < 0)
                ++witnessed;
            else failures += " " + label(s.triple) + " U_inf";
        }
    }
    r.pass = failures.empty() && unstable_total >= 10 && witnessed == unstable_total && certified == stable_total;
    r.detail = std::to_string(certified) + "/" + std::to_string(stable_total) + " stable U_lambda certified, " +
               std::to_string(witnessed) + "/" + std::to_string(unstable_total) + " unstable U_inf witnessed" +
               failures;
    return r;
}

} // namespace

OracleComparison rk4_oracle_compare(const PhaseTrajectory& traj, const Params& P) {
    const double beta = P.beta, gamma = P.gamma, p = P.p;
    const double ap = -beta + P.nu;
    const double chi = (p * ap) * (p * ap) + 2 * beta * p * ap - gamma;
    const double a2 = -1.0 / chi;
    const double rho = std::abs(beta) + P.nu + std::sqrt(std::abs(P.nu * P.nu - p * gamma));

    const double e_target = std::min(1e-6, std::pow(10.0, -8.0 / (p - 1.0)));
    const double tau_target = std::log(e_target) / ap;
    std::size_t k0 = 0;
    while (k0 + 1 < traj.size() && traj.t[k0 + 1] <= tau_target) ++k0;
    const double dt = traj.t[1] - traj.t[0];
    const int m = std::max(1, int(std::ceil(dt * rho / 0.02)));

    auto field = [&](double x, double y, double& dx, double& dy) {
        dx = y;
        dy = -2 * beta * y + gamma * x - (x > 0 ? std::pow(x, p) : 0.0);
    };
    auto run = [&](int sub) {
        const double E = std::exp(ap * traj.t[k0]);
        double x = E + a2 * std::pow(E, p), y = ap * E + p * ap * a2 * std::pow(E, p);
        std::vector<double> out{x};
        for (std::size_t k = k0 + 1; k < traj.size(); ++k) {
            const double h = (traj.t[k] - traj.t[k - 1]) / sub;
            for (int j = 0; j < sub; ++j) {
                double k1x, k1y, k2x, k2y, k3x, k3y, k4x, k4y;
                field(x, y, k1x, k1y);
                field(x + 0.5 * h * k1x, y + 0.5 * h * k1y, k2x, k2y);
                field(x + 0.5 * h * k2x, y + 0.5 * h * k2y, k3x, k3y);
                field(x + h * k3x, y + h * k3y, k4x, k4y);
                x += h / 6 * (k1x + 2 * k2x + 2 * k3x + k4x);
                y += h / 6 * (k1y + 2 * k2y + 2 * k3y + k4y);
            }
            out.push_back(x);
        }
        return out;
    };
    const std::vector<double> coarse = run(m), fine = run(2 * m);
    OracleComparison c;
    for (std::size_t i = 0; i < fine.size(); ++i) {
        c.max_diff = std::max(c.max_diff, std::abs(fine[i] - traj.states[k0 + i].x));
        c.self_estimate = std::max(c.self_estimate, std::abs(fine[i] - coarse[i]));
    }
    c.samples = fine.size();
    return c;
}

std::string format_result(const CriterionResult& r) {
    std::ostringstream os;
    os.precision(2);
    os << (r.pass ? "PASS " : "FAIL ") << (r.id < 10 ? " " : "") << r.id << " " << r.name << ": " << r.detail << " ("
       << std::fixed << r.seconds << " s)";
    return os.str();
}

std::vector<CriterionResult> run_acceptance(int workers, const std::vector<int>& only) {
    ShotPool pool(workers);
    const std::map<int, std::pair<double, std::function<CriterionResult()>>> table = {
        {1, {1.0, c1_closed_forms}},
        {2, {10.0, c2_ordering}},
        {3, {10.0, c3_dual_path}},
        {4, {5.0, c4_singular_residual}},
        {5, {60.0, [&] { return c5_asymptotics(pool); }}},
        {6, {60.0, [&] { return c6_lyapunov_oracle(pool, workers); }}},
        {7, {30.0, [&] { return c7_dichotomy(pool); }}},
        {8, {10.0, c8_linear}},
        {9, {120.0, [&] { return c9_exterior(pool, workers); }}},
        {10, {30.0, [&] { return c10_certificates(pool); }}},
    };
    std::vector<CriterionResult> out;
    for (const auto& [id, entry] : table) {
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        CriterionResult r;
        try {
            r = entry.second();
        } catch (const std::exception& e) {
            r.id = id;
            r.name = "criterion " + std::to_string(id);
            r.detail = std::string("exception: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (r.seconds > entry.first) {
            r.pass = false;
            r.detail += ", runtime over budget " + format_double(entry.first) + " s";
        }
        out.push_back(r);
    }
    return out;
}

} // namespace hardy
