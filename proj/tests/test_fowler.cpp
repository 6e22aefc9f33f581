#include "hardy/error.hpp"
#include "hardy/fowler.hpp"
#include "hardy/heteroclinic.hpp"
#include "hardy/profile.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace hardy;

TEST_SUITE("fowler_dynamics") {

TEST_CASE("vector field and equilibria") {
    const Params P = make_params(5, 1.5, 5.0);
    const PhaseState o = vector_field({0.0, 0.0}, P);
    CHECK(o.x == 0.0);
    CHECK(o.y == 0.0);
    const PhaseState one = vector_field({1.0, 0.0}, P);
    CHECK(one.x == 0.0);
    CHECK(one.y == doctest::Approx(1.25 * 1.0 - 1.0).epsilon(1e-14));

    const Equilibria eq = equilibria(P);
    REQUIRE(eq.points.size() == 2);
    CHECK(eq.points[1].x == doctest::Approx(std::pow(1.25, 0.25)).epsilon(1e-14));
    CHECK(eq.points[1].x == doctest::Approx(1.05737).epsilon(1e-5));

    for (auto [N, nu, p] : {std::tuple{5, 1.5, 5.0}, {15, 6.5, 3.0}, {3, 0.25, 7.0}, {20, 9.0, 1.5}}) {
        const Params Q = make_params(N, nu, p);
        for (const auto& s : equilibria(Q).points) {
            const PhaseState f = vector_field(s, Q);
            CHECK(std::hypot(f.x, f.y) <= 1e-14 * std::max(1.0, std::pow(s.x, Q.p)));
        }
    }
    const Params beyond = make_params(3, 0.25, 10.0);
    CHECK(equilibria(beyond).points.size() == 1);
    CHECK_THROWS_AS(vector_field({-1.0, 0.0}, P), Error);
}

TEST_CASE("eigen analysis") {
    const EigenData f = eigen_analysis(make_params(5, 1.5, 5.0));
    CHECK(f.attractor_type == AttractorType::focus);
    CHECK(f.alpha_star_plus.real() == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(std::abs(f.alpha_star_plus.imag()) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(f.omega_spiral == doctest::Approx(2.0).epsilon(1e-14));

    const Params P = make_params(15, 6.5, 3.0);
    const EigenData n = eigen_analysis(P);
    CHECK(n.attractor_type == AttractorType::node);
    const double b = 5.5, root = std::sqrt(30.25 - 24.0);
    CHECK(n.alpha_star_plus.real() == doctest::Approx(-b + root).epsilon(1e-14));
    CHECK(n.alpha_star_minus.real() == doctest::Approx(-b - root).epsilon(1e-14));
    CHECK(n.alpha_star_plus.real() == doctest::Approx(-3.0).epsilon(1e-14));
    CHECK(n.alpha_star_minus.real() == doctest::Approx(-8.0).epsilon(1e-14));

    const EigenData c = eigen_analysis(make_params(4, 1.0, 3.0));
    CHECK(c.attractor_type == AttractorType::center);

    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> nd(3, 30);
    std::uniform_real_distribution<double> ud(0.05, 0.95);
    for (int k = 0; k < 300; ++k) {
        const int N = nd(rng);
        const double ns = 0.5 * (N - 2);
        const double nu = ud(rng) * 2 * (ns + 1);
        const ExponentBounds bd = exponent_bounds(N, nu);
        const double hi = bd.p_upper.is_finite() ? bd.p_upper.value() : 4 * bd.p_sobolev;
        const double lo = std::max(bd.p_lower, bd.p_sobolev);
        if (!(hi > lo)) continue;
        const double p = lo + ud(rng) * (hi - lo);
        const Params Q = make_params(N, nu, p);
        const EigenData e = eigen_analysis(Q);
        const double a = 2 / (p - 1);
        CHECK(e.alpha_plus == doctest::Approx(a - ns + nu).epsilon(1e-12));
        CHECK(e.alpha_minus == doctest::Approx(a - ns - nu).epsilon(1e-12));
        CHECK(e.alpha_plus == doctest::Approx(-Q.beta + std::sqrt(Q.beta * Q.beta + Q.gamma)).epsilon(1e-12));
        CHECK(e.alpha_minus < 0);
        CHECK(e.alpha_plus > 0);
        CHECK(e.alpha_star_plus.real() < 0);
        CHECK(e.alpha_star_minus.real() < 0);
        const bool real = p * Q.gamma <= nu * nu;
        CHECK(real == (e.attractor_type == AttractorType::node));
        if (real) {
            CHECK(e.alpha_minus < e.alpha_star_minus.real());
            CHECK(e.alpha_star_minus.real() <= -Q.beta + 1e-12);
            CHECK(-Q.beta <= e.alpha_star_plus.real() + 1e-12);
            CHECK(e.alpha_star_plus.real() < e.alpha_plus);
        }
    }
}

TEST_CASE("lyapunov energy") {
    const Params P = make_params(15, 6.5, 3.0);
    CHECK(lyapunov_energy({0.0, 0.0}, P) == 0.0);
    const double C = singular_coefficient(P);
    const double expected = std::pow(P.gamma, (P.p + 1) / (P.p - 1)) * (1 / (P.p + 1) - 0.5);
    CHECK(lyapunov_energy({C, 0.0}, P) == doctest::Approx(expected).epsilon(1e-13));
    CHECK(expected < 0);

    const PhaseTrajectory tr = shoot_heteroclinic(P);
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < tr.size(); i += 7) {
        const double h = tr.t[i + 1] - tr.t[i - 1];
        const double de = (lyapunov_energy(tr.states[i + 1], P) - lyapunov_energy(tr.states[i - 1], P)) / h;
        const double exact = -2 * P.beta * tr.states[i].y * tr.states[i].y;
        worst = std::max(worst, std::abs(de - exact) / (1 + std::abs(exact)));
    }
    CHECK(worst < 1e-3);
}

TEST_CASE("fowler transform") {
    const Params P = make_params(7, 2.0, 3.0);
    const auto grid = uniform_log_grid(-3.0, 3.0, 601);
    const PhaseTrajectory s = fowler_forward(P, singular_profile(P, grid));
    const double C = singular_coefficient(P);
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(s.states[i].x == doctest::Approx(C).epsilon(1e-13));
        CHECK(std::abs(s.states[i].y) <= 1e-12);
    }

    const double ap = eigen_analysis(P).alpha_plus;
    const RadialProfile lead = power_law_profile(1.0, -P.nu_star + P.nu, grid);
    const PhaseTrajectory e = fowler_forward(P, lead);
    for (std::size_t i = 0; i < e.size(); ++i)
        CHECK(e.states[i].x == doctest::Approx(std::exp(ap * e.t[i])).epsilon(1e-12));

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ud(0.5, 2.0);
    std::vector<double> r, u;
    for (int i = 0; i < 200; ++i) {
        r.push_back(std::exp(-2.0 + 0.02 * i));
        u.push_back(ud(rng));
    }
    const RadialProfile rnd = profile_from_radii(r, u);
    const RadialProfile back = fowler_inverse(P, fowler_forward(P, rnd));
    for (std::size_t i = 0; i < rnd.size(); ++i) {
        CHECK(back.log_r[i] == doctest::Approx(rnd.log_r[i]).epsilon(1e-14));
        CHECK(back.values[i] == doctest::Approx(rnd.values[i]).epsilon(1e-10));
    }
}

TEST_CASE("linear flow") {
    const Mat2 A{{{0.0, 1.0}, {-5.0, -2.0}}};
    const auto z = linear_flow(A, {1.0, 0.0}, 0.7);
    const double t = 0.7;
    const double x = std::exp(-t) * (std::cos(2 * t) + 0.5 * std::sin(2 * t));
    CHECK(z[0] == doctest::Approx(x).epsilon(1e-13));
    const Mat2 D{{{0.0, 1.0}, {-4.0, -4.0}}};
    const auto d = linear_flow(D, {1.0, 0.0}, 1.3);
    CHECK(d[0] == doctest::Approx(std::exp(-2 * 1.3) * (1 + 2 * 1.3)).epsilon(1e-13));
}

}
