#include "hardy/error.hpp"
#include "hardy/exponent_atlas.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace hardy;

namespace {

double theta_gap(double s, double ns, double nu) { return (s + ns) * (s + ns) * (s - 2) + 2 * nu * nu; }

double bisect(double lo, double hi, double ns, double nu) {
    double flo = theta_gap(lo, ns, nu);
    for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        const double fm = theta_gap(mid, ns, nu);
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST_SUITE("exponent_atlas") {

TEST_CASE("params from closed forms") {
    const Params a = make_params(4, 1.0, 3.0);
    CHECK(a.nu_star == 1.0);
    CHECK(a.mu == 0.0);
    CHECK(a.beta == 0.0);
    CHECK(a.gamma == 1.0);

    const Params b = make_params(5, 1.5, 5.0);
    const double beta = 1.5 - 2.0 / 4.0;
    CHECK(b.beta == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(b.gamma == doctest::Approx(2.25 - beta * beta).epsilon(1e-15));
    CHECK(b.gamma == doctest::Approx(1.25).epsilon(1e-15));

    CHECK_THROWS_AS(make_params(3, 0.5, 1.0), Error);
    CHECK_THROWS_AS(make_params(2, 1.0, 3.0), Error);
    CHECK_THROWS_AS(make_params(3, -1.0, 3.0), Error);
}

TEST_CASE("sign of gamma and beta") {
    for (int N : {3, 7, 12}) {
        for (double nu : {0.3, 0.5 * (N - 2), 0.5 * N + 1}) {
            const ExponentBounds b = exponent_bounds(N, nu);
            const double inside = 0.5 * (b.p_lower + (b.p_upper.is_finite() ? b.p_upper.value() : b.p_lower + 4));
            CHECK(make_params(N, nu, inside).gamma > 0);
            CHECK(make_params(N, nu, 0.5 * (1 + b.p_lower)).gamma < 0);
            if (b.p_upper.is_finite()) CHECK(make_params(N, nu, b.p_upper.value() + 1).gamma < 0);
            CHECK(make_params(N, nu, b.p_sobolev + 0.25).beta > 0);
        }
    }
}

TEST_CASE("singular coefficient") {
    const Params P = make_params(5, 1.5, 5.0);
    CHECK(singular_coefficient(P) == doctest::Approx(std::pow(1.25, 0.25)).epsilon(1e-14));
    CHECK(singular_coefficient(P) == doctest::Approx(1.05737).epsilon(1e-5));

    for (int N : {5, 9, 14}) {
        const double ns = 0.5 * (N - 2);
        for (double p : {1.5, 3.0, 7.0}) {
            const ExponentBounds b = exponent_bounds(N, ns);
            if (!(p > b.p_lower)) continue;
            const double a = 2 / (p - 1);
            const double cp = std::pow(a * (N - 2 - a), 1 / (p - 1));
            CHECK(singular_coefficient(make_params(N, ns, p)) == doctest::Approx(cp).epsilon(1e-13));
        }
    }
    const ExponentBounds b = exponent_bounds(6, 1.0);
    CHECK_THROWS_AS(singular_coefficient(make_params(6, 1.0, b.p_lower)), Error);
}

TEST_CASE("exponent bounds") {
    const ExponentBounds a = exponent_bounds(3, 0.25);
    CHECK(a.p_lower == doctest::Approx(1 + 2 / 0.75).epsilon(1e-15));
    CHECK(a.p_upper.value() == doctest::Approx(9.0).epsilon(1e-15));
    CHECK(a.p_sobolev == 5.0);
    CHECK(exponent_bounds(10, 4.0).p_upper.is_infinite());
    const double tiny = exponent_bounds(3, 0.5 - 1e-9).p_upper.value();
    CHECK(tiny > 1e9);
    CHECK(exponent_bounds(3, 0.5).p_upper.is_infinite());
}

TEST_CASE("theta roots against a bisection oracle") {
    const double ns3 = 0.5;
    CHECK(theta(-ns3, ns3) == 0.0);
    for (double ns : {0.5, 3.0, 4.5, 9.0}) {
        const double smin = theta_min_location(ns);
        CHECK(smin == doctest::Approx(-(ns - 4) / 3).epsilon(1e-15));
        CHECK(theta(smin, ns) == doctest::Approx(-(4.0 / 27.0) * std::pow(2 + ns, 3)).epsilon(1e-13));
    }

    const ThetaRoots r = theta_roots(3, 0.25);
    REQUIRE(r.sigma_minus);
    CHECK(*r.sigma_minus > -0.5);
    CHECK(*r.sigma_minus < -0.25);
    CHECK(*r.sigma_minus == doctest::Approx(bisect(-0.5, -0.25, 0.5, 0.25)).epsilon(1e-11));
    CHECK(*r.sigma_minus == doctest::Approx(-0.263).epsilon(1e-2));

    const double nu = 5.02, ns = 5.0;
    const ThetaRoots two = theta_roots(12, nu);
    CHECK(two.root_case == RootCase::high_dim_two_roots);
    REQUIRE(two.sigma_minus);
    REQUIRE(two.sigma_plus);
    const double smin = theta_min_location(ns);
    CHECK(*two.sigma_minus < smin);
    CHECK(*two.sigma_plus > smin);
    CHECK(*two.sigma_minus == doctest::Approx(bisect(-ns + 1e-12, smin, ns, nu)).epsilon(1e-11));
    CHECK(*two.sigma_plus == doctest::Approx(bisect(smin, 0.0, ns, nu)).epsilon(1e-11));
    CHECK(two.sigma_sharp == doctest::Approx(bisect(-ns - nu, -ns, ns, nu)).epsilon(1e-11));

    const ThetaRoots at_star = theta_roots(12, 5.0);
    CHECK(at_star.root_case == RootCase::high_dim_one_root);
    CHECK_FALSE(at_star.sigma_plus);
}

TEST_CASE("nu bar") {
    CHECK(nu_bar(10) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(nu_bar(11) * nu_bar(11) - 4.5 * 4.5 == doctest::Approx(10.0 / 108.0).epsilon(1e-12));
    CHECK(nu_bar(3) == doctest::Approx(std::sqrt(2 * std::pow(5.0 / 6.0, 3))).epsilon(1e-15));
    CHECK(nu_bar(3) == doctest::Approx(1.0758).epsilon(1e-4));
    for (int N = 11; N <= 40; ++N) {
        const double ns = 0.5 * (N - 2);
        CHECK(nu_bar(N) * nu_bar(N) - ns * ns ==
              doctest::Approx((N - 10.0) * (N - 10.0) * (N - 1.0) / 108.0).epsilon(1e-11));
    }
}

TEST_CASE("stability exponents in closed form") {
    for (int N = 11; N <= 30; ++N) {
        const double s = std::sqrt(N - 1.0);
        const StabilityExponents e = stability_exponents(N, 0.5 * (N - 2));
        CHECK(e.p_sharp == doctest::Approx((N + 2 * s) / (N - 4 + 2 * s)).epsilon(1e-12));
        REQUIRE(e.p_minus);
        CHECK(*e.p_minus == doctest::Approx((N - 2 * s) / (N - 4 - 2 * s)).epsilon(1e-12));
        CHECK(joseph_lundgren_exponent(N).value() == doctest::Approx(*e.p_minus).epsilon(1e-12));

        const StabilityExponents bar = stability_exponents(N, nu_bar(N));
        REQUIRE(bar.p_minus);
        REQUIRE(bar.p_plus);
        CHECK(*bar.p_minus == doctest::Approx((N + 2.0) / (N - 10.0)).epsilon(1e-8));
        CHECK(*bar.p_plus == doctest::Approx((N + 2.0) / (N - 10.0)).epsilon(1e-8));
    }
    const StabilityExponents e11 = stability_exponents(11, 4.5);
    const double oracle = (11 - 2 * std::sqrt(10.0)) / (7 - 2 * std::sqrt(10.0));
    CHECK(*e11.p_minus == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(*e11.p_minus == doctest::Approx(6.9221).epsilon(1e-4));
    CHECK(joseph_lundgren_exponent(10).is_infinite());
}

TEST_CASE("exponents follow the root correspondence") {
    for (auto [N, nu] : {std::pair{3, 0.25}, {12, 5.02}, {20, 8.0}, {15, 7.0}}) {
        const ThetaRoots r = theta_roots(N, nu);
        const StabilityExponents e = stability_exponents(N, nu);
        CHECK(e.p_sharp == doctest::Approx(1 - 2 / r.sigma_sharp).epsilon(1e-15));
        if (r.sigma_minus) CHECK(*e.p_minus == doctest::Approx(1 - 2 / *r.sigma_minus).epsilon(1e-15));
        if (r.sigma_plus) CHECK(*e.p_plus == doctest::Approx(1 - 2 / *r.sigma_plus).epsilon(1e-15));
        if (e.p_minus && e.p_plus) CHECK(*e.p_minus <= *e.p_plus);
        const double ns = 0.5 * (N - 2);
        CHECK(r.sigma_sharp > -ns - nu);
        CHECK(r.sigma_sharp < -ns);
    }
}

TEST_CASE("lemma case labels") {
    CHECK(lemma2_case(12, 5.02) == Lemma2Case::a);
    CHECK(lemma2_case(12, 5.0) == Lemma2Case::b);
    CHECK(lemma2_case(5, 1.0) == Lemma2Case::b);
    CHECK(lemma2_case(5, 1.5) == Lemma2Case::c);
    CHECK(lemma2_case(10, 4.0) == Lemma2Case::c);
    CHECK(lemma2_case(12, 6.0) == Lemma2Case::c);
}

TEST_CASE("ordering chain on random pairs") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> nd(3, 35);
    std::uniform_real_distribution<double> ud(0.01, 1.0);
    for (int k = 0; k < 2000; ++k) {
        const int N = nd(rng);
        const double nu = ud(rng) * (2 * std::max(nu_bar(N), 0.5 * (N - 2)) + 1);
        CHECK(ordering_chain_holds(exponent_report(N, nu)));
    }
}

TEST_CASE("singular stability by both paths") {
    const SingularStability u = classify_singular_stability(make_params(5, 1.5, 5.0));
    CHECK(u.verdict == RegimeVerdict::unstable);
    CHECK(u.consistent);
    const SingularStability s = classify_singular_stability(make_params(15, 6.5, 3.0));
    CHECK(s.verdict == RegimeVerdict::stable);
    CHECK(s.consistent);
    const StabilityExponents e = stability_exponents(3, 2.0);
    for (double p : {e.p_sharp + 0.01, 6.0, 20.0}) {
        const SingularStability c = classify_singular_stability(make_params(3, 2.0, p));
        CHECK(c.lemma2_case == Lemma2Case::c);
        CHECK(c.verdict == RegimeVerdict::unstable);
    }
    CHECK(classify_singular_stability(make_params(3, 2.0, e.p_sharp)).verdict == RegimeVerdict::stable);
    CHECK(classify_singular_stability(make_params(3, 0.25, 9.0)).verdict == RegimeVerdict::outside_range);
}

}
