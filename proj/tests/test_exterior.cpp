#include "hardy/error.hpp"
#include "hardy/exterior.hpp"
#include "hardy/heteroclinic.hpp"
#include "hardy/profile_analysis.hpp"

#include <doctest.h>

#include <cmath>

using namespace hardy;

namespace {

ExteriorOptions coarse() {
    ExteriorOptions o;
    o.span = 20.0;
    o.spacing = 1.0 / 4096.0;
    o.residual_stride = 8;
    return o;
}

const PhaseTrajectory& stable_orbit() {
    static const PhaseTrajectory tr = shoot_heteroclinic(make_params(15, 6.5, 3.0));
    return tr;
}

double max_rel_error(const LinearHardySolution& sol, double b, double R_K, double rate) {
    double err = 0.0;
    for (std::size_t i = 0; i < sol.grid.size(); ++i) {
        const double exact = b * std::exp(-rate * (sol.grid.t(i) - std::log(R_K)));
        err = std::max(err, std::abs(sol.value(i) / exact - 1));
    }
    return err;
}

} // namespace

TEST_SUITE("exterior_solver") {

TEST_CASE("linear problem with zero potential") {
    const Params P = make_params(5, 1.5, 5.0);
    const double b = 0.7, R_K = 2.0;
    const LinearHardySolution sol = solve_linear_hardy(make_linear_problem(R_K, b, [](double) { return 0.0; }), P);
    CHECK(max_rel_error(sol, b, R_K, P.nu_star + P.nu) <= 1e-8);

    const LinearHardySolution zero = solve_linear_hardy(make_linear_problem(1.0, 0.0, [](double) { return 0.0; }), P);
    for (std::size_t i = 0; i < zero.grid.size(); i += 997) CHECK(zero.value(i) == 0.0);
}

TEST_CASE("linear problem with the singular potential") {
    const Params P = make_params(15, 6.5, 3.0);
    const double W = P.p * P.gamma;
    const LinearHardySolution sol = solve_linear_hardy(make_linear_problem(1.0, 1.0, [W](double) { return W; }), P);
    const double alpha = eigen_analysis(P).alpha_star_minus.real() - P.slow_rate();
    CHECK(alpha == doctest::Approx(-9.0).epsilon(1e-14));
    CHECK(max_rel_error(sol, 1.0, 1.0, -alpha) <= 1e-6);

    ExteriorOptions o = coarse();
    double prev = 0.0;
    for (double h : {1.0 / 64, 1.0 / 128, 1.0 / 256}) {
        o.spacing = h;
        const double e = max_rel_error(solve_linear_hardy(make_linear_problem(1.0, 1.0, [W](double) { return W; }, o), P), 1.0, 1.0, 9.0);
        if (prev > 0) CHECK(std::log2(prev / e) == doctest::Approx(2.0).epsilon(0.05));
        prev = e;
    }
    CHECK_THROWS_AS(solve_linear_hardy(make_linear_problem(1.0, 1.0, [&](double) { return P.nu * P.nu + 1; }, o), P),
                    Error);
}

TEST_CASE("problem validation") {
    const Params P = make_params(15, 6.5, 3.0);
    const auto& tr = stable_orbit();
    const ExteriorOptions o = coarse();
    const ExteriorProblem ok = make_exterior_problem(P, 1.0, 0.0, ExtReal(1.0), &tr, o);
    const double top = ok.base->ustar(0);
    CHECK_THROWS_AS(make_exterior_problem(P, 1.0, top * 1.01, ExtReal(1.0), &tr, o), Error);
    CHECK_THROWS_AS(make_exterior_problem(P, 1.0, -0.1, ExtReal(1.0), &tr, o), Error);
    const Params U = make_params(5, 1.5, 5.0);
    CHECK_THROWS_AS(make_exterior_problem(U, 1.0, 0.0, ExtReal::infinity(), nullptr, o), Error);
}

TEST_CASE("sub and supersolutions") {
    const Params P = make_params(15, 6.5, 3.0);
    const auto& tr = stable_orbit();
    const ExteriorOptions o = coarse();

    const ExteriorProblem top = make_exterior_problem(P, 1.0, 0.0, ExtReal(1.0), &tr, o);
    const ExteriorProblem full = make_exterior_problem(P, 1.0, top.base->ustar(0), ExtReal(1.0), &tr, o);
    const ExteriorField s_full = build_subsolution(full), S_full = build_supersolution(full);
    for (std::size_t i = 0; i < s_full.liouville.size(); i += 101) {
        CHECK(s_full.deviation(i) == 0.0);
        CHECK(S_full.deviation(i) == 0.0);
    }
    const IterationResult fixed = monotone_iterate(s_full, S_full, full);
    CHECK(fixed.iterations <= 2);

    const ExteriorField sub = build_subsolution(top), super = build_supersolution(top);
    CHECK(sub.value(0) == doctest::Approx(0.0).epsilon(1e-12));
    const std::size_t n = sub.liouville.size();
    for (std::size_t i = 1; i < n; ++i) {
        CHECK(sub.value(i) > 0);
        CHECK(sub.value(i) <= super.value(i));
        CHECK(super.value(i) <= top.base->ustar(i));
        const double h = sub.liouville[i], eta = super.liouville[i];
        CHECK(eta / h > 0);
        CHECK(eta / h < 1);
    }
    CHECK(sub.liouville.back() * std::exp(-P.nu_star * o.span) < 1e-20);
}

TEST_CASE("monotone iteration for zero boundary data") {
    const Params P = make_params(15, 6.5, 3.0);
    const auto& tr = stable_orbit();
    const ExteriorProblem ext = make_exterior_problem(P, 1.0, 0.0, ExtReal(1.0), &tr, coarse());
    const ExteriorReport rep = solve_exterior(ext);
    CHECK(rep.ordered);
    CHECK(rep.positive);
    CHECK(rep.result.iterations <= 500);
    CHECK(rep.residual.max_abs <= 1e-5);
    CHECK(rep.result.solution.value(0) == doctest::Approx(0.0).epsilon(1e-12));
    const DecayFit fit = classify_decay(rep.result.solution.profile(16), P);
    CHECK(fit.classification == DecayClass::slow);
    CHECK(fit.limit_constant == doctest::Approx(std::sqrt(12.0)).epsilon(1e-3));
    CHECK(rep.tail_deviation <= 1e-6 * rep.boundary_deviation);

    const double u0 = ext.base->ustar(0);
    const ExteriorReport closer = solve_exterior(make_exterior_problem(P, 1.0, 0.9 * u0, ExtReal(1.0), &tr, coarse()));
    CHECK(closer.result.iterations <= rep.result.iterations);
}

TEST_CASE("continuum of solutions") {
    const Params P = make_params(15, 6.5, 3.0);
    const auto& tr = stable_orbit();
    const FamilyReport fam =
        continuum_family(P, 1.0, 0.0, {ExtReal(1.0), ExtReal(2.0), ExtReal(4.0)}, tr, coarse(), 3);
    REQUIRE(fam.members.size() == 3);
    CHECK(fam.distinct);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i + 1; j < 3; ++j) CHECK(fam.separation[i][j] > 0);

    const FamilyReport inf = continuum_family(P, 1.0, 0.0, {ExtReal::infinity()}, tr, coarse(), 1);
    REQUIRE(inf.members.size() == 1);
    CHECK(inf.distinct);
    const auto& m = inf.members[0];
    for (std::size_t i = 1; i < m.result.solution.liouville.size(); i += 257)
        CHECK(m.result.solution.deviation(i) > 0);

    const double psi = 0.5 * make_exterior_problem(P, 1.0, 0.0, ExtReal(1.0), &tr, coarse()).base->ustar(0);
    const double lp = lambda_psi(tr, P, 1.0, psi);
    CHECK(lp > 0);
    CHECK_THROWS_AS(continuum_family(P, 1.0, psi, {ExtReal(0.5 * lp)}, tr, coarse(), 1), Error);
    CHECK(lambda_psi(tr, P, 1.0, 0.0) == 0.0);
}

}
