#include "hardy/kernels.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

using namespace hardy;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

void compare(const kernels::Table& a, const kernels::Table& b) {
    std::mt19937_64 rng(11);
    for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 16u, 31u, 100u, 1027u}) {
        CAPTURE(n);
        const auto f = random_vec(rng, n, -2, 2), g = random_vec(rng, n, -2, 2), w = random_vec(rng, n, 0, 1);
        const auto u = random_vec(rng, n, 0.1, 3), ut = random_vec(rng, n, -1, 1), utt = random_vec(rng, n, -1, 1);

        std::vector<double> da(n, 0.0), db(n, 0.0);
        a.deriv5(f.data(), da.data(), n, 3.5);
        b.deriv5(f.data(), db.data(), n, 3.5);
        for (std::size_t i = 0; i < n; ++i) CHECK(da[i] == doctest::Approx(db[i]).epsilon(1e-14));

        const double ra = a.residual_ratio_max(u.data(), ut.data(), utt.data(), g.data(), n, 1.3, -0.7, 2.0);
        const double rb = b.residual_ratio_max(u.data(), ut.data(), utt.data(), g.data(), n, 1.3, -0.7, 2.0);
        CHECK(ra == doctest::Approx(rb).epsilon(1e-14));

        CHECK(a.weighted_dot(f.data(), g.data(), w.data(), n) ==
              doctest::Approx(b.weighted_dot(f.data(), g.data(), w.data(), n)).epsilon(1e-13));

        std::vector<double> ya(n), yb(n);
        a.tridiag_apply(f.data(), g.data(), w.data(), u.data(), ya.data(), n);
        b.tridiag_apply(f.data(), g.data(), w.data(), u.data(), yb.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(ya[i] == doctest::Approx(yb[i]).epsilon(1e-14));

        CHECK(a.max_abs_diff(f.data(), g.data(), n) == b.max_abs_diff(f.data(), g.data(), n));
    }
}

} // namespace

TEST_SUITE("kernels") {

TEST_CASE("scalar reference values") {
    const auto& s = kernels::scalar();
    std::vector<double> f(9), d(9, 0.0);
    for (int i = 0; i < 9; ++i) f[i] = std::pow(0.5 * i, 3);
    s.deriv5(f.data(), d.data(), 9, 1.0 / (12.0 * 0.5));
    for (int i = 2; i < 7; ++i) CHECK(d[i] == doctest::Approx(3 * std::pow(0.5 * i, 2)).epsilon(1e-13));

    const double lo[] = {0, 1, 1}, di[] = {2, 2, 2}, up[] = {1, 1, 0}, x[] = {1, 2, 3};
    double y[3];
    s.tridiag_apply(lo, di, up, x, y, 3);
    CHECK(y[0] == 4);
    CHECK(y[1] == 8);
    CHECK(y[2] == 8);
}

TEST_CASE("vector variant matches the scalar reference") {
    const kernels::Table* v = kernels::avx2();
    if (!v || !__builtin_cpu_supports("avx2") || !__builtin_cpu_supports("fma")) {
        MESSAGE("AVX2 variant unavailable; comparing scalar with itself");
        compare(kernels::scalar(), kernels::scalar());
        return;
    }
    compare(kernels::scalar(), *v);
    CHECK(std::strcmp(kernels::active().name, "scalar") != 0);
}

}
