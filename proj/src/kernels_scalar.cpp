#include "hardy/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace hardy::kernels {

namespace {

void deriv5(const double* f, double* out, std::size_t n, double inv12h) {
    for (std::size_t i = 2; i + 2 < n; ++i) {
        out[i] = ((f[i - 2] - f[i + 2]) + 8.0 * (f[i + 1] - f[i - 1])) * inv12h;
    }
}

double residual_ratio_max(const double* u, const double* ut, const double* utt, const double* g, std::size_t n,
                          double a, double m, double k) {
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t1 = utt[i], t2 = a * ut[i], t3 = m * u[i];
        const double s = std::abs(t1) + std::abs(t2) + std::abs(t3) + std::abs(g[i]) + std::abs(k * u[i]);
        if (s == 0.0) continue;
        worst = std::max(worst, std::abs(-(t1 + t2) + t3 - g[i]) / s);
    }
    return worst;
}

double weighted_dot(const double* a, const double* b, const double* w, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += w[i] * a[i] * b[i];
    return acc;
}

void tridiag_apply(const double* lo, const double* d, const double* up, const double* x, double* y,
                   std::size_t n) {
    if (n == 0) return;
    if (n == 1) {
        y[0] = d[0] * x[0];
        return;
    }
    y[0] = d[0] * x[0] + up[0] * x[1];
    for (std::size_t i = 1; i + 1 < n; ++i) y[i] = lo[i] * x[i - 1] + d[i] * x[i] + up[i] * x[i + 1];
    y[n - 1] = lo[n - 1] * x[n - 2] + d[n - 1] * x[n - 1];
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace

const Table& scalar() {
    static const Table t{"scalar", deriv5, residual_ratio_max, weighted_dot, tridiag_apply, max_abs_diff};
    return t;
}

} // namespace hardy::kernels
