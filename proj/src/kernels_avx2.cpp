#include "hardy/kernels.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cmath>

namespace hardy::kernels {

namespace {

inline __m256d vabs(__m256d v) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v); }

inline double hmax(__m256d v) {
    alignas(32) double b[4];
    _mm256_store_pd(b, v);
    return std::max(std::max(b[0], b[1]), std::max(b[2], b[3]));
}

inline double hsum(__m256d v) {
    alignas(32) double b[4];
    _mm256_store_pd(b, v);
    return (b[0] + b[1]) + (b[2] + b[3]);
}

void deriv5(const double* f, double* out, std::size_t n, double inv12h) {
    if (n < 5) return;
    const __m256d eight = _mm256_set1_pd(8.0), k = _mm256_set1_pd(inv12h);
    std::size_t i = 2;
    for (; i + 4 + 2 <= n; i += 4) {
        const __m256d fm2 = _mm256_loadu_pd(f + i - 2), fm1 = _mm256_loadu_pd(f + i - 1);
        const __m256d fp1 = _mm256_loadu_pd(f + i + 1), fp2 = _mm256_loadu_pd(f + i + 2);
        const __m256d v = _mm256_fmadd_pd(eight, _mm256_sub_pd(fp1, fm1), _mm256_sub_pd(fm2, fp2));
        _mm256_storeu_pd(out + i, _mm256_mul_pd(v, k));
    }
    for (; i + 2 < n; ++i) out[i] = ((f[i - 2] - f[i + 2]) + 8.0 * (f[i + 1] - f[i - 1])) * inv12h;
}

double residual_ratio_max(const double* u, const double* ut, const double* utt, const double* g, std::size_t n,
                          double a, double m, double k) {
    const __m256d va = _mm256_set1_pd(a), vm = _mm256_set1_pd(m), vk = _mm256_set1_pd(k);
    const __m256d zero = _mm256_setzero_pd();
    __m256d worst = zero;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d t1 = _mm256_loadu_pd(utt + i);
        const __m256d t2 = _mm256_mul_pd(va, _mm256_loadu_pd(ut + i));
        const __m256d uu = _mm256_loadu_pd(u + i);
        const __m256d t3 = _mm256_mul_pd(vm, uu);
        const __m256d gg = _mm256_loadu_pd(g + i);
        const __m256d s = _mm256_add_pd(_mm256_add_pd(_mm256_add_pd(vabs(t1), vabs(t2)), _mm256_add_pd(vabs(t3), vabs(gg))),
                                        vabs(_mm256_mul_pd(vk, uu)));
        const __m256d r = _mm256_sub_pd(_mm256_sub_pd(t3, _mm256_add_pd(t1, t2)), gg);
        const __m256d mask = _mm256_cmp_pd(s, zero, _CMP_NEQ_OQ);
        const __m256d q = _mm256_and_pd(mask, _mm256_div_pd(vabs(r), s));
        worst = _mm256_max_pd(worst, q);
    }
    double w = hmax(worst);
    for (; i < n; ++i) {
        const double t1 = utt[i], t2 = a * ut[i], t3 = m * u[i];
        const double s = std::abs(t1) + std::abs(t2) + std::abs(t3) + std::abs(g[i]) + std::abs(k * u[i]);
        if (s == 0.0) continue;
        w = std::max(w, std::abs(-(t1 + t2) + t3 - g[i]) / s);
    }
    return w;
}

double weighted_dot(const double* a, const double* b, const double* w, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(a + i)), _mm256_loadu_pd(b + i),
                               acc0);
        acc1 = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i + 4), _mm256_loadu_pd(a + i + 4)),
                               _mm256_loadu_pd(b + i + 4), acc1);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += w[i] * a[i] * b[i];
    return s;
}

void tridiag_apply(const double* lo, const double* d, const double* up, const double* x, double* y,
                   std::size_t n) {
    if (n < 2) {
        if (n == 1) y[0] = d[0] * x[0];
        return;
    }
    y[0] = d[0] * x[0] + up[0] * x[1];
    std::size_t i = 1;
    for (; i + 4 + 1 <= n; i += 4) {
        __m256d v = _mm256_mul_pd(_mm256_loadu_pd(d + i), _mm256_loadu_pd(x + i));
        v = _mm256_fmadd_pd(_mm256_loadu_pd(lo + i), _mm256_loadu_pd(x + i - 1), v);
        v = _mm256_fmadd_pd(_mm256_loadu_pd(up + i), _mm256_loadu_pd(x + i + 1), v);
        _mm256_storeu_pd(y + i, v);
    }
    for (; i + 1 < n; ++i) y[i] = lo[i] * x[i - 1] + d[i] * x[i] + up[i] * x[i + 1];
    y[n - 1] = lo[n - 1] * x[n - 2] + d[n - 1] * x[n - 1];
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
    __m256d m = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) m = _mm256_max_pd(m, vabs(_mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i))));
    double r = hmax(m);
    for (; i < n; ++i) r = std::max(r, std::abs(a[i] - b[i]));
    return r;
}

} // namespace

const Table* avx2_table() {
    static const Table t{"avx2", deriv5, residual_ratio_max, weighted_dot, tridiag_apply, max_abs_diff};
    return &t;
}

} // namespace hardy::kernels
