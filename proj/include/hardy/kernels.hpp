#pragma once

// Hot grid loops with a scalar reference and an AVX2 variant chosen at
// runtime. Both tables compute the same quantities; the vector versions may
// reassociate sums.

#include <cstddef>

namespace hardy::kernels {

struct Table {
    const char* name;
    /// out[i] = (f[i-2] - 8 f[i-1] + 8 f[i+1] - f[i+2]) * inv12h for 2 <= i < n-2.
    void (*deriv5)(const double* f, double* out, std::size_t n, double inv12h);
    /// max_i |R_i| / S_i with R = -(utt + a ut) + m u - g and
    /// S = |utt| + |a ut| + |m u| + |g| + k |u|; rows with S = 0 are skipped.
    double (*residual_ratio_max)(const double* u, const double* ut, const double* utt, const double* g,
                                 std::size_t n, double a, double m, double k);
    /// sum_i w[i] a[i] b[i]
    double (*weighted_dot)(const double* a, const double* b, const double* w, std::size_t n);
    /// y[i] = lo[i] x[i-1] + d[i] x[i] + up[i] x[i+1] (lo[0], up[n-1] ignored)
    void (*tridiag_apply)(const double* lo, const double* d, const double* up, const double* x, double* y,
                          std::size_t n);
    double (*max_abs_diff)(const double* a, const double* b, std::size_t n);
};

const Table& scalar();
/// nullptr when the binary was built without AVX2 support.
const Table* avx2();
/// AVX2 when compiled in and supported by the CPU, scalar otherwise.
const Table& active();

} // namespace hardy::kernels
