// AVX2 + FMA variants of the numeric kernels. This translation unit is the
// only one compiled with -mavx2 -mfma; callers reach it through the runtime
// dispatch table in kernels.cpp.
#if (defined(__x86_64__) || defined(_M_X64)) && !defined(LAGWARP_NO_AVX2)

#include <immintrin.h>

#include "lagwarp/kernels.hpp"

namespace lagwarp::kernels::detail {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(lo) + _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
}

} // namespace

double sum_avx2(std::span<const double> v) {
    const double* p = v.data();
    std::size_t n = v.size();
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_add_pd(acc, _mm256_loadu_pd(p + i));
    double total = hsum(acc);
    for (; i < n; ++i) total += p[i];
    return total;
}

void minmax_avx2(std::span<const double> v, double& lo, double& hi) {
    if (v.empty()) { lo = hi = 0.0; return; }
    const double* p = v.data();
    std::size_t n = v.size();
    std::size_t i = 0;
    double lo_s = p[0], hi_s = p[0];
    if (n >= 4) {
        __m256d vlo = _mm256_loadu_pd(p);
        __m256d vhi = vlo;
        for (i = 4; i + 4 <= n; i += 4) {
            __m256d x = _mm256_loadu_pd(p + i);
            vlo = _mm256_min_pd(vlo, x);
            vhi = _mm256_max_pd(vhi, x);
        }
        alignas(32) double tmp[4];
        _mm256_store_pd(tmp, vlo);
        lo_s = tmp[0];
        for (int k = 1; k < 4; ++k) if (tmp[k] < lo_s) lo_s = tmp[k];
        _mm256_store_pd(tmp, vhi);
        hi_s = tmp[0];
        for (int k = 1; k < 4; ++k) if (tmp[k] > hi_s) hi_s = tmp[k];
    }
    for (; i < n; ++i) {
        if (p[i] < lo_s) lo_s = p[i];
        if (p[i] > hi_s) hi_s = p[i];
    }
    lo = lo_s;
    hi = hi_s;
}

Moments2 centered_moments_avx2(const double* x, const double* y, std::size_t n,
                               double mean_x, double mean_y) {
    const __m256d mx = _mm256_set1_pd(mean_x);
    const __m256d my = _mm256_set1_pd(mean_y);
    __m256d sxx = _mm256_setzero_pd();
    __m256d syy = _mm256_setzero_pd();
    __m256d sxy = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(x + i), mx);
        const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(y + i), my);
        sxx = _mm256_fmadd_pd(dx, dx, sxx);
        syy = _mm256_fmadd_pd(dy, dy, syy);
        sxy = _mm256_fmadd_pd(dx, dy, sxy);
    }
    Moments2 m;
    m.sxx = hsum(sxx);
    m.syy = hsum(syy);
    m.sxy = hsum(sxy);
    for (; i < n; ++i) {
        const double dx = x[i] - mean_x;
        const double dy = y[i] - mean_y;
        m.sxx += dx * dx;
        m.syy += dy * dy;
        m.sxy += dx * dy;
    }
    return m;
}

void sq_dist_row_avx2(const double* q, std::size_t q_len, std::size_t q_stride,
                      const double* point, std::size_t dim, double* out) {
    {
        const __m256d p0 = _mm256_set1_pd(point[0]);
        const double* q0 = q;
        std::size_t j = 0;
        for (; j + 4 <= q_len; j += 4) {
            const __m256d d = _mm256_sub_pd(p0, _mm256_loadu_pd(q0 + j));
            _mm256_storeu_pd(out + j, _mm256_mul_pd(d, d));
        }
        for (; j < q_len; ++j) {
            const double d = point[0] - q0[j];
            out[j] = d * d;
        }
    }
    for (std::size_t k = 1; k < dim; ++k) {
        const __m256d pk = _mm256_set1_pd(point[k]);
        const double* qk = q + k * q_stride;
        std::size_t j = 0;
        for (; j + 4 <= q_len; j += 4) {
            const __m256d d = _mm256_sub_pd(pk, _mm256_loadu_pd(qk + j));
            const __m256d acc = _mm256_fmadd_pd(d, d, _mm256_loadu_pd(out + j));
            _mm256_storeu_pd(out + j, acc);
        }
        for (; j < q_len; ++j) {
            const double d = point[k] - qk[j];
            out[j] += d * d;
        }
    }
}

} // namespace lagwarp::kernels::detail

#endif // x86_64
