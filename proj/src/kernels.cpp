#include "lagwarp/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace lagwarp::kernels {

namespace detail {

double sum_scalar(std::span<const double> v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc;
}

void minmax_scalar(std::span<const double> v, double& lo, double& hi) {
    lo = v.empty() ? 0.0 : v[0];
    hi = lo;
    for (double x : v) {
        if (x < lo) lo = x;
        if (x > hi) hi = x;
    }
}

Moments2 centered_moments_scalar(const double* x, const double* y, std::size_t n,
                                 double mean_x, double mean_y) {
    Moments2 m;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mean_x;
        const double dy = y[i] - mean_y;
        m.sxx += dx * dx;
        m.syy += dy * dy;
        m.sxy += dx * dy;
    }
    return m;
}

void sq_dist_row_scalar(const double* q, std::size_t q_len, std::size_t q_stride,
                        const double* point, std::size_t dim, double* out) {
    const double p0 = point[0];
    const double* q0 = q;
    for (std::size_t j = 0; j < q_len; ++j) {
        const double d = p0 - q0[j];
        out[j] = d * d;
    }
    for (std::size_t k = 1; k < dim; ++k) {
        const double pk = point[k];
        const double* qk = q + k * q_stride;
        for (std::size_t j = 0; j < q_len; ++j) {
            const double d = pk - qk[j];
            out[j] += d * d;
        }
    }
}

#if (defined(__x86_64__) || defined(_M_X64)) && !defined(LAGWARP_NO_AVX2)
// defined in kernels_avx2.cpp, compiled with -mavx2 -mfma
double sum_avx2(std::span<const double> v);
void minmax_avx2(std::span<const double> v, double& lo, double& hi);
Moments2 centered_moments_avx2(const double* x, const double* y, std::size_t n,
                               double mean_x, double mean_y);
void sq_dist_row_avx2(const double* q, std::size_t q_len, std::size_t q_stride,
                      const double* point, std::size_t dim, double* out);

bool cpu_has_avx2() {
#if defined(__GNUC__) || defined(__clang__)
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}
#else
bool cpu_has_avx2() { return false; }
#endif

struct Dispatch {
    Level level;
    double (*sum)(std::span<const double>);
    void (*minmax)(std::span<const double>, double&, double&);
    Moments2 (*centered_moments)(const double*, const double*, std::size_t, double, double);
    void (*sq_dist_row)(const double*, std::size_t, std::size_t, const double*,
                        std::size_t, double*);
};

constexpr Dispatch scalar_table{Level::scalar, sum_scalar, minmax_scalar,
                                centered_moments_scalar, sq_dist_row_scalar};

#if (defined(__x86_64__) || defined(_M_X64)) && !defined(LAGWARP_NO_AVX2)
constexpr Dispatch avx2_table{Level::avx2, sum_avx2, minmax_avx2,
                              centered_moments_avx2, sq_dist_row_avx2};
#endif

Dispatch pick_default() {
#if (defined(__x86_64__) || defined(_M_X64)) && !defined(LAGWARP_NO_AVX2)
    if (const char* env = std::getenv("LAGWARP_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) return scalar_table;
        if (std::strcmp(env, "avx2") == 0 && cpu_has_avx2()) return avx2_table;
    }
    if (cpu_has_avx2()) return avx2_table;
#endif
    return scalar_table;
}

Dispatch& table() {
    static Dispatch active = pick_default();
    return active;
}

} // namespace detail

Level active_level() { return detail::table().level; }

bool supported(Level level) {
    if (level == Level::scalar) return true;
#if (defined(__x86_64__) || defined(_M_X64)) && !defined(LAGWARP_NO_AVX2)
    return detail::cpu_has_avx2();
#else
    return false;
#endif
}

bool set_level(Level level) {
    if (!supported(level)) return false;
    if (level == Level::scalar) {
        detail::table() = detail::scalar_table;
    }
#if (defined(__x86_64__) || defined(_M_X64)) && !defined(LAGWARP_NO_AVX2)
    else {
        detail::table() = detail::avx2_table;
    }
#endif
    return true;
}

std::string level_name(Level level) {
    return level == Level::scalar ? "scalar" : "avx2";
}

double sum(std::span<const double> v) { return detail::table().sum(v); }

void minmax(std::span<const double> v, double& lo, double& hi) {
    detail::table().minmax(v, lo, hi);
}

Moments2 centered_moments(const double* x, const double* y, std::size_t n,
                          double mean_x, double mean_y) {
    return detail::table().centered_moments(x, y, n, mean_x, mean_y);
}

void sq_dist_row(const double* q, std::size_t q_len, std::size_t q_stride,
                 const double* point, std::size_t dim, double* out) {
    detail::table().sq_dist_row(q, q_len, q_stride, point, dim, out);
}

} // namespace lagwarp::kernels
