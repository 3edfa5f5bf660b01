#pragma once

#include <cstddef>
#include <span>
#include <string>

namespace lagwarp::kernels {

// Numeric inner loops used by the statistics and DTW layers. Each kernel has
// a scalar reference implementation and an AVX2 variant; the active variant
// is chosen once at startup from CPU capabilities and can be overridden (for
// equivalence testing and benchmarking) via set_level() or the
// LAGWARP_KERNELS environment variable ("scalar" or "avx2").
enum class Level { scalar, avx2 };

Level active_level();
bool set_level(Level level);   // false if unsupported on this CPU
bool supported(Level level);
std::string level_name(Level level);

double sum(std::span<const double> v);

void minmax(std::span<const double> v, double& lo, double& hi);

struct Moments2 {
    double sxx = 0.0;
    double syy = 0.0;
    double sxy = 0.0;
};

// Centered second moments around the supplied means.
Moments2 centered_moments(const double* x, const double* y, std::size_t n,
                          double mean_x, double mean_y);

// out[j] = sum_d (point[d] - q[d * q_stride + j])^2 for j in [0, q_len).
// q is laid out dimension-major; this is the DTW cost-row kernel.
void sq_dist_row(const double* q, std::size_t q_len, std::size_t q_stride,
                 const double* point, std::size_t dim, double* out);

} // namespace lagwarp::kernels
