#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace lagwarp::stats {

// Pearson correlation. Requires length >= 3 and non-constant inputs.
double pearson_r(std::span<const double> x, std::span<const double> y);

// Regularized incomplete beta I_x(a, b) via Lentz continued fraction;
// absolute error below 1e-10 over the tested domain.
double regularized_incomplete_beta(double x, double a, double b);

// Two-tailed p-value for a Pearson r at sample size n (t distribution with
// n-2 degrees of freedom). |r| = 1 maps to p = 0; n < 3 is an error.
double pearson_p_value(double r, std::size_t n);

// Survival functions used by the tests as well.
double student_t_sf_two_tailed(double t, double df);
double f_sf(double f, double df1, double df2);

struct LagRow {
    int lag = 0;
    double r = 0.0;
    double p = 1.0;
    std::size_t n = 0;
    bool significant = false;
};

struct LagTable {
    std::vector<LagRow> rows;   // one per lag 0..max_lag
    int best_lag = 0;           // argmax |r|, smaller lag wins ties
};

// Eq-style lagged sweep: pairs (x[d], y[d + lag]) over the valid overlap,
// truncated (no padding). Throws if any lag leaves fewer than 3 pairs.
LagTable lagged_correlation(std::span<const double> x, std::span<const double> y,
                            int max_lag, double alpha);

struct AnovaResult {
    std::vector<std::string> labels;
    std::vector<std::size_t> sizes;
    double f = 0.0;
    std::size_t df_between = 0;
    std::size_t df_within = 0;
    double p = 1.0;
};

// One-way ANOVA. Each group needs >= 2 values. Groups with zero between-group
// spread give F = 0, p = 1; zero within-group variance with spread between
// groups gives F = inf, p = 0.
AnovaResult one_way_anova(const std::vector<std::vector<double>>& groups,
                          const std::vector<std::string>& labels = {});

// Linear-interpolation quantile of unsorted values, q in [0, 1].
double quantile(std::vector<double> values, double q);

// Permutation oracles for the analytic p-values (seeded, reproducible).
double permutation_p_pearson(std::span<const double> x, std::span<const double> y,
                             int shuffles, std::uint64_t seed);
double permutation_p_anova(const std::vector<std::vector<double>>& groups,
                           int shuffles, std::uint64_t seed);

} // namespace lagwarp::stats
