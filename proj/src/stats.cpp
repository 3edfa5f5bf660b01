#include "lagwarp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lagwarp/errors.hpp"
#include "lagwarp/kernels.hpp"
#include "lagwarp/rng.hpp"

namespace lagwarp::stats {

namespace {

double mean_of(std::span<const double> v) {
    return kernels::sum(v) / static_cast<double>(v.size());
}

// Continued fraction for I_x(a,b), modified Lentz.
double beta_cf(double x, double a, double b) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-15;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 300; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) return h;
    }
    throw NumericalError("incomplete beta continued fraction did not converge");
}

double pearson_from_moments(const kernels::Moments2& m) {
    if (m.sxx <= 0.0 || m.syy <= 0.0)
        throw NumericalError("correlation undefined for constant input");
    double r = m.sxy / std::sqrt(m.sxx * m.syy);
    return std::clamp(r, -1.0, 1.0);
}

double pearson_raw(std::span<const double> x, std::span<const double> y) {
    const double mx = mean_of(x);
    const double my = mean_of(y);
    return pearson_from_moments(kernels::centered_moments(x.data(), y.data(), x.size(), mx, my));
}

struct AnovaStat {
    double f;
    bool zero_between;
    bool zero_within;
};

AnovaStat anova_f(const std::vector<std::vector<double>>& groups) {
    std::size_t total_n = 0;
    double grand_sum = 0.0;
    for (const auto& g : groups) {
        total_n += g.size();
        grand_sum += kernels::sum(g);
    }
    const double grand_mean = grand_sum / static_cast<double>(total_n);
    double ss_between = 0.0;
    double ss_within = 0.0;
    for (const auto& g : groups) {
        const double gm = mean_of(g);
        const double d = gm - grand_mean;
        ss_between += static_cast<double>(g.size()) * d * d;
        for (double v : g) {
            const double w = v - gm;
            ss_within += w * w;
        }
    }
    const std::size_t df_b = groups.size() - 1;
    const std::size_t df_w = total_n - groups.size();
    const bool zb = ss_between <= 1e-30;
    const bool zw = ss_within <= 1e-30;
    double f = 0.0;
    if (!zb) {
        f = zw ? std::numeric_limits<double>::infinity()
               : (ss_between / static_cast<double>(df_b)) /
                     (ss_within / static_cast<double>(df_w));
    }
    return {f, zb, zw};
}

} // namespace

double pearson_r(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw ValidationError("correlation inputs differ in length");
    if (x.size() < 3)
        throw ValidationError("correlation needs at least 3 points, got " +
                              std::to_string(x.size()));
    return pearson_raw(x, y);
}

double regularized_incomplete_beta(double x, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0))
        throw ValidationError("incomplete beta requires a > 0 and b > 0");
    if (!(x >= 0.0 && x <= 1.0))
        throw ValidationError("incomplete beta requires x in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double log_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    const double front = std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta);
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * beta_cf(x, a, b) / a;
    return 1.0 - std::exp(b * std::log1p(-x) + a * std::log(x) - log_beta) *
                     beta_cf(1.0 - x, b, a) / b;
}

double student_t_sf_two_tailed(double t, double df) {
    if (df <= 0.0)
        throw ValidationError("t distribution requires df > 0");
    if (std::isinf(t)) return 0.0;
    const double x = df / (df + t * t);
    return regularized_incomplete_beta(x, df / 2.0, 0.5);
}

double f_sf(double f, double df1, double df2) {
    if (df1 <= 0.0 || df2 <= 0.0)
        throw ValidationError("F distribution requires positive df");
    if (std::isinf(f)) return 0.0;
    if (f <= 0.0) return 1.0;
    const double x = df2 / (df2 + df1 * f);
    return regularized_incomplete_beta(x, df2 / 2.0, df1 / 2.0);
}

double pearson_p_value(double r, std::size_t n) {
    if (n < 3)
        throw ValidationError("p-value needs n >= 3, got " + std::to_string(n));
    if (std::fabs(r) >= 1.0) return 0.0;
    const double df = static_cast<double>(n - 2);
    const double t = r * std::sqrt(df / (1.0 - r * r));
    return student_t_sf_two_tailed(t, df);
}

LagTable lagged_correlation(std::span<const double> x, std::span<const double> y,
                            int max_lag, double alpha) {
    if (x.size() != y.size())
        throw ValidationError("lagged correlation inputs differ in length");
    if (max_lag < 0)
        throw ValidationError("max_lag must be non-negative");
    LagTable table;
    table.rows.reserve(static_cast<std::size_t>(max_lag) + 1);
    for (int tau = 0; tau <= max_lag; ++tau) {
        const std::size_t len = x.size() > static_cast<std::size_t>(tau)
                                    ? x.size() - static_cast<std::size_t>(tau)
                                    : 0;
        if (len < 3)
            throw ValidationError("window too short for lag " + std::to_string(tau) +
                                  " (" + std::to_string(len) + " overlapping days)");
        LagRow row;
        row.lag = tau;
        row.n = len;
        row.r = pearson_raw(x.first(len), y.subspan(static_cast<std::size_t>(tau), len));
        row.p = pearson_p_value(row.r, len);
        row.significant = row.p < alpha;
        table.rows.push_back(row);
    }
    int best = 0;
    for (int tau = 1; tau <= max_lag; ++tau) {
        if (std::fabs(table.rows[static_cast<std::size_t>(tau)].r) >
            std::fabs(table.rows[static_cast<std::size_t>(best)].r))
            best = tau;
    }
    table.best_lag = best;
    return table;
}

AnovaResult one_way_anova(const std::vector<std::vector<double>>& groups,
                          const std::vector<std::string>& labels) {
    if (groups.size() < 2)
        throw ValidationError("ANOVA needs at least 2 groups");
    for (std::size_t i = 0; i < groups.size(); ++i) {
        if (groups[i].size() < 2)
            throw ValidationError("ANOVA group " + std::to_string(i) +
                                  " has fewer than 2 values");
    }
    AnovaResult out;
    out.labels = labels;
    if (out.labels.empty()) {
        for (std::size_t i = 0; i < groups.size(); ++i)
            out.labels.push_back("group" + std::to_string(i));
    }
    std::size_t total_n = 0;
    for (const auto& g : groups) {
        out.sizes.push_back(g.size());
        total_n += g.size();
    }
    out.df_between = groups.size() - 1;
    out.df_within = total_n - groups.size();

    const AnovaStat st = anova_f(groups);
    if (st.zero_between) {
        out.f = 0.0;
        out.p = 1.0;
        return out;
    }
    out.f = st.f;
    out.p = f_sf(out.f, static_cast<double>(out.df_between),
                 static_cast<double>(out.df_within));
    return out;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty())
        throw ValidationError("quantile of empty set");
    if (!(q >= 0.0 && q <= 1.0))
        throw ValidationError("quantile fraction outside [0, 1]");
    std::sort(values.begin(), values.end());
    const double h = q * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= values.size()) return values.back();
    const double frac = h - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

double permutation_p_pearson(std::span<const double> x, std::span<const double> y,
                             int shuffles, std::uint64_t seed) {
    const double observed = std::fabs(pearson_r(x, y));
    std::vector<double> ys(y.begin(), y.end());
    Rng rng(seed);
    int at_least = 0;
    for (int s = 0; s < shuffles; ++s) {
        rng.shuffle(ys);
        const double r = pearson_raw(x, ys);
        if (std::fabs(r) >= observed - 1e-12) ++at_least;
    }
    return static_cast<double>(at_least + 1) / static_cast<double>(shuffles + 1);
}

double permutation_p_anova(const std::vector<std::vector<double>>& groups,
                           int shuffles, std::uint64_t seed) {
    const double observed = anova_f(groups).f;
    std::vector<double> pool;
    std::vector<std::size_t> sizes;
    for (const auto& g : groups) {
        sizes.push_back(g.size());
        pool.insert(pool.end(), g.begin(), g.end());
    }
    Rng rng(seed);
    int at_least = 0;
    std::vector<std::vector<double>> shuffled(groups.size());
    for (int s = 0; s < shuffles; ++s) {
        rng.shuffle(pool);
        std::size_t pos = 0;
        for (std::size_t g = 0; g < sizes.size(); ++g) {
            shuffled[g].assign(pool.begin() + static_cast<long>(pos),
                               pool.begin() + static_cast<long>(pos + sizes[g]));
            pos += sizes[g];
        }
        if (anova_f(shuffled).f >= observed - 1e-12) ++at_least;
    }
    return static_cast<double>(at_least + 1) / static_cast<double>(shuffles + 1);
}

} // namespace lagwarp::stats
