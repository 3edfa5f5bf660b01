#include "lagwarp/dtw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "lagwarp/errors.hpp"
#include "lagwarp/kernels.hpp"
#include "lagwarp/parallel.hpp"
#include "lagwarp/rng.hpp"

namespace lagwarp::dtw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_pair(const Series& p, const Series& q) {
    if (p.length == 0 || q.length == 0)
        throw ValidationError("DTW over an empty sequence");
    if (p.dim != q.dim)
        throw ValidationError("DTW over sequences of different dimension");
}

// One DP pass. Rows iterate over p, columns over q; only two rows are kept.
// The cost row for a fixed p-point is produced by the sq_dist_row kernel.
double dp_cost(const Series& p, const Series& q, std::optional<int> band,
               std::vector<std::vector<double>>* full_matrix) {
    check_pair(p, q);
    const std::size_t np = p.length;
    const std::size_t nq = q.length;

    std::vector<double> prev(nq, kInf), curr(nq, kInf), cost_row(nq);
    std::vector<double> point(p.dim);
    if (full_matrix) full_matrix->assign(np, std::vector<double>(nq, kInf));

    for (std::size_t i = 0; i < np; ++i) {
        for (std::size_t d = 0; d < p.dim; ++d) point[d] = p.at(i, d);
        kernels::sq_dist_row(q.values.data(), nq, q.length, point.data(), p.dim,
                             cost_row.data());
        std::size_t lo = 0, hi = nq - 1;
        if (band) {
            const long r = *band;
            const long center = static_cast<long>(i);
            lo = static_cast<std::size_t>(std::max(0L, center - r));
            hi = static_cast<std::size_t>(
                std::min(static_cast<long>(nq) - 1, center + r));
            if (static_cast<long>(lo) > static_cast<long>(hi)) {
                // band excludes the whole row; unreachable for valid radii
                std::fill(curr.begin(), curr.end(), kInf);
                std::swap(prev, curr);
                continue;
            }
        }
        std::fill(curr.begin(), curr.end(), kInf);
        for (std::size_t j = lo; j <= hi; ++j) {
            double best;
            if (i == 0 && j == 0) {
                best = 0.0;
            } else {
                best = kInf;
                if (j > 0) best = std::min(best, curr[j - 1]);
                if (i > 0) best = std::min(best, prev[j]);
                if (i > 0 && j > 0) best = std::min(best, prev[j - 1]);
            }
            curr[j] = best + cost_row[j];
            if (full_matrix) (*full_matrix)[i][j] = curr[j];
        }
        std::swap(prev, curr);
    }
    const double total = prev[nq - 1];
    if (!std::isfinite(total))
        throw NumericalError("DTW band too narrow to connect the sequences");
    return total;
}

double series_sq_inertia(const std::vector<Series>& members, const Series& centroid,
                         std::optional<int> band) {
    double total = 0.0;
    for (const auto& s : members) total += sq_alignment_cost(s, centroid, band);
    return total;
}

} // namespace

Series Series::zeros(std::size_t length, std::size_t dim) {
    Series s;
    s.length = length;
    s.dim = dim;
    s.values.assign(length * dim, 0.0);
    return s;
}

Series Series::univariate(std::vector<double> v) {
    Series s;
    s.length = v.size();
    s.dim = 1;
    s.values = std::move(v);
    return s;
}

void SeriesMatrix::validate() const {
    if (series.size() != zone_ids.size())
        throw ValidationError("series/zone_ids size mismatch");
    std::set<std::string> ids(zone_ids.begin(), zone_ids.end());
    if (ids.size() != zone_ids.size())
        throw ValidationError("duplicate ids in series matrix");
    for (const auto& s : series) {
        if (s.length != series.front().length || s.dim != series.front().dim)
            throw ValidationError("inconsistent series shapes");
        for (double v : s.values)
            if (!std::isfinite(v)) throw ValidationError("non-finite value in series");
    }
}

double sq_alignment_cost(const Series& p, const Series& q, std::optional<int> band) {
    return dp_cost(p, q, band, nullptr);
}

double distance(const Series& p, const Series& q, std::optional<int> band) {
    return std::sqrt(dp_cost(p, q, band, nullptr));
}

std::vector<std::pair<std::size_t, std::size_t>> alignment_path(const Series& p,
                                                                const Series& q,
                                                                std::optional<int> band) {
    std::vector<std::vector<double>> dp;
    dp_cost(p, q, band, &dp);
    std::vector<std::pair<std::size_t, std::size_t>> path;
    std::size_t i = p.length - 1, j = q.length - 1;
    path.emplace_back(i, j);
    while (i > 0 || j > 0) {
        if (i == 0) {
            --j;
        } else if (j == 0) {
            --i;
        } else {
            const double diag = dp[i - 1][j - 1];
            const double up = dp[i - 1][j];
            const double left = dp[i][j - 1];
            if (diag <= up && diag <= left) {
                --i;
                --j;
            } else if (up <= left) {
                --i;
            } else {
                --j;
            }
        }
        path.emplace_back(i, j);
    }
    std::reverse(path.begin(), path.end());
    return path;
}

Series dba_barycenter(const std::vector<Series>& members, const Series& init,
                      int max_iter, double tol, std::optional<int> band) {
    if (members.empty())
        throw ValidationError("DBA needs at least one member");
    if (members.size() == 1) return members.front();

    Series centroid = init;
    double best_inertia = series_sq_inertia(members, centroid, band);
    for (int iter = 0; iter < max_iter; ++iter) {
        Series sums = Series::zeros(centroid.length, centroid.dim);
        std::vector<double> counts(centroid.length, 0.0);
        for (const auto& member : members) {
            // path over (centroid index, member index)
            for (auto [ci, mi] : alignment_path(centroid, member, band)) {
                for (std::size_t d = 0; d < centroid.dim; ++d)
                    sums.at(ci, d) += member.at(mi, d);
                counts[ci] += 1.0;
            }
        }
        Series updated = centroid;
        for (std::size_t t = 0; t < centroid.length; ++t) {
            if (counts[t] == 0.0) continue;   // unreachable with boundary constraint
            for (std::size_t d = 0; d < centroid.dim; ++d)
                updated.at(t, d) = sums.at(t, d) / counts[t];
        }
        const double inertia = series_sq_inertia(members, updated, band);
        if (inertia > best_inertia) break;   // keep the previous centroid
        const double gain = best_inertia - inertia;
        centroid = std::move(updated);
        best_inertia = inertia;
        if (gain < tol) break;
    }
    return centroid;
}

std::vector<std::size_t> kmeanspp_init(const SeriesMatrix& m, int k, std::uint64_t seed,
                                       std::optional<int> band) {
    const std::size_t n = m.size();
    if (k < 1 || static_cast<std::size_t>(k) > n)
        throw ValidationError("k must be in [1, number of series]");
    Rng rng(seed);
    std::vector<std::size_t> chosen;
    chosen.reserve(static_cast<std::size_t>(k));
    chosen.push_back(static_cast<std::size_t>(rng.below(n)));

    std::vector<double> d2(n, kInf);
    std::vector<char> taken(n, 0);
    taken[chosen[0]] = 1;
    while (chosen.size() < static_cast<std::size_t>(k)) {
        const Series& last = m.series[chosen.back()];
        for (std::size_t i = 0; i < n; ++i) {
            if (taken[i]) { d2[i] = 0.0; continue; }
            d2[i] = std::min(d2[i], sq_alignment_cost(m.series[i], last, band));
        }
        const double total = kernels::sum(d2);
        std::size_t pick = n;
        if (total > 0.0) {
            double target = rng.uniform() * total;
            for (std::size_t i = 0; i < n; ++i) {
                target -= d2[i];
                if (!taken[i] && target <= 0.0) { pick = i; break; }
            }
        }
        if (pick == n) {
            // all remaining distances are zero: fall back to the first free slot
            for (std::size_t i = 0; i < n; ++i)
                if (!taken[i]) { pick = i; break; }
        }
        taken[pick] = 1;
        chosen.push_back(pick);
    }
    return chosen;
}

ClusterModel fit_kmeans(const SeriesMatrix& m, int k, std::uint64_t seed,
                        const KMeansOptions& options) {
    m.validate();
    const std::size_t n = m.size();
    if (k < 1)
        throw ValidationError("k must be >= 1");
    if (static_cast<std::size_t>(k) > n)
        throw ValidationError("k exceeds the number of series (" + std::to_string(n) + ")");

    ClusterModel model;
    model.k = k;
    model.seed = seed;
    for (std::size_t idx : kmeanspp_init(m, k, seed, options.band))
        model.centroids.push_back(m.series[idx]);
    model.assignments.assign(n, -1);

    std::vector<double> assigned_sq(n, 0.0);
    double prev_inertia = kInf;
    for (int iter = 0; iter < options.max_iter; ++iter) {
        model.iterations_run = iter + 1;

        // assignment step (parallel across series, deterministic per index)
        parallel_for(n, options.threads, [&](std::size_t i) {
            int best_c = 0;
            double best_d = kInf;
            for (int c = 0; c < k; ++c) {
                const double d =
                    sq_alignment_cost(m.series[i], model.centroids[static_cast<std::size_t>(c)],
                                      options.band);
                if (d < best_d) { best_d = d; best_c = c; }
            }
            model.assignments[i] = best_c;
            assigned_sq[i] = best_d;
        });

        // empty-cluster repair: reseed with the series farthest from its centroid
        while (true) {
            std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
            for (int a : model.assignments) ++sizes[static_cast<std::size_t>(a)];
            int empty = -1;
            for (int c = 0; c < k; ++c)
                if (sizes[static_cast<std::size_t>(c)] == 0) { empty = c; break; }
            if (empty < 0) break;
            std::size_t farthest = n;
            double worst = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (sizes[static_cast<std::size_t>(model.assignments[i])] <= 1) continue;
                if (assigned_sq[i] > worst) { worst = assigned_sq[i]; farthest = i; }
            }
            model.centroids[static_cast<std::size_t>(empty)] = m.series[farthest];
            model.assignments[farthest] = empty;
            assigned_sq[farthest] = 0.0;
        }

        const double inertia = kernels::sum(assigned_sq);

        // centroid update (parallel across clusters)
        parallel_for(static_cast<std::size_t>(k), options.threads, [&](std::size_t c) {
            std::vector<Series> members;
            for (std::size_t i = 0; i < n; ++i)
                if (model.assignments[i] == static_cast<int>(c)) members.push_back(m.series[i]);
            model.centroids[c] = dba_barycenter(members, model.centroids[c],
                                                options.dba_max_iter, options.dba_tol,
                                                options.band);
        });

        if (prev_inertia - inertia < options.tol) {
            model.inertia = inertia;
            break;
        }
        prev_inertia = inertia;
        model.inertia = inertia;
    }
    return model;
}

double silhouette(const SeriesMatrix& m, const std::vector<int>& assignments,
                  std::optional<int> band, unsigned threads) {
    const std::size_t n = m.size();
    if (assignments.size() != n)
        throw ValidationError("assignment vector does not match series matrix");
    int k = 0;
    for (int a : assignments) k = std::max(k, a + 1);
    std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
    for (int a : assignments) {
        if (a < 0) throw ValidationError("unassigned series in silhouette input");
        ++sizes[static_cast<std::size_t>(a)];
    }
    std::size_t non_empty = 0;
    for (std::size_t s : sizes) non_empty += (s > 0);
    if (non_empty < 2)
        throw ValidationError("silhouette needs at least 2 non-empty clusters");

    // pairwise distance matrix (parallel over rows, fixed reduction order)
    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
    parallel_for(n, threads, [&](std::size_t i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j <= i) continue;
            dist[i][j] = distance(m.series[i], m.series[j], band);
        }
    });
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) dist[i][j] = dist[j][i];

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const int own = assignments[i];
        if (sizes[static_cast<std::size_t>(own)] <= 1) continue;   // singleton: s = 0
        double a_sum = 0.0;
        std::vector<double> other_sum(static_cast<std::size_t>(k), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            if (assignments[j] == own) a_sum += dist[i][j];
            else other_sum[static_cast<std::size_t>(assignments[j])] += dist[i][j];
        }
        const double a = a_sum / static_cast<double>(sizes[static_cast<std::size_t>(own)] - 1);
        double b = kInf;
        for (int c = 0; c < k; ++c) {
            if (c == own || sizes[static_cast<std::size_t>(c)] == 0) continue;
            b = std::min(b, other_sum[static_cast<std::size_t>(c)] /
                                static_cast<double>(sizes[static_cast<std::size_t>(c)]));
        }
        const double denom = std::max(a, b);
        total += denom == 0.0 ? 0.0 : (b - a) / denom;
    }
    return total / static_cast<double>(n);
}

KSelection select_k(const SeriesMatrix& m, int k_min, int k_max, std::uint64_t seed,
                    const KMeansOptions& options) {
    if (k_min < 2)
        throw ValidationError("k selection starts at k >= 2 (silhouette undefined below)");
    if (k_max < k_min)
        throw ValidationError("empty k range");
    KSelection out;
    for (int k = k_min; k <= k_max; ++k) {
        ClusterModel model = fit_kmeans(m, k, seed, options);
        model.silhouette = silhouette(m, model.assignments, options.band, options.threads);
        out.scores.emplace_back(k, model.silhouette);
        if (out.best_k == 0 || model.silhouette > out.best.silhouette) {
            out.best_k = k;
            out.best = std::move(model);
        }
    }
    return out;
}

} // namespace lagwarp::dtw
