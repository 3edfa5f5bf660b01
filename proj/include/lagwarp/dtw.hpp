#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lagwarp::dtw {

// Multivariate time series stored dimension-major: dim d of day t sits at
// values[d * length + t]. The layout keeps each dimension contiguous for the
// cost-row kernel.
struct Series {
    std::size_t length = 0;
    std::size_t dim = 1;
    std::vector<double> values;

    static Series zeros(std::size_t length, std::size_t dim);
    static Series univariate(std::vector<double> v);

    double at(std::size_t t, std::size_t d) const { return values[d * length + t]; }
    double& at(std::size_t t, std::size_t d) { return values[d * length + t]; }
    const double* dim_data(std::size_t d) const { return values.data() + d * length; }
};

struct SeriesMatrix {
    std::vector<std::string> zone_ids;
    std::vector<Series> series;

    std::size_t size() const { return series.size(); }
    void validate() const;   // equal lengths/dims, finite values, ids unique
};

// DTW alignment cost: cell cost is the squared Euclidean distance between
// points; the dynamic program minimizes the cumulative cost under the usual
// boundary/continuity/monotonicity moves. distance() reports the square root
// of that optimum so that distance()^2 is the clustering objective term.
// band, when set, is a Sakoe-Chiba radius on |i - j|.
double sq_alignment_cost(const Series& p, const Series& q,
                         std::optional<int> band = std::nullopt);
double distance(const Series& p, const Series& q, std::optional<int> band = std::nullopt);

// Warping path as (i, j) index pairs, used by the barycenter update.
std::vector<std::pair<std::size_t, std::size_t>> alignment_path(
    const Series& p, const Series& q, std::optional<int> band = std::nullopt);

// DTW barycenter averaging: re-align members to the current centroid and
// average the points mapped to each centroid position. Never returns a
// centroid with a larger sum of squared distances than the initializer.
Series dba_barycenter(const std::vector<Series>& members, const Series& init,
                      int max_iter = 10, double tol = 1e-6,
                      std::optional<int> band = std::nullopt);

// k-means++ seeding over DTW distances; returns indices into the matrix.
std::vector<std::size_t> kmeanspp_init(const SeriesMatrix& m, int k, std::uint64_t seed,
                                       std::optional<int> band = std::nullopt);

struct ClusterModel {
    int k = 0;
    std::vector<Series> centroids;
    std::vector<int> assignments;   // parallel to SeriesMatrix order
    double inertia = 0.0;           // sum of squared DTW distances
    double silhouette = 0.0;        // filled by select_k
    std::uint64_t seed = 0;
    int iterations_run = 0;
};

struct KMeansOptions {
    int max_iter = 50;
    double tol = 1e-6;
    int dba_max_iter = 10;
    double dba_tol = 1e-6;
    std::optional<int> band;
    unsigned threads = 1;
};

ClusterModel fit_kmeans(const SeriesMatrix& m, int k, std::uint64_t seed,
                        const KMeansOptions& options = {});

// Mean silhouette over all series with DTW distances; singleton clusters
// contribute 0, as does the a = b = 0 degenerate case.
double silhouette(const SeriesMatrix& m, const std::vector<int>& assignments,
                  std::optional<int> band = std::nullopt, unsigned threads = 1);

struct KSelection {
    int best_k = 0;
    std::vector<std::pair<int, double>> scores;   // (k, silhouette)
    ClusterModel best;
};

// Fits every k in [k_min, k_max] (same seed policy) and keeps the silhouette
// argmax; ties resolve to the smaller k.
KSelection select_k(const SeriesMatrix& m, int k_min, int k_max, std::uint64_t seed,
                    const KMeansOptions& options = {});

} // namespace lagwarp::dtw
