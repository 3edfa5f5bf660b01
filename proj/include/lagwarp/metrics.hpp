#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lagwarp/date.hpp"
#include "lagwarp/ingest.hpp"

namespace lagwarp::metrics {

enum class Metric {
    intensity,
    duration,
    redundancy,
    frequency,
    proximity,
    shortest_distance,
};

constexpr int kMetricCount = 6;
const char* metric_name(Metric m);
std::optional<Metric> metric_from_name(const std::string& name);
bool is_outage_metric(Metric m);

// Per-day coverage markers. Series stay gap-free; a flagged day carries the
// degenerate value (0) plus the reason.
enum class Flag : unsigned char {
    none,
    no_qualifying_intervals,   // outage day where the 0.1% filter removed everything
    no_trips,                  // zero-redundancy day
    excluded_zero_baseline,    // pct-change undefined for this zone
    constant_input,            // min-max normalization of a constant series
};

const char* flag_name(Flag f);

struct DailySeries {
    std::string zone_id;
    Metric metric = Metric::intensity;
    Date start;                      // day i is start + i
    std::vector<double> values;
    std::vector<Flag> flags;

    std::size_t size() const { return values.size(); }
};

// --- single zone-day operations ------------------------------------------

struct OutageDay {
    double intensity = 0.0;   // mean qualifying fraction, in [0, 1]
    double duration_hours = 0.0;
    int qualifying_intervals = 0;
    bool flagged = false;     // no interval met the threshold
};

// fractions = customers_out / customers_total per 15-minute interval of one
// zone-day; threshold is the minimum fraction for an interval to count.
OutageDay outage_day(const std::vector<double>& fractions, double threshold);

struct TripDayInput {
    std::vector<std::string> poi_ids;   // parallel arrays, one entry per record
    std::vector<std::int64_t> counts;
};

long redundancy(const TripDayInput& day);
double frequency(const TripDayInput& day, bool* flagged = nullptr);

double haversine_km(double lat1, double lon1, double lat2, double lon2);

enum class ProximityMode {
    volume_weighted,   // sum(dist * volume) / redundancy
    per_trip_mean,     // sum(dist * volume) / total volume (sensitivity variant)
};

class PoiIndex {
public:
    explicit PoiIndex(const std::vector<FoodPoi>& pois);
    const FoodPoi& require(const std::string& poi_id) const;
    const std::vector<FoodPoi>& all() const { return pois_; }

private:
    std::vector<FoodPoi> pois_;
    std::map<std::string, std::size_t> by_id_;
};

double proximity_km(const TripDayInput& day, const PoiIndex& pois, const Zone& zone,
                    ProximityMode mode = ProximityMode::volume_weighted,
                    bool* flagged = nullptr);

// Static variant: nearest registered POI to the zone centroid.
double shortest_distance_static_km(const Zone& zone, const PoiIndex& pois);
// Behavioral variant: nearest among the POIs actually visited that day.
double shortest_distance_visited_km(const TripDayInput& day, const PoiIndex& pois,
                                    const Zone& zone, bool* flagged = nullptr);

// --- series transforms -----------------------------------------------------

// Centered moving average; the window shrinks at the edges.
std::vector<double> moving_average(const std::vector<double>& values, int window);

// (value - baseline_mean) / baseline_mean per day. baseline_days gives how
// many leading values form the baseline. Returns nullopt when the baseline
// mean is zero (zone excluded from downstream clustering).
std::optional<std::vector<double>> pct_change_vs_baseline(const std::vector<double>& values,
                                                          int baseline_days);

// (x - min) / (max - min); constant input maps to all zeros and sets flagged.
std::vector<double> normalize_minmax(const std::vector<double>& values, bool* flagged = nullptr);

// --- facility activity ------------------------------------------------------

struct FacilityActivity {
    std::string poi_id;
    double baseline_mean_daily_visits = 0.0;
    double disruption_mean_daily_visits = 0.0;
    std::set<Date> inactive_days;
    bool inactive = false;   // facility-level: disruption mean dropped >= threshold
    bool excluded = false;   // baseline mean was zero; not classified
};

// visits: date -> visit count for one facility (absent days count as zero).
FacilityActivity facility_inactivity(const std::string& poi_id,
                                     const std::map<Date, std::int64_t>& visits,
                                     const StudyWindow& window, double drop_threshold);

// --- whole-table builders ----------------------------------------------------

struct MetricsOptions {
    double outage_threshold = 0.001;
    ProximityMode proximity_mode = ProximityMode::volume_weighted;
    unsigned threads = 1;
};

struct ZoneMetrics {
    std::vector<std::string> zone_ids;                 // sorted
    // series[zone][metric] over the full study window
    std::vector<std::vector<DailySeries>> series;
    std::map<std::string, double> shortest_static_km;  // per zone

    const DailySeries& at(std::size_t zone_idx, Metric m) const {
        return series[zone_idx][static_cast<std::size_t>(m)];
    }
};

ZoneMetrics build_zone_metrics(const std::vector<OutageRecord>& outages,
                               const std::vector<TripRecord>& trips,
                               const std::vector<FoodPoi>& pois,
                               const std::vector<Zone>& zones,
                               const StudyWindow& window,
                               const MetricsOptions& options = {});

std::vector<FacilityActivity> build_facility_activity(const std::vector<TripRecord>& trips,
                                                      const std::vector<FoodPoi>& pois,
                                                      const StudyWindow& window,
                                                      double drop_threshold);

} // namespace lagwarp::metrics
