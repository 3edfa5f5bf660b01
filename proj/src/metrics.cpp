#include "lagwarp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "lagwarp/errors.hpp"
#include "lagwarp/kernels.hpp"
#include "lagwarp/parallel.hpp"

namespace lagwarp::metrics {

namespace {

constexpr double kEarthRadiusKm = 6378.137;
constexpr double kDegToRad = 0.017453292519943295;

} // namespace

const char* metric_name(Metric m) {
    switch (m) {
        case Metric::intensity: return "intensity";
        case Metric::duration: return "duration";
        case Metric::redundancy: return "redundancy";
        case Metric::frequency: return "frequency";
        case Metric::proximity: return "proximity";
        case Metric::shortest_distance: return "shortest_distance";
    }
    return "?";
}

std::optional<Metric> metric_from_name(const std::string& name) {
    for (int i = 0; i < kMetricCount; ++i) {
        Metric m = static_cast<Metric>(i);
        if (name == metric_name(m)) return m;
    }
    return std::nullopt;
}

bool is_outage_metric(Metric m) {
    return m == Metric::intensity || m == Metric::duration;
}

const char* flag_name(Flag f) {
    switch (f) {
        case Flag::none: return "";
        case Flag::no_qualifying_intervals: return "no_qualifying_intervals";
        case Flag::no_trips: return "no_trips";
        case Flag::excluded_zero_baseline: return "excluded_zero_baseline";
        case Flag::constant_input: return "constant_input";
    }
    return "";
}

OutageDay outage_day(const std::vector<double>& fractions, double threshold) {
    OutageDay out;
    double sum = 0.0;
    for (double f : fractions) {
        if (f < 0.0 || f > 1.0)
            throw ValidationError("outage fraction outside [0, 1]");
        if (f >= threshold) {
            sum += f;
            ++out.qualifying_intervals;
        }
    }
    if (out.qualifying_intervals == 0) {
        out.flagged = true;
        return out;
    }
    out.intensity = sum / out.qualifying_intervals;
    out.duration_hours = 0.25 * out.qualifying_intervals;
    return out;
}

long redundancy(const TripDayInput& day) {
    std::vector<std::string_view> ids(day.poi_ids.begin(), day.poi_ids.end());
    std::sort(ids.begin(), ids.end());
    return static_cast<long>(std::unique(ids.begin(), ids.end()) - ids.begin());
}

double frequency(const TripDayInput& day, bool* flagged) {
    const long r = redundancy(day);
    if (flagged) *flagged = (r == 0);
    if (r == 0) return 0.0;
    std::int64_t volume = 0;
    for (std::int64_t c : day.counts) volume += c;
    return static_cast<double>(volume) / static_cast<double>(r);
}

double haversine_km(double lat1, double lon1, double lat2, double lon2) {
    if (lat1 < -90 || lat1 > 90 || lat2 < -90 || lat2 > 90)
        throw ValidationError("latitude out of range");
    if (lon1 < -180 || lon1 > 180 || lon2 < -180 || lon2 > 180)
        throw ValidationError("longitude out of range");
    const double phi1 = lat1 * kDegToRad;
    const double phi2 = lat2 * kDegToRad;
    const double dphi = (lat2 - lat1) * kDegToRad;
    const double dlam = (lon2 - lon1) * kDegToRad;
    const double s1 = std::sin(dphi / 2.0);
    const double s2 = std::sin(dlam / 2.0);
    const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
    return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

PoiIndex::PoiIndex(const std::vector<FoodPoi>& pois) : pois_(pois) {
    for (std::size_t i = 0; i < pois_.size(); ++i)
        by_id_[pois_[i].poi_id] = i;
    if (by_id_.size() != pois_.size())
        throw ValidationError("duplicate poi_id in POI registry");
}

const FoodPoi& PoiIndex::require(const std::string& poi_id) const {
    auto it = by_id_.find(poi_id);
    if (it == by_id_.end())
        throw ValidationError("unknown poi_id '" + poi_id + "'");
    return pois_[it->second];
}

double proximity_km(const TripDayInput& day, const PoiIndex& pois, const Zone& zone,
                    ProximityMode mode, bool* flagged) {
    const long r = redundancy(day);
    if (flagged) *flagged = (r == 0);
    if (r == 0) return 0.0;
    double weighted = 0.0;
    std::int64_t volume = 0;
    for (std::size_t i = 0; i < day.poi_ids.size(); ++i) {
        const FoodPoi& poi = pois.require(day.poi_ids[i]);
        const double km = haversine_km(zone.lat, zone.lon, poi.lat, poi.lon);
        weighted += km * static_cast<double>(day.counts[i]);
        volume += day.counts[i];
    }
    const double denom = mode == ProximityMode::volume_weighted
                             ? static_cast<double>(r)
                             : static_cast<double>(volume);
    return weighted / denom;
}

double shortest_distance_static_km(const Zone& zone, const PoiIndex& pois) {
    if (pois.all().empty())
        throw ValidationError("shortest distance undefined: no registered POIs");
    double best = -1.0;
    for (const auto& poi : pois.all()) {
        const double km = haversine_km(zone.lat, zone.lon, poi.lat, poi.lon);
        if (best < 0.0 || km < best) best = km;
    }
    return best;
}

double shortest_distance_visited_km(const TripDayInput& day, const PoiIndex& pois,
                                    const Zone& zone, bool* flagged) {
    if (day.poi_ids.empty()) {
        if (flagged) *flagged = true;
        return 0.0;
    }
    if (flagged) *flagged = false;
    double best = -1.0;
    for (const auto& id : day.poi_ids) {
        const FoodPoi& poi = pois.require(id);
        const double km = haversine_km(zone.lat, zone.lon, poi.lat, poi.lon);
        if (best < 0.0 || km < best) best = km;
    }
    return best;
}

std::vector<double> moving_average(const std::vector<double>& values, int window) {
    if (window < 1)
        throw ValidationError("moving average window must be >= 1");
    const int n = static_cast<int>(values.size());
    const int half = window / 2;
    std::vector<double> out(values.size());
    for (int i = 0; i < n; ++i) {
        const int lo = std::max(0, i - half);
        const int hi = std::min(n - 1, i + half);
        double sum = 0.0;
        for (int j = lo; j <= hi; ++j) sum += values[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(i)] = sum / static_cast<double>(hi - lo + 1);
    }
    return out;
}

std::optional<std::vector<double>> pct_change_vs_baseline(const std::vector<double>& values,
                                                          int baseline_days) {
    if (baseline_days < 1 || static_cast<std::size_t>(baseline_days) > values.size())
        throw ValidationError("baseline length outside series");
    const double base = kernels::sum(std::span(values.data(),
                                               static_cast<std::size_t>(baseline_days))) /
                        baseline_days;
    if (base == 0.0) return std::nullopt;
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        out[i] = (values[i] - base) / base;
    return out;
}

std::vector<double> normalize_minmax(const std::vector<double>& values, bool* flagged) {
    if (values.empty())
        throw ValidationError("cannot normalize an empty series");
    double lo, hi;
    kernels::minmax(values, lo, hi);
    if (flagged) *flagged = false;
    if (lo == hi) {
        if (flagged) *flagged = true;
        return std::vector<double>(values.size(), 0.0);
    }
    std::vector<double> out(values.size());
    const double inv = 1.0 / (hi - lo);
    for (std::size_t i = 0; i < values.size(); ++i)
        out[i] = (values[i] - lo) * inv;
    return out;
}

FacilityActivity facility_inactivity(const std::string& poi_id,
                                     const std::map<Date, std::int64_t>& visits,
                                     const StudyWindow& window, double drop_threshold) {
    window.validate();
    FacilityActivity out;
    out.poi_id = poi_id;

    std::int64_t baseline_total = 0;
    std::int64_t disruption_total = 0;
    for (const auto& [date, count] : visits) {
        if (window.in_baseline(date)) baseline_total += count;
        else if (window.in_disruption(date)) disruption_total += count;
    }
    out.baseline_mean_daily_visits =
        static_cast<double>(baseline_total) / window.baseline_days();
    out.disruption_mean_daily_visits =
        static_cast<double>(disruption_total) / window.disruption_days();

    if (out.baseline_mean_daily_visits == 0.0) {
        out.excluded = true;   // cannot measure a drop from zero
        return out;
    }

    const double floor = (1.0 - drop_threshold) * out.baseline_mean_daily_visits;
    for (Date d = window.disruption_start; d <= window.end; ++d) {
        auto it = visits.find(d);
        const std::int64_t v = it == visits.end() ? 0 : it->second;
        if (static_cast<double>(v) <= floor) out.inactive_days.insert(d);
    }
    out.inactive = out.disruption_mean_daily_visits <= floor;
    return out;
}

ZoneMetrics build_zone_metrics(const std::vector<OutageRecord>& outages,
                               const std::vector<TripRecord>& trips,
                               const std::vector<FoodPoi>& pois,
                               const std::vector<Zone>& zones,
                               const StudyWindow& window, const MetricsOptions& options) {
    window.validate();
    const int n_days = window.total_days();

    ZoneMetrics out;
    std::map<std::string, std::size_t> zone_index;
    std::vector<const Zone*> zone_ptr;
    {
        std::vector<const Zone*> sorted;
        sorted.reserve(zones.size());
        for (const auto& z : zones) sorted.push_back(&z);
        std::sort(sorted.begin(), sorted.end(),
                  [](const Zone* a, const Zone* b) { return a->zone_id < b->zone_id; });
        for (const Zone* z : sorted) {
            zone_index[z->zone_id] = out.zone_ids.size();
            out.zone_ids.push_back(z->zone_id);
            zone_ptr.push_back(z);
        }
    }
    const std::size_t n_zones = out.zone_ids.size();

    // bucket outage fractions per (zone, day)
    std::vector<std::vector<std::vector<double>>> fractions(n_zones);
    for (auto& v : fractions) v.resize(static_cast<std::size_t>(n_days));
    for (const auto& rec : outages) {
        auto it = zone_index.find(rec.zone_id);
        if (it == zone_index.end())
            throw ValidationError("outage record references unknown zone '" + rec.zone_id + "'");
        const Date d = rec.timestamp.date();
        if (!window.contains(d)) continue;
        fractions[it->second][static_cast<std::size_t>(window.day_index(d))].push_back(
            static_cast<double>(rec.customers_out) / static_cast<double>(rec.customers_total));
    }

    // bucket trips per (zone, day)
    std::vector<std::vector<TripDayInput>> zone_trips(n_zones);
    for (auto& v : zone_trips) v.resize(static_cast<std::size_t>(n_days));
    for (const auto& t : trips) {
        auto it = zone_index.find(t.home_zone_id);
        if (it == zone_index.end())
            throw ValidationError("trip references unknown zone '" + t.home_zone_id + "'");
        if (!window.contains(t.date))
            throw ValidationError("trip on " + t.date.to_string() + " outside study window");
        auto& day = zone_trips[it->second][static_cast<std::size_t>(window.day_index(t.date))];
        day.poi_ids.push_back(t.poi_id);
        day.counts.push_back(t.count);
    }

    const PoiIndex poi_index(pois);

    out.series.resize(n_zones);
    std::vector<double> static_shortest(n_zones);
    parallel_for(n_zones, options.threads, [&](std::size_t zi) {
        auto& per_metric = out.series[zi];
        per_metric.resize(kMetricCount);
        for (int m = 0; m < kMetricCount; ++m) {
            auto& s = per_metric[static_cast<std::size_t>(m)];
            s.zone_id = out.zone_ids[zi];
            s.metric = static_cast<Metric>(m);
            s.start = window.start;
            s.values.assign(static_cast<std::size_t>(n_days), 0.0);
            s.flags.assign(static_cast<std::size_t>(n_days), Flag::none);
        }
        const Zone& zone = *zone_ptr[zi];
        static_shortest[zi] = shortest_distance_static_km(zone, poi_index);
        for (int di = 0; di < n_days; ++di) {
            const std::size_t d = static_cast<std::size_t>(di);
            const OutageDay od = outage_day(fractions[zi][d], options.outage_threshold);
            auto& intensity = per_metric[static_cast<std::size_t>(Metric::intensity)];
            auto& duration = per_metric[static_cast<std::size_t>(Metric::duration)];
            intensity.values[d] = od.intensity;
            duration.values[d] = od.duration_hours;
            if (od.flagged) {
                intensity.flags[d] = Flag::no_qualifying_intervals;
                duration.flags[d] = Flag::no_qualifying_intervals;
            }

            const TripDayInput& day = zone_trips[zi][d];
            bool flagged = false;
            const long r = redundancy(day);
            per_metric[static_cast<std::size_t>(Metric::redundancy)].values[d] =
                static_cast<double>(r);
            if (r == 0)
                per_metric[static_cast<std::size_t>(Metric::redundancy)].flags[d] = Flag::no_trips;

            per_metric[static_cast<std::size_t>(Metric::frequency)].values[d] =
                frequency(day, &flagged);
            if (flagged)
                per_metric[static_cast<std::size_t>(Metric::frequency)].flags[d] = Flag::no_trips;

            per_metric[static_cast<std::size_t>(Metric::proximity)].values[d] =
                proximity_km(day, poi_index, zone, options.proximity_mode, &flagged);
            if (flagged)
                per_metric[static_cast<std::size_t>(Metric::proximity)].flags[d] = Flag::no_trips;

            per_metric[static_cast<std::size_t>(Metric::shortest_distance)].values[d] =
                shortest_distance_visited_km(day, poi_index, zone, &flagged);
            if (flagged)
                per_metric[static_cast<std::size_t>(Metric::shortest_distance)].flags[d] =
                    Flag::no_trips;
        }
    });
    for (std::size_t zi = 0; zi < n_zones; ++zi)
        out.shortest_static_km[out.zone_ids[zi]] = static_shortest[zi];
    return out;
}

std::vector<FacilityActivity> build_facility_activity(const std::vector<TripRecord>& trips,
                                                      const std::vector<FoodPoi>& pois,
                                                      const StudyWindow& window,
                                                      double drop_threshold) {
    std::map<std::string, std::map<Date, std::int64_t>> visits;
    for (const auto& poi : pois) visits[poi.poi_id];   // every registered facility
    for (const auto& t : trips) {
        auto it = visits.find(t.poi_id);
        if (it == visits.end())
            throw ValidationError("trip references unknown poi '" + t.poi_id + "'");
        it->second[t.date] += t.count;
    }
    std::vector<FacilityActivity> out;
    out.reserve(visits.size());
    for (const auto& [poi_id, by_day] : visits)
        out.push_back(facility_inactivity(poi_id, by_day, window, drop_threshold));
    return out;
}

} // namespace lagwarp::metrics
