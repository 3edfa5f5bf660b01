#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lagwarp/date.hpp"

namespace lagwarp {

struct OutageRecord {
    std::string zone_id;
    Timestamp timestamp;        // 15-minute grid
    std::int64_t customers_out = 0;
    std::int64_t customers_total = 0;
};

struct TripRecord {
    std::string home_zone_id;
    std::string poi_id;
    Date date;
    std::int64_t count = 0;
};

struct FoodPoi {
    std::string poi_id;
    double lat = 0.0;
    double lon = 0.0;
    std::string naics;
};

struct Zone {
    std::string zone_id;
    double lat = 0.0;
    double lon = 0.0;
    double road_density = 0.0;
    double median_income = 0.0;
};

struct PingRecord {
    std::string device_id;
    double lat = 0.0;
    double lon = 0.0;
    Timestamp timestamp;
};

// Device-level visit event, the raw form trips arrive in before aggregation.
struct VisitEvent {
    std::string device_id;
    std::string poi_id;
    Date date;
};

struct StudyWindow {
    Date start;
    Date baseline_end;
    Date disruption_start;
    Date end;

    void validate() const;
    int total_days() const { return end - start + 1; }
    int baseline_days() const { return baseline_end - start + 1; }
    int disruption_days() const { return end - disruption_start + 1; }
    bool contains(Date d) const { return d >= start && d <= end; }
    bool in_baseline(Date d) const { return d >= start && d <= baseline_end; }
    bool in_disruption(Date d) const { return d >= disruption_start && d <= end; }
    int day_index(Date d) const { return d - start; }
};

struct LoadDiagnostics {
    std::size_t rows_read = 0;
    std::size_t rows_rejected = 0;
    std::vector<std::string> reject_reasons;   // capped, with line numbers
};

// Exact column layouts for the five ingest schemas.
namespace schema {
inline const std::vector<std::string> outages{"zone_id", "timestamp", "customers_out",
                                              "customers_total"};
inline const std::vector<std::string> trips{"home_zone_id", "poi_id", "date", "count"};
inline const std::vector<std::string> pois{"poi_id", "lat", "lon", "naics"};
inline const std::vector<std::string> zones{"zone_id", "lat", "lon", "road_density",
                                            "median_income"};
inline const std::vector<std::string> pings{"device_id", "lat", "lon", "timestamp"};
} // namespace schema

// Loaders validate every row against the type invariants. A violated
// invariant raises ValidationError naming the line unless a diagnostics sink
// is supplied, in which case the row is rejected and counted.
std::vector<OutageRecord> load_outages(const std::string& path,
                                       LoadDiagnostics* diag = nullptr);
std::vector<TripRecord> load_trips(const std::string& path,
                                   LoadDiagnostics* diag = nullptr);
std::vector<FoodPoi> load_pois(const std::string& path, LoadDiagnostics* diag = nullptr);
std::vector<Zone> load_zones(const std::string& path, LoadDiagnostics* diag = nullptr);
std::vector<PingRecord> load_pings(const std::string& path,
                                   LoadDiagnostics* diag = nullptr);

void write_outages(const std::string& path, const std::vector<OutageRecord>& records);
void write_trips(const std::string& path, const std::vector<TripRecord>& records);
void write_pois(const std::string& path, const std::vector<FoodPoi>& records);
void write_zones(const std::string& path, const std::vector<Zone>& records);

// Local-hour interval treated as night; wraps midnight when start > end.
struct NightWindow {
    int start_hour = 20;
    int end_hour = 6;
    bool contains(int hour) const {
        return start_hour <= end_hour ? (hour >= start_hour && hour < end_hour)
                                      : (hour >= start_hour || hour < end_hour);
    }
};

struct HomeAssignment {
    std::map<std::string, std::string> device_to_zone;
    std::size_t devices_without_night_pings = 0;
};

// Mode of per-ping nearest zone centroids over nighttime pings; ties resolve
// to the lexicographically smaller zone_id.
HomeAssignment assign_home_zones(const std::vector<PingRecord>& pings,
                                 const std::vector<Zone>& zones,
                                 NightWindow night = {});

struct TripAggregation {
    std::vector<TripRecord> trips;   // sorted by (zone, poi, date)
    std::size_t dropped_events = 0;  // events from devices without a home zone
};

TripAggregation aggregate_trips(const std::vector<VisitEvent>& events,
                                const std::map<std::string, std::string>& homes);

} // namespace lagwarp
