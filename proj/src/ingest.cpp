#include "lagwarp/ingest.hpp"

#include <algorithm>
#include <set>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "lagwarp/csv.hpp"
#include "lagwarp/errors.hpp"
#include "lagwarp/metrics.hpp"

namespace lagwarp {

void StudyWindow::validate() const {
    if (!(start <= baseline_end && baseline_end < disruption_start && disruption_start <= end))
        throw ValidationError("study window must satisfy start <= baseline_end < "
                              "disruption_start <= end");
    if (disruption_start - baseline_end != 1)
        throw ValidationError("baseline and disruption periods must partition the window "
                              "(disruption_start = baseline_end + 1)");
}

namespace {

constexpr std::size_t kMaxStoredRejects = 20;

// Shared loader skeleton: parse_row throws ValidationError on a bad row;
// with a diagnostics sink the row is counted and skipped instead.
template <typename Record, typename ParseRow>
std::vector<Record> load_table(const std::string& path,
                               const std::vector<std::string>& header,
                               LoadDiagnostics* diag, ParseRow&& parse_row) {
    CsvReader reader(path, header);
    std::vector<Record> out;
    while (reader.next_row()) {
        if (diag) ++diag->rows_read;
        try {
            out.push_back(parse_row(reader));
        } catch (const ValidationError& e) {
            if (!diag) throw;
            ++diag->rows_rejected;
            if (diag->reject_reasons.size() < kMaxStoredRejects)
                diag->reject_reasons.push_back(e.what());
        }
    }
    return out;
}

[[noreturn]] void row_error(const CsvReader& r, const std::string& msg) {
    throw ValidationError(r.path() + ":" + std::to_string(r.line_number()) + ": " + msg);
}

void check_lat_lon(const CsvReader& r, double lat, double lon) {
    if (lat < -90.0 || lat > 90.0) row_error(r, "latitude out of range");
    if (lon < -180.0 || lon > 180.0) row_error(r, "longitude out of range");
}

} // namespace

std::vector<OutageRecord> load_outages(const std::string& path, LoadDiagnostics* diag) {
    std::unordered_set<std::string> seen;
    auto records = load_table<OutageRecord>(
        path, schema::outages, diag, [&](CsvReader& r) {
            OutageRecord rec;
            rec.zone_id = std::string(r.fields()[0]);
            if (rec.zone_id.empty()) row_error(r, "empty zone_id");
            rec.timestamp = Timestamp::parse(r.fields()[1]);
            if (!rec.timestamp.on_quarter_hour())
                row_error(r, "timestamp not on a 15-minute boundary");
            rec.customers_out = r.field_int(2, "customers_out");
            rec.customers_total = r.field_int(3, "customers_total");
            if (rec.customers_out < 0) row_error(r, "customers_out negative");
            if (rec.customers_total <= 0) row_error(r, "customers_total must be positive");
            if (rec.customers_out > rec.customers_total)
                row_error(r, "customers_out exceeds customers_total");
            std::string key = rec.zone_id + "|" + std::to_string(rec.timestamp.minutes());
            if (!seen.insert(std::move(key)).second)
                row_error(r, "duplicate (zone_id, timestamp)");
            return rec;
        });
    return records;
}

std::vector<TripRecord> load_trips(const std::string& path, LoadDiagnostics* diag) {
    return load_table<TripRecord>(path, schema::trips, diag, [&](CsvReader& r) {
        TripRecord rec;
        rec.home_zone_id = std::string(r.fields()[0]);
        rec.poi_id = std::string(r.fields()[1]);
        if (rec.home_zone_id.empty()) row_error(r, "empty home_zone_id");
        if (rec.poi_id.empty()) row_error(r, "empty poi_id");
        rec.date = Date::parse(r.fields()[2]);
        rec.count = r.field_int(3, "count");
        if (rec.count < 1) row_error(r, "count must be >= 1");
        return rec;
    });
}

std::vector<FoodPoi> load_pois(const std::string& path, LoadDiagnostics* diag) {
    std::unordered_set<std::string> seen;
    return load_table<FoodPoi>(path, schema::pois, diag, [&](CsvReader& r) {
        FoodPoi rec;
        rec.poi_id = std::string(r.fields()[0]);
        if (rec.poi_id.empty()) row_error(r, "empty poi_id");
        rec.lat = r.field_double(1, "lat");
        rec.lon = r.field_double(2, "lon");
        check_lat_lon(r, rec.lat, rec.lon);
        rec.naics = std::string(r.fields()[3]);
        if (!seen.insert(rec.poi_id).second) row_error(r, "duplicate poi_id");
        return rec;
    });
}

std::vector<Zone> load_zones(const std::string& path, LoadDiagnostics* diag) {
    std::unordered_set<std::string> seen;
    return load_table<Zone>(path, schema::zones, diag, [&](CsvReader& r) {
        Zone rec;
        rec.zone_id = std::string(r.fields()[0]);
        if (rec.zone_id.empty()) row_error(r, "empty zone_id");
        rec.lat = r.field_double(1, "lat");
        rec.lon = r.field_double(2, "lon");
        check_lat_lon(r, rec.lat, rec.lon);
        rec.road_density = r.field_double(3, "road_density");
        if (rec.road_density < 0.0) row_error(r, "road_density negative");
        rec.median_income = r.field_double(4, "median_income");
        if (!seen.insert(rec.zone_id).second) row_error(r, "duplicate zone_id");
        return rec;
    });
}

std::vector<PingRecord> load_pings(const std::string& path, LoadDiagnostics* diag) {
    return load_table<PingRecord>(path, schema::pings, diag, [&](CsvReader& r) {
        PingRecord rec;
        rec.device_id = std::string(r.fields()[0]);
        if (rec.device_id.empty()) row_error(r, "empty device_id");
        rec.lat = r.field_double(1, "lat");
        rec.lon = r.field_double(2, "lon");
        check_lat_lon(r, rec.lat, rec.lon);
        rec.timestamp = Timestamp::parse(r.fields()[3]);
        return rec;
    });
}

void write_outages(const std::string& path, const std::vector<OutageRecord>& records) {
    CsvWriter w(path, schema::outages);
    for (const auto& r : records)
        w.row({r.zone_id, r.timestamp.to_string(), std::to_string(r.customers_out),
               std::to_string(r.customers_total)});
    w.close();
}

void write_trips(const std::string& path, const std::vector<TripRecord>& records) {
    CsvWriter w(path, schema::trips);
    for (const auto& r : records)
        w.row({r.home_zone_id, r.poi_id, r.date.to_string(), std::to_string(r.count)});
    w.close();
}

void write_pois(const std::string& path, const std::vector<FoodPoi>& records) {
    CsvWriter w(path, schema::pois);
    for (const auto& r : records)
        w.row({r.poi_id, CsvWriter::num(r.lat), CsvWriter::num(r.lon), r.naics});
    w.close();
}

void write_zones(const std::string& path, const std::vector<Zone>& records) {
    CsvWriter w(path, schema::zones);
    for (const auto& r : records)
        w.row({r.zone_id, CsvWriter::num(r.lat), CsvWriter::num(r.lon),
               CsvWriter::num(r.road_density), CsvWriter::num(r.median_income)});
    w.close();
}

HomeAssignment assign_home_zones(const std::vector<PingRecord>& pings,
                                 const std::vector<Zone>& zones, NightWindow night) {
    if (zones.empty())
        throw ValidationError("home assignment needs at least one zone");

    // per device: zone_id -> nighttime ping count
    std::unordered_map<std::string, std::map<std::string, std::size_t>> counts;
    std::unordered_set<std::string> all_devices;
    for (const auto& ping : pings) {
        all_devices.insert(ping.device_id);
        const int hour = ping.timestamp.minute_of_day() / 60;
        if (!night.contains(hour)) continue;
        const Zone* best = nullptr;
        double best_km = 0.0;
        for (const auto& z : zones) {
            const double km = metrics::haversine_km(ping.lat, ping.lon, z.lat, z.lon);
            if (!best || km < best_km || (km == best_km && z.zone_id < best->zone_id)) {
                best = &z;
                best_km = km;
            }
        }
        counts[ping.device_id][best->zone_id] += 1;
    }

    HomeAssignment out;
    for (const auto& [device, zone_counts] : counts) {
        const std::string* mode = nullptr;
        std::size_t mode_count = 0;
        // std::map iterates zone ids in order, so ties keep the smaller id
        for (const auto& [zone_id, n] : zone_counts) {
            if (n > mode_count) {
                mode = &zone_id;
                mode_count = n;
            }
        }
        out.device_to_zone[device] = *mode;
    }
    out.devices_without_night_pings = all_devices.size() - counts.size();
    return out;
}

TripAggregation aggregate_trips(const std::vector<VisitEvent>& events,
                                const std::map<std::string, std::string>& homes) {
    TripAggregation out;
    std::map<std::tuple<std::string, std::string, Date>, std::int64_t> sums;
    for (const auto& ev : events) {
        auto home = homes.find(ev.device_id);
        if (home == homes.end()) {
            ++out.dropped_events;
            continue;
        }
        sums[{home->second, ev.poi_id, ev.date}] += 1;
    }
    out.trips.reserve(sums.size());
    for (const auto& [key, count] : sums) {
        out.trips.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), count});
    }
    return out;
}

} // namespace lagwarp
