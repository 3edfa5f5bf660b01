#include "lagwarp/date.hpp"

#include <charconv>
#include <cstdio>

#include "lagwarp/errors.hpp"

namespace lagwarp {

namespace {

// Civil <-> day-count conversions (proleptic Gregorian, era-based).
std::int32_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<int>(doe) - 719468;
}

void civil_from_days(std::int32_t z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    const int era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int yr = static_cast<int>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y = yr + (m <= 2);
}

int parse_int(std::string_view s, std::size_t pos, std::size_t len, const char* what) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, value);
    if (ec != std::errc() || ptr != s.data() + pos + len)
        throw ValidationError(std::string("bad ") + what + " in '" + std::string(s) + "'");
    return value;
}

bool valid_civil(int y, unsigned m, unsigned d) {
    if (m < 1 || m > 12 || d < 1) return false;
    static const unsigned md[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    unsigned last = md[m - 1];
    if (m == 2 && ((y % 4 == 0 && y % 100 != 0) || y % 400 == 0)) last = 29;
    return d <= last;
}

} // namespace

Date Date::from_civil(int year, unsigned month, unsigned day) {
    if (!valid_civil(year, month, day))
        throw ValidationError("invalid calendar date");
    return Date(days_from_civil(year, month, day));
}

Date Date::parse(std::string_view iso) {
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-')
        throw ValidationError("bad date '" + std::string(iso) + "', expected YYYY-MM-DD");
    int y = parse_int(iso, 0, 4, "year");
    int m = parse_int(iso, 5, 2, "month");
    int d = parse_int(iso, 8, 2, "day");
    if (!valid_civil(y, static_cast<unsigned>(m), static_cast<unsigned>(d)))
        throw ValidationError("invalid calendar date '" + std::string(iso) + "'");
    return Date(days_from_civil(y, static_cast<unsigned>(m), static_cast<unsigned>(d)));
}

void Date::to_civil(int& year, unsigned& month, unsigned& day) const {
    civil_from_days(days_, year, month, day);
}

std::string Date::to_string() const {
    int y; unsigned m, d;
    civil_from_days(days_, y, m, d);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", y, m, d);
    return buf;
}

Timestamp Timestamp::parse(std::string_view iso) {
    // YYYY-MM-DD{T| }HH:MM:SS[Z]
    if (iso.size() == 20 && iso.back() == 'Z') iso.remove_suffix(1);
    if (iso.size() != 19 || (iso[10] != 'T' && iso[10] != ' ') || iso[13] != ':' || iso[16] != ':')
        throw ValidationError("bad timestamp '" + std::string(iso) +
                              "', expected YYYY-MM-DDTHH:MM:SS[Z]");
    Date d = Date::parse(iso.substr(0, 10));
    int hh = parse_int(iso, 11, 2, "hour");
    int mm = parse_int(iso, 14, 2, "minute");
    int ss = parse_int(iso, 17, 2, "second");
    if (hh > 23 || mm > 59 || ss > 59)
        throw ValidationError("invalid time of day '" + std::string(iso) + "'");
    if (ss != 0)
        throw ValidationError("timestamp '" + std::string(iso) + "' not at minute resolution");
    return Timestamp(static_cast<std::int64_t>(d.days()) * 1440 + hh * 60 + mm);
}

std::string Timestamp::to_string() const {
    Date d = date();
    int mod = minute_of_day();
    char buf[24];
    std::snprintf(buf, sizeof buf, "%sT%02d:%02d:00Z", d.to_string().c_str(), mod / 60, mod % 60);
    return buf;
}

Date Timestamp::date() const {
    std::int64_t day = minutes_ >= 0 ? minutes_ / 1440 : (minutes_ - 1439) / 1440;
    return Date(static_cast<std::int32_t>(day));
}

int Timestamp::minute_of_day() const {
    return static_cast<int>(minutes_ - static_cast<std::int64_t>(date().days()) * 1440);
}

Timestamp timestamp_at(Date d, int minute_of_day) {
    return Timestamp(static_cast<std::int64_t>(d.days()) * 1440 + minute_of_day);
}

} // namespace lagwarp
