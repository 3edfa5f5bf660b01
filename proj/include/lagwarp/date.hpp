#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace lagwarp {

// Calendar day stored as days since 1970-01-01. Cheap to hash, compare and
// iterate, which is all the pipeline needs.
class Date {
public:
    Date() = default;
    explicit constexpr Date(std::int32_t days) : days_(days) {}

    static Date from_civil(int year, unsigned month, unsigned day);
    static Date parse(std::string_view iso);   // "YYYY-MM-DD"

    void to_civil(int& year, unsigned& month, unsigned& day) const;
    std::string to_string() const;

    constexpr std::int32_t days() const { return days_; }

    constexpr Date operator+(int n) const { return Date(days_ + n); }
    constexpr Date operator-(int n) const { return Date(days_ - n); }
    constexpr int operator-(Date rhs) const { return days_ - rhs.days_; }
    Date& operator++() { ++days_; return *this; }

    auto operator<=>(const Date&) const = default;

private:
    std::int32_t days_ = 0;
};

// UTC instant at minute resolution (outage telemetry is on a 15-minute grid).
class Timestamp {
public:
    Timestamp() = default;
    explicit constexpr Timestamp(std::int64_t minutes) : minutes_(minutes) {}

    // "YYYY-MM-DDTHH:MM:SS" with optional trailing 'Z'; a space separator is
    // accepted in place of 'T'.
    static Timestamp parse(std::string_view iso);

    std::string to_string() const;

    constexpr std::int64_t minutes() const { return minutes_; }
    Date date() const;
    int minute_of_day() const;
    bool on_quarter_hour() const { return minutes_ % 15 == 0; }

    auto operator<=>(const Timestamp&) const = default;

private:
    std::int64_t minutes_ = 0;
};

Timestamp timestamp_at(Date d, int minute_of_day);

} // namespace lagwarp
