#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace evfcr {

// Minutes since 1970-01-01T00:00. All timestamps are naive wall-clock
// times; the simulator has no timezone or DST notion.
using Timestamp = std::int64_t;

constexpr int kSlotMinutes = 15;
constexpr int kSlotsPerDay = 96;
constexpr int kSlotsPerWeek = 7 * kSlotsPerDay;
constexpr Timestamp kMinutesPerDay = 24 * 60;
constexpr Timestamp kMinutesPerWeek = 7 * kMinutesPerDay;

// "YYYY-MM-DDTHH:MM" (optionally with ":SS", seconds are truncated;
// a space instead of 'T' is accepted).
std::optional<Timestamp> parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp t);

// Days since 1970-01-01 for a civil date (proleptic Gregorian).
std::int64_t days_from_civil(int year, unsigned month, unsigned day);
void civil_from_days(std::int64_t days, int& year, unsigned& month, unsigned& day);

std::int64_t day_index(Timestamp t);
int weekday(Timestamp t);      // Monday = 0 .. Sunday = 6
int slot_of_day(Timestamp t);  // 0..95
std::int64_t slot_index(Timestamp t);
Timestamp slot_start(std::int64_t slot);

inline int weekday_of_day(std::int64_t day) {
    // 1970-01-01 was a Thursday.
    return static_cast<int>(((day % 7) + 7 + 3) % 7);
}

Timestamp start_of_month(Timestamp t);
Timestamp next_month_start(Timestamp t);

// FCR service periods. "month" means calendar months; the others are
// fixed-length windows anchored at Monday 00:00 / midnight / 00-04-08h etc.
enum class ServicePeriod { month, week, day, h4, h1, min15 };

const char* to_string(ServicePeriod p);
std::optional<ServicePeriod> parse_service_period(std::string_view s);

struct Window {
    Timestamp start = 0;
    Timestamp end = 0;  // exclusive
};

// Tiles [start, end) with service-period windows. Fixed-length periods
// require the horizon to be aligned and an exact multiple (throws
// std::invalid_argument otherwise). Calendar months that are only
// partially covered are dropped.
std::vector<Window> period_windows(Timestamp start, Timestamp end, ServicePeriod p);

// Start of the window of period p containing t (months: calendar).
Timestamp window_start_at(Timestamp t, ServicePeriod p);
Timestamp next_window_start(Timestamp window_start, ServicePeriod p);

}  // namespace evfcr
