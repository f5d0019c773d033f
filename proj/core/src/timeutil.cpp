#include "evfcr/timeutil.hpp"

#include <array>
#include <charconv>
#include <cstdio>

namespace evfcr {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if (a % b != 0 && ((a < 0) != (b < 0))) --q;
    return q;
}

bool parse_int(std::string_view s, int& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

std::optional<Timestamp> parse_timestamp(std::string_view text) {
    // YYYY-MM-DDTHH:MM[:SS]
    if (text.size() < 16) return std::nullopt;
    if (text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') || text[13] != ':')
        return std::nullopt;
    int y, mo, d, h, mi;
    if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), mo) ||
        !parse_int(text.substr(8, 2), d) || !parse_int(text.substr(11, 2), h) ||
        !parse_int(text.substr(14, 2), mi))
        return std::nullopt;
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59) return std::nullopt;
    if (text.size() > 16 && text[16] != ':') return std::nullopt;
    return days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d)) * kMinutesPerDay +
           h * 60 + mi;
}

std::string format_timestamp(Timestamp t) {
    std::int64_t day = day_index(t);
    std::int64_t rem = t - day * kMinutesPerDay;
    int y;
    unsigned mo, d;
    civil_from_days(day, y, mo, d);
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d", y, mo, d,
                  static_cast<int>(rem / 60), static_cast<int>(rem % 60));
    return buf;
}

// Howard Hinnant's civil date algorithms.
std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& year, unsigned& month, unsigned& day) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    day = doy - (153 * mp + 2) / 5 + 1;
    month = mp + (mp < 10 ? 3 : -9);
    year = static_cast<int>(y + (month <= 2));
}

std::int64_t day_index(Timestamp t) { return floor_div(t, kMinutesPerDay); }

int weekday(Timestamp t) { return weekday_of_day(day_index(t)); }

int slot_of_day(Timestamp t) {
    return static_cast<int>((t - day_index(t) * kMinutesPerDay) / kSlotMinutes);
}

std::int64_t slot_index(Timestamp t) { return floor_div(t, kSlotMinutes); }

Timestamp slot_start(std::int64_t slot) { return slot * kSlotMinutes; }

Timestamp start_of_month(Timestamp t) {
    int y;
    unsigned mo, d;
    civil_from_days(day_index(t), y, mo, d);
    return days_from_civil(y, mo, 1) * kMinutesPerDay;
}

Timestamp next_month_start(Timestamp t) {
    int y;
    unsigned mo, d;
    civil_from_days(day_index(t), y, mo, d);
    if (mo == 12) {
        ++y;
        mo = 1;
    } else {
        ++mo;
    }
    return days_from_civil(y, mo, 1) * kMinutesPerDay;
}

const char* to_string(ServicePeriod p) {
    switch (p) {
        case ServicePeriod::month: return "month";
        case ServicePeriod::week: return "week";
        case ServicePeriod::day: return "day";
        case ServicePeriod::h4: return "4h";
        case ServicePeriod::h1: return "1h";
        case ServicePeriod::min15: return "15min";
    }
    return "?";
}

std::optional<ServicePeriod> parse_service_period(std::string_view s) {
    if (s == "month" || s == "1month") return ServicePeriod::month;
    if (s == "week" || s == "1week") return ServicePeriod::week;
    if (s == "day" || s == "1day" || s == "24h") return ServicePeriod::day;
    if (s == "4h") return ServicePeriod::h4;
    if (s == "1h") return ServicePeriod::h1;
    if (s == "15min") return ServicePeriod::min15;
    return std::nullopt;
}

namespace {

// Fixed window length in minutes; 0 for calendar months.
Timestamp period_minutes(ServicePeriod p) {
    switch (p) {
        case ServicePeriod::month: return 0;
        case ServicePeriod::week: return kMinutesPerWeek;
        case ServicePeriod::day: return kMinutesPerDay;
        case ServicePeriod::h4: return 4 * 60;
        case ServicePeriod::h1: return 60;
        case ServicePeriod::min15: return kSlotMinutes;
    }
    return 0;
}

bool aligned(Timestamp t, ServicePeriod p) {
    if (p == ServicePeriod::week)
        return t % kMinutesPerDay == 0 && weekday(t) == 0;
    return t % period_minutes(p) == 0;
}

}  // namespace

Timestamp window_start_at(Timestamp t, ServicePeriod p) {
    if (p == ServicePeriod::month) return start_of_month(t);
    if (p == ServicePeriod::week) {
        std::int64_t day = day_index(t);
        return (day - weekday_of_day(day)) * kMinutesPerDay;
    }
    const Timestamp len = period_minutes(p);
    return floor_div(t, len) * len;
}

Timestamp next_window_start(Timestamp window_start, ServicePeriod p) {
    if (p == ServicePeriod::month) return next_month_start(window_start);
    return window_start + period_minutes(p);
}

std::vector<Window> period_windows(Timestamp start, Timestamp end, ServicePeriod p) {
    if (end <= start) throw std::invalid_argument("period_windows: empty horizon");
    std::vector<Window> out;
    if (p == ServicePeriod::month) {
        Timestamp w = start_of_month(start);
        if (w < start) w = next_month_start(w);
        while (true) {
            Timestamp nxt = next_month_start(w);
            if (nxt > end) break;
            out.push_back({w, nxt});
            w = nxt;
        }
        return out;  // partial months dropped, possibly empty
    }
    if (!aligned(start, p) || !aligned(end, p))
        throw std::invalid_argument(std::string("horizon not aligned to service period ") +
                                    to_string(p) + ": " + format_timestamp(start) + " .. " +
                                    format_timestamp(end));
    const Timestamp len = period_minutes(p);
    out.reserve(static_cast<std::size_t>((end - start) / len));
    for (Timestamp w = start; w < end; w += len) out.push_back({w, w + len});
    return out;
}

}  // namespace evfcr
