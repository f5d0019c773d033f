#include "evfcr/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "evfcr/ingest.hpp"

#include "json.hpp"

namespace evfcr {

bool MobilityProfile::has_trips() const { return pool_size() > 0; }

std::size_t MobilityProfile::pool_size() const {
    std::size_t n = 0;
    for (const auto& day : trip_pool)
        for (const auto& bin : day) n += bin.size();
    return n;
}

void MobilityProfile::validate() const {
    bool any_start = false;
    for (int d = 0; d < 7; ++d)
        for (int s = 0; s < kSlotsPerDay; ++s) {
            const double w = start_prob[d][s];
            if (!(w >= 0.0 && w <= 1.0))
                throw std::invalid_argument("start_prob out of [0,1]");
            any_start = any_start || w > 0.0;
        }
    if (any_start && !has_trips())
        throw std::invalid_argument("profile has start probability mass but an empty trip pool");
    if (!(plug_prob_at_return >= 0.0 && plug_prob_at_return <= 1.0))
        throw std::invalid_argument("plug_prob_at_return out of [0,1]");
    for (const auto& day : trip_pool)
        for (const auto& bin : day)
            for (const auto& t : bin)
                if (t.distance_km <= 0.0 || t.duration_min < kSlotMinutes || t.consumption_rate <= 0.0)
                    throw std::invalid_argument("trip pool entry not positive");
}

namespace {

enum SlotStatus : std::uint8_t { kPlugged = 0, kAway = 1, kUnplugged = 2 };

}  // namespace

MobilityProfile fit_profile(const TripLog& log, const std::string& vehicle_id,
                            const VehicleSpec& spec) {
    auto [lo, hi] = log.vehicle_range(vehicle_id);
    if (hi == lo) throw std::invalid_argument("vehicle not in trip log: " + vehicle_id);

    // Usable trips, in time order, without overlaps.
    std::vector<const TripRecord*> trips;
    Timestamp prev_end = std::numeric_limits<Timestamp>::min();
    for (std::size_t i = lo; i < hi; ++i) {
        const TripRecord& r = log.records[i];
        if (r.end <= r.start || r.start < prev_end) continue;
        trips.push_back(&r);
        prev_end = r.end;
    }
    if (trips.empty()) throw std::invalid_argument("no usable trips for vehicle: " + vehicle_id);

    const std::int64_t first_day = day_index(trips.front()->start);
    std::int64_t last_day = first_day;
    for (const TripRecord* t : trips) last_day = std::max(last_day, day_index(t->end));
    const std::int64_t s0 = first_day * kSlotsPerDay;
    const std::int64_t s1 = (last_day + 1) * kSlotsPerDay;

    // Plug status at the beginning of each slot of the observation span.
    // The vehicle counts as plugged on the slot it departs from; a trip
    // occupies the slots strictly after departure up to (excluding) the
    // arrival slot. After a return without charging it stays unplugged
    // until the next arrival at the company.
    std::vector<std::uint8_t> status(static_cast<std::size_t>(s1 - s0), kPlugged);
    std::vector<std::uint8_t> started(static_cast<std::size_t>(s1 - s0), 0);
    auto paint = [&](std::int64_t from, std::int64_t to, SlotStatus st) {
        from = std::max(from, s0);
        to = std::min(to, s1);
        for (std::int64_t s = from; s < to; ++s)
            status[static_cast<std::size_t>(s - s0)] = static_cast<std::uint8_t>(st);
    };

    bool plugged = true;
    std::int64_t marker = s0;
    for (const TripRecord* t : trips) {
        const std::int64_t ss = slot_index(t->start);
        const std::int64_t es = slot_index(t->end);
        paint(marker, ss + 1, plugged ? kPlugged : kUnplugged);
        if (plugged && ss >= s0 && ss < s1) started[static_cast<std::size_t>(ss - s0)] = 1;
        paint(ss + 1, es, kAway);
        plugged = t->end_at_company;
        marker = std::max(es, ss + 1);
    }
    paint(marker, s1, plugged ? kPlugged : kUnplugged);

    std::array<std::array<int, kSlotsPerDay>, 7> plugged_days{};
    std::array<std::array<int, kSlotsPerDay>, 7> start_days{};
    for (std::int64_t s = s0; s < s1; ++s) {
        const std::int64_t day = s / kSlotsPerDay;
        const int wd = weekday_of_day(day);
        const int sod = static_cast<int>(s % kSlotsPerDay);
        if (status[static_cast<std::size_t>(s - s0)] == kPlugged) {
            ++plugged_days[wd][sod];
            if (started[static_cast<std::size_t>(s - s0)]) ++start_days[wd][sod];
        }
    }

    MobilityProfile profile;
    for (int d = 0; d < 7; ++d)
        for (int s = 0; s < kSlotsPerDay; ++s)
            profile.start_prob[d][s] =
                plugged_days[d][s] > 0
                    ? static_cast<double>(start_days[d][s]) / plugged_days[d][s]
                    : 0.0;

    std::size_t at_company = 0;
    for (const TripRecord* t : trips) {
        if (t->end_at_company) ++at_company;
        if (t->distance_km <= 0.0) continue;  // unplug event without usable journey data
        TripDraw draw;
        draw.distance_km = t->distance_km;
        draw.duration_min = static_cast<int>(std::max<Timestamp>(t->end - t->start, kSlotMinutes));
        draw.consumption_rate = (t->consumption_kwh && *t->consumption_kwh > 0.0)
                                    ? *t->consumption_kwh / t->distance_km * 100.0
                                    : spec.mean_consumption;
        draw.end_at_company = t->end_at_company;
        profile.trip_pool[weekday(t->start)][slot_of_day(t->start) / 4].push_back(draw);
    }
    profile.plug_prob_at_return = static_cast<double>(at_company) / static_cast<double>(trips.size());
    profile.validate();
    return profile;
}

TripDraw sample_trip(const MobilityProfile& profile, int weekday, int slot,
                     const VehicleSpec& spec, RngStream& rng) {
    const int hour = slot / 4;
    const std::vector<TripDraw>* bin = &profile.trip_pool[weekday][hour];
    std::vector<const TripDraw*> merged;
    if (bin->empty()) {
        for (int d = 0; d < 7; ++d)
            for (const TripDraw& t : profile.trip_pool[d][hour]) merged.push_back(&t);
        if (merged.empty())
            for (int d = 0; d < 7; ++d)
                for (int h = 0; h < 24; ++h)
                    for (const TripDraw& t : profile.trip_pool[d][h]) merged.push_back(&t);
        if (merged.empty()) throw std::logic_error("sample_trip: empty trip pool");
    }

    TripDraw draw = bin->empty() ? *merged[rng.uniform_index(merged.size())]
                                 : (*bin)[rng.uniform_index(bin->size())];
    if (spec.consumption_stddev > 0.0)
        draw.consumption_rate = draw_consumption_rate(spec, rng);
    return draw;
}

const char* to_string(SyntheticTemplate t) {
    switch (t) {
        case SyntheticTemplate::two_shift: return "two_shift";
        case SyntheticTemplate::office: return "office";
        case SyntheticTemplate::weekend_idle: return "weekend_idle";
    }
    return "?";
}

std::optional<SyntheticTemplate> parse_synthetic_template(std::string_view s) {
    if (s == "two_shift") return SyntheticTemplate::two_shift;
    if (s == "office") return SyntheticTemplate::office;
    if (s == "weekend_idle") return SyntheticTemplate::weekend_idle;
    return std::nullopt;
}

SyntheticParams default_params(SyntheticTemplate t) {
    SyntheticParams p;
    switch (t) {
        case SyntheticTemplate::two_shift:
            // Health-care-like: same pattern seven days a week, two shifts,
            // a fair share of returns without charging.
            p.shifts = {{26, 0.6, 330, 40.0, 8.0, 60}, {56, 0.4, 420, 40.0, 8.0, 60}};
            p.plug_prob_at_return = 0.7;
            p.consumption_rate = 18.9;
            break;
        case SyntheticTemplate::office:
            p.shifts = {{32, 0.5, 480, 30.0, 6.0, 90}};
            p.active_days = {true, true, true, true, true, false, false};
            p.plug_prob_at_return = 1.0;
            p.consumption_rate = 20.1;
            break;
        case SyntheticTemplate::weekend_idle:
            p.shifts = {{28, 0.8, 540, 80.0, 16.0, 60}};
            p.active_days = {true, true, true, true, true, false, false};
            p.plug_prob_at_return = 0.9;
            p.consumption_rate = 25.2;
            break;
    }
    return p;
}

MobilityProfile synthetic_profile(SyntheticTemplate t) { return synthetic_profile(t, default_params(t)); }

MobilityProfile synthetic_profile(SyntheticTemplate t, const SyntheticParams& params) {
    (void)t;
    if (params.shifts.empty()) throw std::invalid_argument("synthetic profile without shifts");

    // Shift windows must not overlap (modulo the day).
    std::array<bool, kSlotsPerDay> occupied{};
    for (const ShiftSpec& shift : params.shifts) {
        if (shift.start_slot < 0 || shift.start_slot >= kSlotsPerDay)
            throw std::invalid_argument("shift start slot out of range");
        if (!(shift.start_prob >= 0.0 && shift.start_prob <= 1.0))
            throw std::invalid_argument("shift start probability out of [0,1]");
        if (shift.duration_min < kSlotMinutes || shift.distance_km <= 0.0)
            throw std::invalid_argument("shift duration/distance not positive");
        const int dur_slots = (shift.duration_min + kSlotMinutes - 1) / kSlotMinutes;
        for (int k = 0; k < std::min(dur_slots, kSlotsPerDay); ++k) {
            const int s = (shift.start_slot + k) % kSlotsPerDay;
            if (occupied[s]) throw std::invalid_argument("overlapping shift windows");
            occupied[s] = true;
        }
    }

    MobilityProfile profile;
    profile.plug_prob_at_return = params.plug_prob_at_return;
    for (int d = 0; d < 7; ++d) {
        if (!params.active_days[d]) continue;
        for (const ShiftSpec& shift : params.shifts) {
            profile.start_prob[d][shift.start_slot] = shift.start_prob;
            auto& bin = profile.trip_pool[d][shift.start_slot / 4];
            for (int di = -1; di <= 1; ++di)
                for (int ti = -1; ti <= 1; ++ti) {
                    TripDraw draw;
                    draw.distance_km = shift.distance_km + di * shift.distance_spread_km;
                    draw.duration_min = shift.duration_min + ti * shift.duration_spread_min;
                    if (draw.distance_km <= 0.0) continue;
                    draw.duration_min = std::max(draw.duration_min, kSlotMinutes);
                    draw.consumption_rate = params.consumption_rate;
                    draw.end_at_company = true;
                    bin.push_back(draw);
                }
        }
    }
    profile.validate();
    return profile;
}

std::vector<TripRecord> sample_history(const MobilityProfile& profile, const VehicleSpec& spec,
                                       int days, RngStream& rng, const std::string& vehicle_id) {
    if (days < 1) throw std::invalid_argument("sample_history: days must be >= 1");
    // 1970-01-05 was a Monday.
    const std::int64_t first_slot = 4 * kSlotsPerDay;
    const std::int64_t end_slot = first_slot + static_cast<std::int64_t>(days) * kSlotsPerDay;

    std::vector<TripRecord> records;
    bool plugged = true;
    std::int64_t away_until = -1;
    for (std::int64_t s = first_slot; s < end_slot; ++s) {
        const int wd = weekday_of_day(s / kSlotsPerDay);
        const int sod = static_cast<int>(s % kSlotsPerDay);
        if (!plugged) {
            if (s != away_until) continue;
            if (rng.bernoulli(profile.plug_prob_at_return)) {
                records.back().end_at_company = true;
                plugged = true;
            } else {
                // Stays unplugged: the next journey chains on immediately.
                records.back().end_at_company = false;
                const TripDraw draw = sample_trip(profile, wd, sod, spec, rng);
                TripRecord rec;
                rec.vehicle_id = vehicle_id;
                rec.start = slot_start(s);
                rec.end = slot_start(s + draw.duration_slots());
                rec.distance_km = draw.distance_km;
                rec.consumption_kwh = draw.consumption_kwh();
                records.push_back(rec);
                away_until = s + draw.duration_slots();
                continue;
            }
        }
        if (rng.uniform01() < profile.start_prob[wd][sod]) {
            const TripDraw draw = sample_trip(profile, wd, sod, spec, rng);
            TripRecord rec;
            rec.vehicle_id = vehicle_id;
            rec.start = slot_start(s);
            rec.end = slot_start(s + draw.duration_slots());
            rec.distance_km = draw.distance_km;
            rec.consumption_kwh = draw.consumption_kwh();
            records.push_back(rec);
            plugged = false;
            away_until = s + draw.duration_slots();
        }
    }
    return records;
}

namespace {
constexpr const char* kProfileSchema = "evfcr.mobility-profile";
constexpr int kProfileVersion = 1;
}  // namespace

std::string profile_to_json(const MobilityProfile& profile) {
    nlohmann::json j;
    j["schema"] = kProfileSchema;
    j["version"] = kProfileVersion;
    j["slot_minutes"] = kSlotMinutes;
    j["plug_prob_at_return"] = profile.plug_prob_at_return;
    auto& sp = j["start_prob"] = nlohmann::json::array();
    for (int d = 0; d < 7; ++d) sp.push_back(profile.start_prob[d]);
    auto& pool = j["trip_pool"] = nlohmann::json::array();
    for (int d = 0; d < 7; ++d) {
        nlohmann::json day = nlohmann::json::array();
        for (int h = 0; h < 24; ++h) {
            nlohmann::json bin = nlohmann::json::array();
            for (const TripDraw& t : profile.trip_pool[d][h])
                bin.push_back({{"distance_km", t.distance_km},
                               {"duration_min", t.duration_min},
                               {"consumption_rate", t.consumption_rate},
                               {"end_at_company", t.end_at_company}});
            day.push_back(std::move(bin));
        }
        pool.push_back(std::move(day));
    }
    return j.dump(2);
}

MobilityProfile profile_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    if (j.value("schema", "") != kProfileSchema)
        throw std::runtime_error("not a mobility profile document");
    if (j.value("version", 0) != kProfileVersion)
        throw std::runtime_error("unsupported mobility profile version");
    if (j.value("slot_minutes", 0) != kSlotMinutes)
        throw std::runtime_error("unsupported slot length");
    MobilityProfile profile;
    profile.plug_prob_at_return = j.at("plug_prob_at_return").get<double>();
    const auto& sp = j.at("start_prob");
    for (int d = 0; d < 7; ++d)
        for (int s = 0; s < kSlotsPerDay; ++s)
            profile.start_prob[d][s] = sp.at(d).at(s).get<double>();
    const auto& pool = j.at("trip_pool");
    for (int d = 0; d < 7; ++d)
        for (int h = 0; h < 24; ++h)
            for (const auto& e : pool.at(d).at(h)) {
                TripDraw t;
                t.distance_km = e.at("distance_km").get<double>();
                t.duration_min = e.at("duration_min").get<int>();
                t.consumption_rate = e.at("consumption_rate").get<double>();
                t.end_at_company = e.at("end_at_company").get<bool>();
                profile.trip_pool[d][h].push_back(t);
            }
    profile.validate();
    return profile;
}

void save_profile(const MobilityProfile& profile, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write profile: " + path);
    out << profile_to_json(profile) << '\n';
}

MobilityProfile load_profile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read profile: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return profile_from_json(ss.str());
}

}  // namespace evfcr
