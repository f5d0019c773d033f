#pragma once

#include <array>
#include <string>
#include <vector>

#include "evfcr/rng.hpp"
#include "evfcr/trip.hpp"

namespace evfcr {

// One resampled historical trip. Joint resampling keeps the empirical
// correlation between distance, duration and consumption.
struct TripDraw {
    double distance_km = 0.0;
    int duration_min = kSlotMinutes;
    double consumption_rate = 0.0;  // kWh/100 km
    bool end_at_company = true;

    int duration_slots() const {
        return duration_min <= kSlotMinutes ? 1 : (duration_min + kSlotMinutes - 1) / kSlotMinutes;
    }
    double consumption_kwh() const { return distance_km * consumption_rate / 100.0; }
};

// Day/time conditioned driving behavior of one vehicle: trip-start
// probability per weekday and 15-min slot, plus empirical trip pools
// keyed by departure weekday and hour.
struct MobilityProfile {
    std::array<std::array<double, kSlotsPerDay>, 7> start_prob{};
    std::array<std::array<std::vector<TripDraw>, 24>, 7> trip_pool;
    double plug_prob_at_return = 1.0;

    bool has_trips() const;
    std::size_t pool_size() const;
    void validate() const;  // throws std::invalid_argument
};

// Estimates the profile from one vehicle's records: plugged-day counting
// per weekday/slot for the start probability, indicator semantics for
// multiple same-slot trips, and per-trip pool entries. Throws if the
// vehicle has no records.
MobilityProfile fit_profile(const TripLog& log, const std::string& vehicle_id,
                            const VehicleSpec& spec);

// Uniform draw from the (weekday, hour) pool with sparse-bin fallback:
// (weekday, hour) -> (all days, hour) -> whole pool. Consumption is redrawn
// around the vehicle mean when the spec carries a consumption spread.
TripDraw sample_trip(const MobilityProfile& profile, int weekday, int slot,
                     const VehicleSpec& spec, RngStream& rng);

enum class SyntheticTemplate { two_shift, office, weekend_idle };

const char* to_string(SyntheticTemplate t);
std::optional<SyntheticTemplate> parse_synthetic_template(std::string_view s);

struct ShiftSpec {
    int start_slot = 26;          // 06:30
    double start_prob = 0.6;
    int duration_min = 330;
    double distance_km = 40.0;
    double distance_spread_km = 8.0;  // pool holds mean and mean +/- spread
    int duration_spread_min = 60;
};

struct SyntheticParams {
    std::vector<ShiftSpec> shifts;
    std::array<bool, 7> active_days{true, true, true, true, true, true, true};
    double plug_prob_at_return = 1.0;
    double consumption_rate = 18.9;  // kWh/100 km
};

SyntheticParams default_params(SyntheticTemplate t);

// Deterministic profile with the requested shift structure. Throws on
// overlapping shift windows.
MobilityProfile synthetic_profile(SyntheticTemplate t, const SyntheticParams& params);
MobilityProfile synthetic_profile(SyntheticTemplate t);

// Replays plug/trip decisions over `days` whole days (starting on a
// Monday) and returns the resulting journeys. Used to build partitions for
// synthetic fleets and to close the loop between sampling and fitting.
std::vector<TripRecord> sample_history(const MobilityProfile& profile, const VehicleSpec& spec,
                                       int days, RngStream& rng,
                                       const std::string& vehicle_id = "sampled");

// Versioned JSON schema, so fits can be cached and shipped without logs.
std::string profile_to_json(const MobilityProfile& profile);
MobilityProfile profile_from_json(const std::string& text);
void save_profile(const MobilityProfile& profile, const std::string& path);
MobilityProfile load_profile(const std::string& path);

}  // namespace evfcr
