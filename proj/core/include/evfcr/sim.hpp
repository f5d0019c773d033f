#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evfcr/battery.hpp"
#include "evfcr/profiles.hpp"
#include "evfcr/timeutil.hpp"
#include "evfcr/trip.hpp"

namespace evfcr {

constexpr std::uint64_t kDefaultSeed = 20200701;

struct SimConfig {
    Timestamp start = 0;  // must be a Monday 00:00
    Timestamp end = 0;    // exclusive, multiple of 15 min
    std::uint64_t seed = kDefaultSeed;
    int workers = 1;
    int lookahead_slots = 4;  // charging trigger looks this far ahead
    int warmup_days = 7;      // simulated before `start`, not recorded
    bool record_trips = true;

    std::int64_t n_slots() const { return (end - start) / kSlotMinutes; }
    void validate() const;  // throws std::invalid_argument
};

struct TraceTrip {
    Timestamp start = 0;
    Timestamp end = 0;
    double distance_km = 0.0;
    double consumption_kwh = 0.0;
    bool end_at_company = true;
};

// Per-slot state and market capability of one EV over the horizon.
struct EVTrace {
    Timestamp start = 0;
    std::vector<double> soe_kwh;        // at slot begin
    std::vector<std::uint8_t> plugged;
    std::vector<std::uint8_t> available;
    std::vector<double> p_charge_kw;
    std::vector<double> p_discharge_kw;
    std::vector<TraceTrip> trips;
    double rated_kw = 0.0;  // min(P_car, P_station)

    std::size_t n_slots() const { return soe_kwh.size(); }
};

struct FleetVehicle {
    VehicleSpec spec;
    MobilityProfile profile;
    BatteryPartition partition;
    ChargingCurve curve;
    double station_kw = 11.0;
};

EVTrace simulate_ev(const FleetVehicle& ev, const SimConfig& config, std::uint64_t vehicle_index);

// Runs the per-EV simulation across config.workers threads. Results are
// identical for any worker count: each EV owns an independent RNG stream
// derived from (seed, index) and traces are stored in fleet order.
std::vector<EVTrace> simulate_fleet(const std::vector<FleetVehicle>& fleet, const SimConfig& config);

void write_traces_csv(const std::vector<EVTrace>& traces, const std::string& path);

// Compact binary cache, keyed by a caller-supplied config hash.
void save_traces_bin(const std::vector<EVTrace>& traces, std::uint64_t config_hash,
                     const std::string& path);
bool load_traces_bin(const std::string& path, std::uint64_t expected_hash,
                     std::vector<EVTrace>& out);

}  // namespace evfcr
