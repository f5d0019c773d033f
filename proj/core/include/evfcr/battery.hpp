#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "evfcr/timeutil.hpp"
#include "evfcr/trip.hpp"

namespace evfcr {

// AC charging curve: constant power up to cv_threshold of the battery
// energy, then a decaying constant-voltage tail that reaches zero at a
// full battery. A custom piecewise-linear table (SOE fraction -> AC kW)
// can replace the default shape.
struct ChargingCurve {
    double cp_power_ac_kw = 11.0;  // grid-side power of the CP phase (vehicle AC limit)
    double efficiency = 0.93;      // AC -> DC
    double cv_threshold = 0.90;    // SOE fraction where the CV phase begins
    std::vector<std::pair<double, double>> ac_points;  // optional (soe_frac, ac_kw) table

    // DC power flowing into the battery at a given SOE fraction.
    double dc_power_at(double soe_frac) const;

    // Copy with the CP power (or the whole table) capped by a charging
    // station limit.
    ChargingCurve capped(double p_station_kw) const;

    static ChargingCurve for_vehicle(const VehicleSpec& spec);
    static ChargingCurve from_json(const std::string& text);  // {"efficiency":..,"points":[[frac,kw],..]}
    static ChargingCurve load(const std::string& path);

    void validate() const;
};

struct PartitionOptions {
    double quantile = 0.95;        // trip-energy quantile per weekday/slot
    int lookahead_minutes = 60;    // departure window ahead of each slot
    double buffer_fraction = 0.30; // spontaneous mobility buffer
    double margin_fraction = 0.10; // headroom above the mobility maximum
};

// Virtual division of the battery: a spontaneous buffer plus a scheduled
// trip-energy term form the mobility energy; everything above it is
// marketable. soe_max is the individual charging limit that keeps the EV
// out of the constant-voltage phase.
struct BatteryPartition {
    double e_bat_kwh = 0.0;
    double spontaneous_buffer_kwh = 0.0;
    std::array<std::array<double, kSlotsPerDay>, 7> trip_energy_kwh{};
    double soe_max_kwh = 0.0;
    double cv_limit_kwh = 0.0;  // cv_threshold * e_bat
    bool history_infeasible = false;
};

// max(buffer, buffer + scheduled trip energy), clipped to soe_max.
double mobility_energy(const BatteryPartition& partition, int weekday, int slot);

// Builds the partition from one vehicle's (real or sampled) journey
// history: per-day summed consumption of plugged departures (whole
// excursions, chained journeys included) within the lookahead window,
// quantiled per weekday/slot; soe_max high enough that a replay of the
// history never runs the battery empty.
BatteryPartition build_partition(const std::vector<TripRecord>& history, const VehicleSpec& spec,
                                 const ChargingCurve& curve, const PartitionOptions& opts = {});
BatteryPartition build_partition(const TripLog& log, const std::string& vehicle_id,
                                 const VehicleSpec& spec, const ChargingCurve& curve,
                                 const PartitionOptions& opts = {});

struct EVState {
    double soe_kwh = 0.0;
    bool plugged = true;
    std::optional<Timestamp> away_until;
};

struct MarketableEnergy {
    double e_charge_kwh = 0.0;           // E_Bat - SOE
    double e_charge_to_limit_kwh = 0.0;  // max(0, soe_max - SOE); scheduled-charging headroom
    double e_discharge_kwh = 0.0;        // SOE - E_mobility
    double e_market_kwh = 0.0;           // E_Bat - E_mobility
    bool available = false;
};

// Energy bands for market participation. The EV is unavailable when it is
// unplugged, when the SOE does not exceed the mobility energy, or when it
// sits in the constant-voltage band above cv_limit.
MarketableEnergy marketable_energy(const EVState& state, const BatteryPartition& partition,
                                   int weekday, int slot);

struct AvailablePower {
    double p_charge_kw = 0.0;
    double p_discharge_kw = 0.0;
};

// min(E / dt_supply, P_car, P_station) per direction; zero when the EV is
// unavailable.
AvailablePower available_power(const MarketableEnergy& energies, const ChargingCurve& curve,
                               double p_station_kw, double dt_supply_hours = 0.25);

struct ChargeResult {
    double soe_kwh = 0.0;
    double ac_energy_kwh = 0.0;  // grid-side energy drawn
};

// Advances one charging interval along the curve. Exact piecewise
// integration: constant-power segments advance linearly, decaying segments
// exponentially. Never exceeds target_soe.
ChargeResult charge_step(const EVState& state, const VehicleSpec& spec, const ChargingCurve& curve,
                         double target_soe_kwh, int dt_minutes = kSlotMinutes);

}  // namespace evfcr
