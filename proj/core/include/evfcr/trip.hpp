#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "evfcr/timeutil.hpp"

namespace evfcr {

// One journey between unplug and return. end_at_company marks whether the
// vehicle returned to a company charging point (and could plug in).
struct TripRecord {
    std::string vehicle_id;
    Timestamp start = 0;
    Timestamp end = 0;
    double distance_km = 0.0;
    std::optional<double> consumption_kwh;
    bool end_at_company = true;

    double consumption_or(double rate_kwh_per_100km) const {
        return consumption_kwh ? *consumption_kwh : distance_km * rate_kwh_per_100km / 100.0;
    }
};

// Trip records sorted by (vehicle_id, start).
struct TripLog {
    std::vector<TripRecord> records;

    std::vector<std::string> vehicle_ids() const;
    // Contiguous range [first, last) of one vehicle's records.
    std::pair<std::size_t, std::size_t> vehicle_range(const std::string& vehicle_id) const;
    bool has_vehicle(const std::string& vehicle_id) const;
    void sort();
};

enum class VehicleClass { small, medium, large, transporter };

const char* to_string(VehicleClass c);
std::optional<VehicleClass> parse_vehicle_class(std::string_view s);

// Electric vehicle master data. For combustion vehicles from logbook data
// the battery and consumption figures are the class-level assumptions.
struct VehicleSpec {
    double battery_kwh = 0.0;        // E_Bat
    double max_charge_kw = 0.0;      // P_car, AC side
    double mean_consumption = 0.0;   // kWh/100 km
    double consumption_stddev = 1.0; // kWh/100 km; 0 disables per-trip redraws
    VehicleClass vehicle_class = VehicleClass::small;
    std::string sector;
};

struct ClusterEntry {
    std::string sector;
    VehicleClass vehicle_class = VehicleClass::medium;
};

// Economic-sector (NACE) assignment per vehicle.
struct ClusterTable {
    std::map<std::string, ClusterEntry> entries;

    const ClusterEntry* find(const std::string& vehicle_id) const {
        auto it = entries.find(vehicle_id);
        return it == entries.end() ? nullptr : &it->second;
    }
    // sector -> vehicle count
    std::map<std::string, int> sector_counts() const;
};

}  // namespace evfcr
