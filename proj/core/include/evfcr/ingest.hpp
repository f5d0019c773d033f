#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "evfcr/rng.hpp"
#include "evfcr/trip.hpp"

namespace evfcr {

// Column names in the source CSV. The two source schemas differ, so the
// mapping is configuration, not inference. Exactly one of end_at_company /
// distance_to_company_km should be set; if neither is, the flag is derived
// from charge events (see apply_charge_events).
struct ColumnMap {
    std::string vehicle_id = "vehicle_id";
    std::string start = "start";
    std::string end = "end";
    std::string distance_km = "distance_km";
    std::string consumption_kwh;          // optional
    std::string end_at_company;           // optional bool column (0/1/true/false)
    std::string distance_to_company_km;   // optional; <= 0.1 km counts as at company
};

struct ParseIssue {
    std::size_t line = 0;
    std::string message;
};

struct ParseReport {
    std::size_t rows_total = 0;
    std::size_t rows_kept = 0;
    std::size_t rows_rejected = 0;
    std::vector<ParseIssue> issues;
};

// Reads a trip CSV. Malformed rows are rejected and reported with line
// numbers; the parse itself only fails for unreadable files or a missing
// mandatory column. Output is sorted by (vehicle_id, start).
TripLog parse_trip_log(const std::string& path, const ColumnMap& columns,
                       ParseReport* report = nullptr);

// Canonical single-schema form used for cleaned artifacts; writing then
// parsing is lossless.
void write_trip_log(const TripLog& log, const std::string& path);
TripLog parse_canonical_trip_log(const std::string& path, ParseReport* report = nullptr);

// Keeps vehicles with at least one trip and an observed span of >= 7 days.
TripLog filter_vehicles(const TripLog& log);

struct ChargeEvent {
    std::string vehicle_id;
    Timestamp start = 0;
};

std::vector<ChargeEvent> load_charge_events(const std::string& path);

// Measurements-style data has no GPS distance to the company; a trip ends
// "at company" iff a charge event starts within max_gap of the trip end.
void apply_charge_events(TripLog& log, std::vector<ChargeEvent> events,
                         Timestamp max_gap_minutes = 15);

// CSV columns: vehicle_id,sector[,vehicle_class]
ClusterTable load_cluster_table(const std::string& path);

// Class-level battery energy and real consumption assumed for electrified
// logbook vehicles.
VehicleSpec electrify_vehicle(VehicleClass vehicle_class);

// Per-trip consumption rate in kWh/100 km: normal around the class mean,
// truncated below at 5 kWh/100 km.
double draw_consumption_rate(const VehicleSpec& spec, RngStream& rng);

constexpr double kConsumptionFloorKwhPer100km = 5.0;

}  // namespace evfcr
