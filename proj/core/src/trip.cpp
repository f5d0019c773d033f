#include "evfcr/trip.hpp"

#include <algorithm>

namespace evfcr {

std::vector<std::string> TripLog::vehicle_ids() const {
    std::vector<std::string> ids;
    for (const auto& r : records)
        if (ids.empty() || ids.back() != r.vehicle_id) ids.push_back(r.vehicle_id);
    return ids;
}

std::pair<std::size_t, std::size_t> TripLog::vehicle_range(const std::string& vehicle_id) const {
    auto lo = std::lower_bound(records.begin(), records.end(), vehicle_id,
                               [](const TripRecord& r, const std::string& id) { return r.vehicle_id < id; });
    auto hi = std::upper_bound(records.begin(), records.end(), vehicle_id,
                               [](const std::string& id, const TripRecord& r) { return id < r.vehicle_id; });
    return {static_cast<std::size_t>(lo - records.begin()),
            static_cast<std::size_t>(hi - records.begin())};
}

bool TripLog::has_vehicle(const std::string& vehicle_id) const {
    auto [lo, hi] = vehicle_range(vehicle_id);
    return hi > lo;
}

void TripLog::sort() {
    std::stable_sort(records.begin(), records.end(), [](const TripRecord& a, const TripRecord& b) {
        if (a.vehicle_id != b.vehicle_id) return a.vehicle_id < b.vehicle_id;
        return a.start < b.start;
    });
}

const char* to_string(VehicleClass c) {
    switch (c) {
        case VehicleClass::small: return "small";
        case VehicleClass::medium: return "medium";
        case VehicleClass::large: return "large";
        case VehicleClass::transporter: return "transporter";
    }
    return "?";
}

std::optional<VehicleClass> parse_vehicle_class(std::string_view s) {
    if (s == "small") return VehicleClass::small;
    if (s == "medium") return VehicleClass::medium;
    if (s == "large") return VehicleClass::large;
    if (s == "transporter") return VehicleClass::transporter;
    return std::nullopt;
}

std::map<std::string, int> ClusterTable::sector_counts() const {
    std::map<std::string, int> counts;
    for (const auto& [id, entry] : entries) ++counts[entry.sector];
    return counts;
}

}  // namespace evfcr
