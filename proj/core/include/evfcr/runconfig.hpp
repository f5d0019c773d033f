#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "evfcr/battery.hpp"
#include "evfcr/ingest.hpp"
#include "evfcr/market.hpp"
#include "evfcr/profiles.hpp"
#include "evfcr/sim.hpp"

namespace evfcr {

struct SyntheticGroup {
    std::string name;
    SyntheticTemplate template_id = SyntheticTemplate::two_shift;
    SyntheticParams params;
    int count = 1;
    VehicleClass vehicle_class = VehicleClass::small;
    double station_kw = 11.0;
    double consumption_stddev = 1.0;
};

struct LogFleetConfig {
    std::string trips_path;
    ColumnMap columns;
    std::string charge_events_path;  // optional
    std::string clusters_path;       // optional; vehicles default to sector "unknown"
    std::vector<std::string> sector_filter;
    double station_kw = 11.0;
    double consumption_stddev = 1.0;
};

struct MarketConfig {
    MarketDesign design;
    std::string prices_path;  // empty: constant fixture price
    double fixture_eur_per_mw = 0.0;
};

// Single JSON run configuration driving the whole pipeline. All defaults
// are embedded and overridable; the canonical dump is hashed into the run
// manifest.
struct RunConfig {
    std::uint64_t seed = kDefaultSeed;
    int workers = 1;
    Timestamp start = 0;
    Timestamp end = 0;
    std::string output_dir = "out";
    bool write_traces = true;
    bool plots = false;

    std::vector<SyntheticGroup> synthetic;
    std::optional<LogFleetConfig> logs;

    PartitionOptions partition;
    double efficiency = 0.93;
    double cv_threshold = 0.90;
    std::string curve_table_path;  // optional custom charging curve
    int lookahead_slots = 4;
    int warmup_days = 7;
    int history_days = 56;  // sampled history length for synthetic partitions

    std::vector<MarketConfig> markets;
    std::optional<double> opex_per_ev_year;

    std::string canonical_json;  // normalized dump of the parsed document

    static RunConfig from_json(const std::string& text);
    static RunConfig load(const std::string& path);

    // Existence of referenced files, horizon and fleet sanity.
    void validate() const;  // throws std::invalid_argument / std::runtime_error

    SimConfig sim_config() const;
    std::size_t fleet_size_hint() const;
};

std::uint64_t config_hash(const RunConfig& config);

// A complete two-shift demo document (synthetic fleet, fixture prices).
std::string demo_config_json();

}  // namespace evfcr
