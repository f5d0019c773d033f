#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "evfcr/pool.hpp"
#include "evfcr/runconfig.hpp"

namespace evfcr {

// Pipeline stages in execution order; each stage includes everything
// before it.
enum class Stage { ingest = 0, fit = 1, simulate = 2, capability = 3, revenue = 4, compare = 5 };

struct BuiltFleet {
    std::vector<FleetVehicle> vehicles;
    std::vector<std::string> labels;  // synthetic group name or vehicle id
    ClusterTable clusters;            // log fleets only
    TripLog clean_log;                // log fleets only
    ParseReport parse_report;
};

BuiltFleet build_fleet(const RunConfig& config);

struct PipelineResult {
    std::string output_dir;
    std::vector<std::string> artifacts;  // relative paths, manifest last
};

// Runs ingest -> fit -> simulate -> capability -> revenue -> compare up to
// the requested stage, writes the stage artifacts plus a manifest with the
// seed, config hash and artifact checksums. Identical configs produce
// byte-identical artifacts for any worker count.
PipelineResult run_pipeline(const RunConfig& config, Stage up_to, std::ostream& log);

std::string file_checksum_hex(const std::string& path);

}  // namespace evfcr
