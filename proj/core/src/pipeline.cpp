#include "evfcr/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "evfcr/csv.hpp"
#include "evfcr/svg.hpp"

#include "json.hpp"

namespace fs = std::filesystem;

namespace evfcr {

namespace {

ChargingCurve make_curve(const RunConfig& cfg, const VehicleSpec& spec) {
    if (!cfg.curve_table_path.empty()) return ChargingCurve::load(cfg.curve_table_path);
    ChargingCurve c = ChargingCurve::for_vehicle(spec);
    c.efficiency = cfg.efficiency;
    c.cv_threshold = cfg.cv_threshold;
    return c;
}

PriceSeries market_prices(const RunConfig& cfg, const MarketConfig& mc) {
    if (!mc.prices_path.empty()) return load_prices(mc.prices_path, mc.design.service_period);
    return constant_prices(mc.design.service_period, cfg.start, cfg.end, mc.fixture_eur_per_mw);
}

// Every service-period window of the horizon needs a price quote.
void check_price_coverage(const PriceSeries& prices, const RunConfig& cfg,
                          const MarketDesign& design) {
    const auto windows = period_windows(cfg.start, cfg.end, design.service_period);
    std::size_t pi = 0;
    for (const Window& w : windows) {
        while (pi < prices.windows.size() && prices.windows[pi].start < w.start) ++pi;
        if (pi >= prices.windows.size() || prices.windows[pi].start != w.start)
            throw std::runtime_error("market '" + design.name + "': no " +
                                     std::string(to_string(design.service_period)) +
                                     " price for window starting " + format_timestamp(w.start));
    }
}

std::string sanitize(const std::string& name) {
    std::string out;
    for (char c : name)
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
    return out;
}

}  // namespace

BuiltFleet build_fleet(const RunConfig& config) {
    BuiltFleet fleet;
    std::uint64_t index = 0;

    for (const SyntheticGroup& group : config.synthetic) {
        const MobilityProfile profile = synthetic_profile(group.template_id, group.params);
        for (int i = 0; i < group.count; ++i, ++index) {
            FleetVehicle ev;
            ev.spec = electrify_vehicle(group.vehicle_class);
            ev.spec.consumption_stddev = group.consumption_stddev;
            ev.spec.sector = group.name;
            ev.profile = profile;
            ev.curve = make_curve(config, ev.spec);
            ev.station_kw = group.station_kw;
            RngStream history_rng = RngStream::derive(config.seed, index, 1);
            const auto history =
                sample_history(profile, ev.spec, config.history_days, history_rng);
            ev.partition =
                build_partition(history, ev.spec, ev.curve.capped(ev.station_kw), config.partition);
            fleet.vehicles.push_back(std::move(ev));
            fleet.labels.push_back(group.name);
        }
    }

    if (config.logs) {
        const LogFleetConfig& logs = *config.logs;
        TripLog raw = parse_trip_log(logs.trips_path, logs.columns, &fleet.parse_report);
        if (!logs.charge_events_path.empty())
            apply_charge_events(raw, load_charge_events(logs.charge_events_path));
        fleet.clean_log = filter_vehicles(raw);
        if (!logs.clusters_path.empty()) fleet.clusters = load_cluster_table(logs.clusters_path);

        for (const std::string& id : fleet.clean_log.vehicle_ids()) {
            ClusterEntry entry{"unknown", VehicleClass::medium};
            if (const ClusterEntry* found = fleet.clusters.find(id)) {
                entry = *found;
            } else if (!logs.clusters_path.empty()) {
                throw std::runtime_error("vehicle '" + id + "' missing from cluster table");
            }
            if (!logs.sector_filter.empty() &&
                std::find(logs.sector_filter.begin(), logs.sector_filter.end(), entry.sector) ==
                    logs.sector_filter.end())
                continue;
            FleetVehicle ev;
            ev.spec = electrify_vehicle(entry.vehicle_class);
            ev.spec.consumption_stddev = logs.consumption_stddev;
            ev.spec.sector = entry.sector;
            ev.profile = fit_profile(fleet.clean_log, id, ev.spec);
            ev.curve = make_curve(config, ev.spec);
            ev.station_kw = logs.station_kw;
            ev.partition = build_partition(fleet.clean_log, id, ev.spec,
                                           ev.curve.capped(ev.station_kw), config.partition);
            fleet.vehicles.push_back(std::move(ev));
            fleet.labels.push_back(id);
            ++index;
        }
    }

    if (fleet.vehicles.empty()) throw std::runtime_error("fleet is empty after filtering");
    return fleet;
}

std::string file_checksum_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot checksum: " + path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[1 << 15];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize n = in.gcount();
        for (std::streamsize i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
        if (!in) break;
    }
    std::ostringstream hex;
    hex << std::hex << std::setw(16) << std::setfill('0') << h;
    return hex.str();
}

PipelineResult run_pipeline(const RunConfig& config, Stage up_to, std::ostream& log) {
    config.validate();

    PipelineResult result;
    result.output_dir = config.output_dir;
    fs::create_directories(config.output_dir);
    const auto artifact_path = [&](const std::string& rel) {
        return (fs::path(config.output_dir) / rel).string();
    };
    const auto add_artifact = [&](const std::string& rel) { result.artifacts.push_back(rel); };

    // Market inputs are validated before any simulation work.
    std::vector<PricedDesign> priced;
    for (const MarketConfig& mc : config.markets) {
        PricedDesign pd{mc.design, market_prices(config, mc)};
        check_price_coverage(pd.prices, config, mc.design);
        priced.push_back(std::move(pd));
    }

    // --- ingest ---
    BuiltFleet fleet = build_fleet(config);
    if (config.logs) {
        write_trip_log(fleet.clean_log, artifact_path("trips_clean.csv"));
        add_artifact("trips_clean.csv");
        log << "ingest: " << fleet.parse_report.rows_kept << " rows kept, "
            << fleet.parse_report.rows_rejected << " rejected\n";
        std::ofstream counts(artifact_path("cluster_counts.csv"));
        counts << "sector,vehicles\n";
        std::map<std::string, int> per_sector;
        for (std::size_t i = config.fleet_size_hint(); i < fleet.labels.size(); ++i)
            ++per_sector[fleet.vehicles[i].spec.sector];
        for (const auto& [sector, n] : per_sector) {
            counts << sector << ',' << n << '\n';
            log << "  sector " << sector << ": " << n << " vehicles\n";
        }
        add_artifact("cluster_counts.csv");
    }
    for (const SyntheticGroup& g : config.synthetic)
        log << "  synthetic " << g.name << " (" << to_string(g.template_id) << "): " << g.count
            << " vehicles\n";
    log << "fleet: " << fleet.vehicles.size() << " EVs, horizon "
        << format_timestamp(config.start) << " .. " << format_timestamp(config.end) << "\n";

    if (up_to >= Stage::fit) {
        fs::create_directories(artifact_path("profiles"));
        std::set<std::string> written;
        for (std::size_t i = 0; i < fleet.vehicles.size(); ++i) {
            const std::string name = "profiles/" + sanitize(fleet.labels[i]) + ".json";
            if (!written.insert(name).second) continue;  // one file per group/vehicle
            save_profile(fleet.vehicles[i].profile, artifact_path(name));
            add_artifact(name);
        }
        log << "fit: " << written.size() << " profile documents\n";
    }

    std::vector<EVTrace> traces;
    if (up_to >= Stage::simulate) {
        const SimConfig sc = config.sim_config();
        const std::uint64_t hash = config_hash(config);
        const std::string cache = artifact_path("traces.bin");
        if (!load_traces_bin(cache, hash, traces)) {
            traces = simulate_fleet(fleet.vehicles, sc);
            save_traces_bin(traces, hash, cache);
        } else {
            log << "simulate: reusing cached traces\n";
        }
        add_artifact("traces.bin");
        if (config.write_traces) {
            write_traces_csv(traces, artifact_path("traces.csv"));
            add_artifact("traces.csv");
        }
        log << "simulate: " << traces.size() << " traces x " << sc.n_slots() << " slots\n";
    }

    PowerCapabilityProfile capability;
    if (up_to >= Stage::capability) {
        capability = capability_profile(traces);
        write_capability_csv(capability, artifact_path("capability.csv"));
        add_artifact("capability.csv");
        write_bands_csv(distribution_bands(capability), artifact_path("bands.csv"));
        add_artifact("bands.csv");

        std::set<ServicePeriod> periods;
        for (const PricedDesign& pd : priced) periods.insert(pd.design.service_period);
        if (periods.empty())
            periods = {ServicePeriod::week, ServicePeriod::day, ServicePeriod::h4};
        for (ServicePeriod p : periods) {
            const PeriodMinSeries minima = period_minima(capability, p);
            const std::string name = std::string("minima_") + to_string(p) + ".csv";
            write_minima_csv(minima, artifact_path(name));
            add_artifact(name);
        }
        log << "capability: rated " << capability.rated_kw << " kW\n";
        if (config.plots) {
            const std::size_t n = std::min<std::size_t>(capability.pool_kw.size(), kSlotsPerWeek);
            std::vector<double> pool(capability.pool_kw.begin(), capability.pool_kw.begin() + n);
            std::vector<double> rated(n, capability.rated_kw);
            write_line_chart_svg(artifact_path("capability.svg"), "Pool power capability (first week)",
                                 {{"pool", pool}, {"rated", rated}}, "kW");
            add_artifact("capability.svg");
        }
    }

    std::vector<RevenueReport> reports;
    if (up_to >= Stage::revenue) {
        for (const PricedDesign& pd : priced) {
            const PeriodMinSeries minima = period_minima(capability, pd.design.service_period);
            RevenueReport rep = revenue(minima, pd.prices, pd.design, fleet.vehicles.size(),
                                        config.opex_per_ev_year);
            const std::string base = "revenue_" + sanitize(pd.design.name);
            write_revenue_csv(rep, artifact_path(base + ".csv"));
            add_artifact(base + ".csv");
            write_revenue_json(rep, artifact_path(base + ".json"));
            add_artifact(base + ".json");
            const std::string prices_name = "prices_" + sanitize(pd.design.name) + ".csv";
            write_prices_csv(pd.prices, artifact_path(prices_name));
            add_artifact(prices_name);
            log << "revenue " << pd.design.name << ": " << rep.eur_per_week << " EUR/week ("
                << rep.eur_per_ev_week << " per EV)\n";
            reports.push_back(std::move(rep));
        }
    }

    if (up_to >= Stage::compare && !priced.empty()) {
        DesignComparison cmp;
        cmp.reports = reports;
        for (std::size_t i = 0; i < cmp.reports.size(); ++i)
            for (std::size_t j = i + 1; j < cmp.reports.size(); ++j)
                cmp.deltas.push_back({cmp.reports[i].design_name, cmp.reports[j].design_name,
                                      cmp.reports[j].eur_per_week - cmp.reports[i].eur_per_week});
        write_compare_csv(cmp, artifact_path("compare.csv"));
        add_artifact("compare.csv");
        if (config.plots) {
            std::vector<std::pair<std::string, double>> bars;
            for (const RevenueReport& r : cmp.reports) bars.emplace_back(r.design_name, r.eur_per_week);
            write_bar_chart_svg(artifact_path("compare.svg"), "Weekly revenue by market design", bars,
                                "EUR/week");
            add_artifact("compare.svg");
        }
    }

    // Manifest with checksums of everything written above.
    nlohmann::json manifest;
    manifest["seed"] = config.seed;
    std::ostringstream hash_hex;
    hash_hex << std::hex << config_hash(config);
    manifest["config_hash"] = hash_hex.str();
    manifest["stage"] = static_cast<int>(up_to);
    auto& arts = manifest["artifacts"] = nlohmann::json::object();
    for (const std::string& rel : result.artifacts)
        arts[rel] = file_checksum_hex(artifact_path(rel));
    {
        std::ofstream out(artifact_path("manifest.json"));
        if (!out) throw std::runtime_error("cannot write manifest");
        out << manifest.dump(2) << '\n';
    }
    result.artifacts.push_back("manifest.json");
    return result;
}

}  // namespace evfcr
