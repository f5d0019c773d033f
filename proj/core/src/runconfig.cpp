#include "evfcr/runconfig.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace evfcr {

namespace {

int parse_slot(const nlohmann::json& j) {
    if (j.is_number_integer()) return j.get<int>();
    const std::string s = j.get<std::string>();  // "HH:MM"
    if (s.size() != 5 || s[2] != ':') throw std::invalid_argument("bad time of day: " + s);
    const int h = std::stoi(s.substr(0, 2));
    const int m = std::stoi(s.substr(3, 2));
    if (h < 0 || h > 23 || m % kSlotMinutes != 0)
        throw std::invalid_argument("time of day must be on a 15-min slot: " + s);
    return h * 4 + m / kSlotMinutes;
}

std::array<bool, 7> parse_days(const nlohmann::json& j) {
    std::array<bool, 7> days{};
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "all") days.fill(true);
        else if (s == "weekdays") days = {true, true, true, true, true, false, false};
        else if (s == "weekend") days = {false, false, false, false, false, true, true};
        else throw std::invalid_argument("unknown day set: " + s);
        return days;
    }
    for (const auto& d : j) {
        const int wd = d.get<int>();
        if (wd < 0 || wd > 6) throw std::invalid_argument("weekday out of 0..6");
        days[wd] = true;
    }
    return days;
}

Timestamp parse_ts_field(const nlohmann::json& j, const char* what) {
    auto ts = parse_timestamp(j.get<std::string>());
    if (!ts) throw std::invalid_argument(std::string("bad timestamp in ") + what);
    return *ts;
}

}  // namespace

RunConfig RunConfig::from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    RunConfig cfg;
    cfg.seed = j.value("seed", cfg.seed);
    cfg.workers = j.value("workers", cfg.workers);
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    cfg.write_traces = j.value("write_traces", cfg.write_traces);
    cfg.plots = j.value("plots", cfg.plots);

    const auto& horizon = j.at("horizon");
    cfg.start = parse_ts_field(horizon.at("start"), "horizon.start");
    if (horizon.contains("end"))
        cfg.end = parse_ts_field(horizon.at("end"), "horizon.end");
    else if (horizon.contains("weeks"))
        cfg.end = cfg.start + horizon.at("weeks").get<int>() * kMinutesPerWeek;
    else if (horizon.contains("days"))
        cfg.end = cfg.start + horizon.at("days").get<int>() * kMinutesPerDay;
    else
        throw std::invalid_argument("horizon needs end, weeks or days");

    const auto& fleet = j.at("fleet");
    if (fleet.contains("synthetic")) {
        for (const auto& g : fleet.at("synthetic")) {
            SyntheticGroup group;
            const std::string tpl = g.at("template").get<std::string>();
            auto t = parse_synthetic_template(tpl);
            if (!t) throw std::invalid_argument("unknown synthetic template: " + tpl);
            group.template_id = *t;
            group.name = g.value("name", tpl);
            group.count = g.value("count", 1);
            group.station_kw = g.value("station_kw", 11.0);
            group.consumption_stddev = g.value("consumption_stddev", 1.0);
            const std::string cls = g.value("vehicle_class", "small");
            auto vc = parse_vehicle_class(cls);
            if (!vc) throw std::invalid_argument("unknown vehicle class: " + cls);
            group.vehicle_class = *vc;
            group.params = default_params(group.template_id);
            if (g.contains("params")) {
                const auto& p = g.at("params");
                if (p.contains("plug_prob_at_return"))
                    group.params.plug_prob_at_return = p.at("plug_prob_at_return").get<double>();
                if (p.contains("consumption_rate"))
                    group.params.consumption_rate = p.at("consumption_rate").get<double>();
                if (p.contains("days")) group.params.active_days = parse_days(p.at("days"));
                if (p.contains("shifts")) {
                    group.params.shifts.clear();
                    for (const auto& s : p.at("shifts")) {
                        ShiftSpec shift;
                        shift.start_slot = parse_slot(s.at("start"));
                        shift.start_prob = s.at("prob").get<double>();
                        shift.duration_min = s.value("duration_min", shift.duration_min);
                        shift.distance_km = s.value("distance_km", shift.distance_km);
                        shift.distance_spread_km = s.value("distance_spread_km", shift.distance_spread_km);
                        shift.duration_spread_min = s.value("duration_spread_min", shift.duration_spread_min);
                        group.params.shifts.push_back(shift);
                    }
                }
            }
            cfg.synthetic.push_back(std::move(group));
        }
    }
    if (fleet.contains("logs")) {
        const auto& l = fleet.at("logs");
        LogFleetConfig logs;
        logs.trips_path = l.at("trips").get<std::string>();
        if (l.contains("columns")) {
            const auto& c = l.at("columns");
            logs.columns.vehicle_id = c.value("vehicle_id", logs.columns.vehicle_id);
            logs.columns.start = c.value("start", logs.columns.start);
            logs.columns.end = c.value("end", logs.columns.end);
            logs.columns.distance_km = c.value("distance_km", logs.columns.distance_km);
            logs.columns.consumption_kwh = c.value("consumption_kwh", "");
            logs.columns.end_at_company = c.value("end_at_company", "");
            logs.columns.distance_to_company_km = c.value("distance_to_company_km", "");
        }
        logs.charge_events_path = l.value("charge_events", "");
        logs.clusters_path = l.value("clusters", "");
        if (l.contains("sectors"))
            for (const auto& s : l.at("sectors")) logs.sector_filter.push_back(s.get<std::string>());
        logs.station_kw = l.value("station_kw", 11.0);
        logs.consumption_stddev = l.value("consumption_stddev", 1.0);
        cfg.logs = std::move(logs);
    }

    if (j.contains("battery")) {
        const auto& b = j.at("battery");
        cfg.efficiency = b.value("efficiency", cfg.efficiency);
        cfg.cv_threshold = b.value("cv_threshold", cfg.cv_threshold);
        cfg.partition.quantile = b.value("quantile", cfg.partition.quantile);
        cfg.partition.lookahead_minutes = b.value("lookahead_minutes", cfg.partition.lookahead_minutes);
        cfg.partition.buffer_fraction = b.value("buffer_fraction", cfg.partition.buffer_fraction);
        cfg.partition.margin_fraction = b.value("margin_fraction", cfg.partition.margin_fraction);
        cfg.curve_table_path = b.value("curve_table", "");
        cfg.lookahead_slots = std::max(1, cfg.partition.lookahead_minutes / kSlotMinutes);
    }
    if (j.contains("sim")) {
        const auto& s = j.at("sim");
        cfg.warmup_days = s.value("warmup_days", cfg.warmup_days);
        cfg.history_days = s.value("history_days", cfg.history_days);
    }

    if (j.contains("markets")) {
        for (const auto& m : j.at("markets")) {
            MarketConfig mc;
            mc.design.name = m.at("name").get<std::string>();
            const std::string period = m.at("service_period").get<std::string>();
            auto sp = parse_service_period(period);
            if (!sp) throw std::invalid_argument("unknown service period: " + period);
            mc.design.service_period = *sp;
            mc.design.min_bid_mw = m.value("min_bid_mw", 1.0);
            mc.design.increment_mw = m.value("increment_mw", 1.0);
            mc.design.buffer_factor = m.value("buffer_factor", 1.25);
            mc.design.provision_hours = m.value("provision_hours", 0.25);
            if (m.contains("remuneration")) {
                auto r = parse_remuneration(m.at("remuneration").get<std::string>());
                if (!r) throw std::invalid_argument("unknown remuneration scheme");
                mc.design.remuneration = *r;
            }
            mc.design.tender_schedule = m.value("tender_schedule", "");
            mc.prices_path = m.value("prices", "");
            mc.fixture_eur_per_mw = m.value("fixture_eur_per_mw", 0.0);
            if (mc.prices_path.empty() && mc.fixture_eur_per_mw <= 0.0)
                throw std::invalid_argument("market '" + mc.design.name +
                                            "' needs prices or fixture_eur_per_mw");
            cfg.markets.push_back(std::move(mc));
        }
    }
    if (j.contains("opex_per_ev_year")) cfg.opex_per_ev_year = j.at("opex_per_ev_year").get<double>();

    cfg.canonical_json = j.dump();
    return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    RunConfig cfg = from_json(ss.str());
    if (const char* env = std::getenv("EVFCR_OUTPUT_DIR"); env && *env) cfg.output_dir = env;
    return cfg;
}

void RunConfig::validate() const {
    sim_config().validate();
    if (synthetic.empty() && !logs)
        throw std::invalid_argument("config defines no fleet");
    for (const SyntheticGroup& g : synthetic)
        if (g.count < 1) throw std::invalid_argument("synthetic group count must be >= 1");
    if (logs && !std::filesystem::exists(logs->trips_path))
        throw std::runtime_error("trip log not found: " + logs->trips_path);
    if (logs && !logs->charge_events_path.empty() &&
        !std::filesystem::exists(logs->charge_events_path))
        throw std::runtime_error("charge events not found: " + logs->charge_events_path);
    if (logs && !logs->clusters_path.empty() && !std::filesystem::exists(logs->clusters_path))
        throw std::runtime_error("cluster table not found: " + logs->clusters_path);
    if (!curve_table_path.empty() && !std::filesystem::exists(curve_table_path))
        throw std::runtime_error("charging curve table not found: " + curve_table_path);
    for (const MarketConfig& m : markets) {
        m.design.validate();
        if (!m.prices_path.empty() && !std::filesystem::exists(m.prices_path))
            throw std::runtime_error("price file not found: " + m.prices_path);
    }
}

SimConfig RunConfig::sim_config() const {
    SimConfig sc;
    sc.start = start;
    sc.end = end;
    sc.seed = seed;
    sc.workers = workers;
    sc.lookahead_slots = lookahead_slots;
    sc.warmup_days = warmup_days;
    return sc;
}

std::size_t RunConfig::fleet_size_hint() const {
    std::size_t n = 0;
    for (const SyntheticGroup& g : synthetic) n += static_cast<std::size_t>(g.count);
    return n;
}

std::uint64_t config_hash(const RunConfig& config) {
    // FNV-1a over the canonical dump.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : config.canonical_json) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string demo_config_json() {
    return R"({
  "seed": 20200701,
  "workers": 4,
  "horizon": {"start": "2020-01-06T00:00", "weeks": 4},
  "output_dir": "out-demo",
  "write_traces": true,
  "fleet": {
    "synthetic": [
      {
        "name": "health_two_shift",
        "template": "two_shift",
        "count": 100,
        "vehicle_class": "small",
        "station_kw": 11.0,
        "params": {
          "shifts": [
            {"start": "06:30", "prob": 0.6, "duration_min": 330, "distance_km": 40.0},
            {"start": "14:00", "prob": 0.4, "duration_min": 420, "distance_km": 40.0}
          ],
          "days": "all",
          "plug_prob_at_return": 0.7
        }
      }
    ]
  },
  "markets": [
    {"name": "weekly_2018", "service_period": "week", "fixture_eur_per_mw": 1880.0,
     "remuneration": "pay_as_bid"},
    {"name": "daily_2019", "service_period": "day", "fixture_eur_per_mw": 183.0,
     "remuneration": "market_clearing"},
    {"name": "fourh_2020", "service_period": "4h", "fixture_eur_per_mw": 30.0,
     "remuneration": "market_clearing"}
  ],
  "opex_per_ev_year": 725.0
})";
}

}  // namespace evfcr
