#include "evfcr/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "evfcr/csv.hpp"

namespace evfcr {

void SimConfig::validate() const {
    if (end <= start) throw std::invalid_argument("sim horizon is empty");
    if (start % kSlotMinutes != 0 || end % kSlotMinutes != 0)
        throw std::invalid_argument("sim horizon must be aligned to 15-min slots");
    if (start % kMinutesPerDay != 0 || weekday(start) != 0)
        throw std::invalid_argument("sim horizon must start on a Monday 00:00");
    if (workers < 1) throw std::invalid_argument("workers must be >= 1");
    if (lookahead_slots < 0) throw std::invalid_argument("lookahead must be >= 0");
    if (warmup_days < 0) throw std::invalid_argument("warmup must be >= 0");
}

namespace {

struct PendingTrip {
    TraceTrip record;
    double consumption_kwh = 0.0;
};

// Draws a trip the current SOE can serve. After max_attempts the last
// draw's distance is shortened so the EV arrives empty.
TripDraw draw_feasible_trip(const MobilityProfile& profile, int wd, int sod,
                            const VehicleSpec& spec, RngStream& rng, double soe) {
    TripDraw draw;
    for (int attempt = 0; attempt < 10; ++attempt) {
        draw = sample_trip(profile, wd, sod, spec, rng);
        if (draw.consumption_kwh() <= soe) return draw;
    }
    draw.distance_km = soe * 100.0 / draw.consumption_rate;
    return draw;
}

}  // namespace

EVTrace simulate_ev(const FleetVehicle& ev, const SimConfig& config, std::uint64_t vehicle_index) {
    config.validate();
    RngStream rng = RngStream::for_vehicle(config.seed, vehicle_index);

    const std::int64_t start_slot = slot_index(config.start);
    const std::int64_t end_slot = slot_index(config.end);
    const std::int64_t first_slot = start_slot - static_cast<std::int64_t>(config.warmup_days) * kSlotsPerDay;
    const std::size_t n = static_cast<std::size_t>(end_slot - start_slot);

    EVTrace trace;
    trace.start = config.start;
    trace.rated_kw = std::min(ev.spec.max_charge_kw, ev.station_kw);
    trace.soe_kwh.resize(n);
    trace.plugged.resize(n);
    trace.available.resize(n);
    trace.p_charge_kw.resize(n);
    trace.p_discharge_kw.resize(n);

    const ChargingCurve session_curve = ev.curve.capped(ev.station_kw);
    const double soe_max = ev.partition.soe_max_kwh;

    EVState state;
    state.soe_kwh = soe_max;
    state.plugged = true;
    std::int64_t away_until = -1;
    PendingTrip pending;
    bool has_pending = false;
    bool charging = false;

    auto begin_trip = [&](std::int64_t slot, int wd, int sod) {
        const TripDraw draw = draw_feasible_trip(ev.profile, wd, sod, ev.spec, rng, state.soe_kwh);
        state.plugged = false;
        charging = false;
        away_until = slot + draw.duration_slots();
        pending.record = {slot_start(slot), slot_start(away_until), draw.distance_km,
                          draw.consumption_kwh(), true};
        pending.consumption_kwh = draw.consumption_kwh();
        has_pending = true;
    };

    for (std::int64_t slot = first_slot; slot < end_slot; ++slot) {
        const std::int64_t day = slot / kSlotsPerDay;
        const int wd = weekday_of_day(day);
        const int sod = static_cast<int>(slot % kSlotsPerDay);

        // Arrival: consume the trip energy, then either plug in or chain
        // the next journey immediately (return without charging).
        if (!state.plugged && slot == away_until) {
            state.soe_kwh = std::max(0.0, state.soe_kwh - pending.consumption_kwh);
            const bool plug = rng.bernoulli(ev.profile.plug_prob_at_return);
            pending.record.end_at_company = plug;
            if (config.record_trips && has_pending) trace.trips.push_back(pending.record);
            has_pending = false;
            if (plug) {
                state.plugged = true;
            } else {
                begin_trip(slot, wd, sod);
            }
        }

        bool slot_recorded = false;
        const std::size_t rec = static_cast<std::size_t>(slot - start_slot);
        auto record_idle = [&](const MarketableEnergy& energies, const AvailablePower& power) {
            if (slot < start_slot) return;
            trace.soe_kwh[rec] = state.soe_kwh;
            trace.plugged[rec] = state.plugged ? 1 : 0;
            trace.available[rec] = energies.available ? 1 : 0;
            trace.p_charge_kw[rec] = power.p_charge_kw;
            trace.p_discharge_kw[rec] = power.p_discharge_kw;
            slot_recorded = true;
        };

        if (state.plugged) {
            if (rng.uniform01() < ev.profile.start_prob[wd][sod]) {
                begin_trip(slot, wd, sod);
            } else {
                const MarketableEnergy energies = marketable_energy(state, ev.partition, wd, sod);
                const AvailablePower power = available_power(energies, ev.curve, ev.station_kw);
                record_idle(energies, power);

                // Charge while the mobility energy of the near future is
                // not covered, toward the individual charge limit.
                double required = mobility_energy(ev.partition, wd, sod);
                for (int k = 1; k <= config.lookahead_slots; ++k) {
                    const std::int64_t ahead = slot + k;
                    required = std::max(required,
                                        mobility_energy(ev.partition,
                                                        weekday_of_day(ahead / kSlotsPerDay),
                                                        static_cast<int>(ahead % kSlotsPerDay)));
                }
                if (state.soe_kwh < required)
                    state.soe_kwh = charge_step(state, ev.spec, session_curve, soe_max).soe_kwh;
            }
        }
        if (!slot_recorded && slot >= start_slot) {
            trace.soe_kwh[rec] = state.soe_kwh;
            trace.plugged[rec] = 0;
            trace.available[rec] = 0;
            trace.p_charge_kw[rec] = 0.0;
            trace.p_discharge_kw[rec] = 0.0;
        }
    }
    if (config.record_trips && has_pending) trace.trips.push_back(pending.record);

    // Drop warmup-era trips; keep journeys still running at the horizon end.
    if (config.record_trips)
        std::erase_if(trace.trips, [&](const TraceTrip& t) { return t.end <= config.start; });
    return trace;
}

std::vector<EVTrace> simulate_fleet(const std::vector<FleetVehicle>& fleet, const SimConfig& config) {
    if (fleet.empty()) throw std::invalid_argument("simulate_fleet: empty fleet");
    config.validate();
    std::vector<EVTrace> traces(fleet.size());
    const int workers = std::min<int>(config.workers, static_cast<int>(fleet.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < fleet.size(); ++i)
            traces[i] = simulate_ev(fleet[i], config, i);
        return traces;
    }
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= fleet.size()) return;
            traces[i] = simulate_ev(fleet[i], config, i);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    return traces;
}

void write_traces_csv(const std::vector<EVTrace>& traces, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write traces: " + path);
    out << "vehicle_index,slot_start,soe_kwh,plugged,available,p_charge_kw,p_discharge_kw\n";
    for (std::size_t i = 0; i < traces.size(); ++i) {
        const EVTrace& tr = traces[i];
        for (std::size_t s = 0; s < tr.n_slots(); ++s) {
            out << i << ',' << format_timestamp(tr.start + static_cast<Timestamp>(s) * kSlotMinutes)
                << ',' << fmt_double(tr.soe_kwh[s]) << ',' << int(tr.plugged[s]) << ','
                << int(tr.available[s]) << ',' << fmt_double(tr.p_charge_kw[s]) << ','
                << fmt_double(tr.p_discharge_kw[s]) << '\n';
        }
    }
}

namespace {
constexpr std::uint32_t kTraceMagic = 0x45564643;  // "EVFC"
constexpr std::uint32_t kTraceVersion = 1;

template <typename T>
void put(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
bool get(std::istream& in, T& v) {
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    return static_cast<bool>(in);
}
}  // namespace

void save_traces_bin(const std::vector<EVTrace>& traces, std::uint64_t config_hash,
                     const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write trace cache: " + path);
    put(out, kTraceMagic);
    put(out, kTraceVersion);
    put(out, config_hash);
    put(out, static_cast<std::uint64_t>(traces.size()));
    for (const EVTrace& tr : traces) {
        put(out, tr.start);
        put(out, static_cast<std::uint64_t>(tr.n_slots()));
        put(out, tr.rated_kw);
        out.write(reinterpret_cast<const char*>(tr.soe_kwh.data()),
                  static_cast<std::streamsize>(tr.n_slots() * sizeof(double)));
        out.write(reinterpret_cast<const char*>(tr.plugged.data()),
                  static_cast<std::streamsize>(tr.n_slots()));
        out.write(reinterpret_cast<const char*>(tr.available.data()),
                  static_cast<std::streamsize>(tr.n_slots()));
        out.write(reinterpret_cast<const char*>(tr.p_charge_kw.data()),
                  static_cast<std::streamsize>(tr.n_slots() * sizeof(double)));
        out.write(reinterpret_cast<const char*>(tr.p_discharge_kw.data()),
                  static_cast<std::streamsize>(tr.n_slots() * sizeof(double)));
        put(out, static_cast<std::uint64_t>(tr.trips.size()));
        for (const TraceTrip& t : tr.trips) {
            put(out, t.start);
            put(out, t.end);
            put(out, t.distance_km);
            put(out, t.consumption_kwh);
            put(out, static_cast<std::uint8_t>(t.end_at_company ? 1 : 0));
        }
    }
}

bool load_traces_bin(const std::string& path, std::uint64_t expected_hash,
                     std::vector<EVTrace>& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::uint32_t magic = 0, version = 0;
    std::uint64_t hash = 0, count = 0;
    if (!get(in, magic) || magic != kTraceMagic) return false;
    if (!get(in, version) || version != kTraceVersion) return false;
    if (!get(in, hash) || hash != expected_hash) return false;
    if (!get(in, count)) return false;
    out.clear();
    out.resize(count);
    for (EVTrace& tr : out) {
        std::uint64_t n = 0, n_trips = 0;
        if (!get(in, tr.start) || !get(in, n) || !get(in, tr.rated_kw)) return false;
        tr.soe_kwh.resize(n);
        tr.plugged.resize(n);
        tr.available.resize(n);
        tr.p_charge_kw.resize(n);
        tr.p_discharge_kw.resize(n);
        in.read(reinterpret_cast<char*>(tr.soe_kwh.data()),
                static_cast<std::streamsize>(n * sizeof(double)));
        in.read(reinterpret_cast<char*>(tr.plugged.data()), static_cast<std::streamsize>(n));
        in.read(reinterpret_cast<char*>(tr.available.data()), static_cast<std::streamsize>(n));
        in.read(reinterpret_cast<char*>(tr.p_charge_kw.data()),
                static_cast<std::streamsize>(n * sizeof(double)));
        in.read(reinterpret_cast<char*>(tr.p_discharge_kw.data()),
                static_cast<std::streamsize>(n * sizeof(double)));
        if (!in || !get(in, n_trips)) return false;
        tr.trips.resize(n_trips);
        for (TraceTrip& t : tr.trips) {
            std::uint8_t flag = 0;
            if (!get(in, t.start) || !get(in, t.end) || !get(in, t.distance_km) ||
                !get(in, t.consumption_kwh) || !get(in, flag))
                return false;
            t.end_at_company = flag != 0;
        }
    }
    return static_cast<bool>(in);
}

}  // namespace evfcr
