#include "evfcr/battery.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace evfcr {

void ChargingCurve::validate() const {
    if (cp_power_ac_kw <= 0.0) throw std::invalid_argument("charging curve: CP power must be > 0");
    if (!(efficiency > 0.0 && efficiency <= 1.0))
        throw std::invalid_argument("charging curve: efficiency out of (0,1]");
    if (!(cv_threshold > 0.0 && cv_threshold < 1.0))
        throw std::invalid_argument("charging curve: cv_threshold out of (0,1)");
    if (ac_points.empty()) return;
    double max_p = 0.0;
    for (std::size_t i = 0; i < ac_points.size(); ++i) {
        if (ac_points[i].second < 0.0) throw std::invalid_argument("charging curve: negative power");
        if (i > 0 && ac_points[i].first <= ac_points[i - 1].first)
            throw std::invalid_argument("charging curve: points not strictly increasing in SOE");
        if (i > 0 && ac_points[i].second > ac_points[i - 1].second + 1e-12)
            throw std::invalid_argument("charging curve: power must be non-increasing");
        max_p = std::max(max_p, ac_points[i].second);
    }
    if (ac_points.front().first != 0.0 || ac_points.back().first != 1.0)
        throw std::invalid_argument("charging curve: table must cover SOE 0..1");
    if (ac_points.back().second > 0.01 * max_p)
        throw std::invalid_argument("charging curve: power must reach ~0 at full battery");
}

double ChargingCurve::dc_power_at(double soe_frac) const {
    soe_frac = std::clamp(soe_frac, 0.0, 1.0);
    if (ac_points.empty()) {
        const double cp_dc = cp_power_ac_kw * efficiency;
        if (soe_frac <= cv_threshold) return cp_dc;
        return cp_dc * (1.0 - soe_frac) / (1.0 - cv_threshold);
    }
    for (std::size_t i = 1; i < ac_points.size(); ++i) {
        if (soe_frac <= ac_points[i].first) {
            const auto& [f0, p0] = ac_points[i - 1];
            const auto& [f1, p1] = ac_points[i];
            const double w = (soe_frac - f0) / (f1 - f0);
            return (p0 + w * (p1 - p0)) * efficiency;
        }
    }
    return ac_points.back().second * efficiency;
}

ChargingCurve ChargingCurve::capped(double p_station_kw) const {
    ChargingCurve c = *this;
    c.cp_power_ac_kw = std::min(cp_power_ac_kw, p_station_kw);
    for (auto& [frac, p] : c.ac_points) p = std::min(p, p_station_kw);
    return c;
}

ChargingCurve ChargingCurve::for_vehicle(const VehicleSpec& spec) {
    ChargingCurve c;
    c.cp_power_ac_kw = spec.max_charge_kw;
    return c;
}

ChargingCurve ChargingCurve::from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    ChargingCurve c;
    c.cp_power_ac_kw = j.value("cp_power_ac_kw", c.cp_power_ac_kw);
    c.efficiency = j.value("efficiency", c.efficiency);
    c.cv_threshold = j.value("cv_threshold", c.cv_threshold);
    if (j.contains("points")) {
        for (const auto& p : j.at("points"))
            c.ac_points.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
        if (!j.contains("cp_power_ac_kw")) {
            c.cp_power_ac_kw = 0.0;
            for (const auto& [frac, kw] : c.ac_points)
                c.cp_power_ac_kw = std::max(c.cp_power_ac_kw, kw);
        }
    }
    c.validate();
    return c;
}

ChargingCurve ChargingCurve::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read charging curve: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

double mobility_energy(const BatteryPartition& partition, int weekday, int slot) {
    const double e = std::max(partition.spontaneous_buffer_kwh,
                              partition.spontaneous_buffer_kwh +
                                  partition.trip_energy_kwh[weekday][slot]);
    return std::min(e, partition.soe_max_kwh);
}

namespace {

// DC power segments (kWh bounds, kW endpoints) of a curve over a battery.
struct Segment {
    double soe_lo, soe_hi;  // kWh
    double p_lo, p_hi;      // kW (DC)
};

std::vector<Segment> dc_segments(const ChargingCurve& curve, double e_bat) {
    std::vector<Segment> segs;
    if (curve.ac_points.empty()) {
        const double cp_dc = curve.cp_power_ac_kw * curve.efficiency;
        segs.push_back({0.0, curve.cv_threshold * e_bat, cp_dc, cp_dc});
        segs.push_back({curve.cv_threshold * e_bat, e_bat, cp_dc, 0.0});
    } else {
        for (std::size_t i = 1; i < curve.ac_points.size(); ++i)
            segs.push_back({curve.ac_points[i - 1].first * e_bat, curve.ac_points[i].first * e_bat,
                            curve.ac_points[i - 1].second * curve.efficiency,
                            curve.ac_points[i].second * curve.efficiency});
    }
    return segs;
}

double replay_min_soe(const std::vector<const TripRecord*>& trips, const VehicleSpec& spec,
                      const ChargingCurve& curve, double soe_max) {
    EVState state;
    state.soe_kwh = soe_max;
    double min_soe = soe_max;
    Timestamp prev_end = 0;
    bool at_company = true;
    bool first = true;
    for (const TripRecord* t : trips) {
        if (!first && at_company && t->start > prev_end) {
            const Timestamp gap = t->start - prev_end;
            const auto res = charge_step(state, spec, curve, soe_max,
                                         static_cast<int>(std::min<Timestamp>(gap, 7 * kMinutesPerDay)));
            state.soe_kwh = res.soe_kwh;
        }
        state.soe_kwh -= t->consumption_or(spec.mean_consumption);
        min_soe = std::min(min_soe, state.soe_kwh);
        at_company = t->end_at_company;
        prev_end = t->end;
        first = false;
    }
    return min_soe;
}

}  // namespace

BatteryPartition build_partition(const TripLog& log, const std::string& vehicle_id,
                                 const VehicleSpec& spec, const ChargingCurve& curve,
                                 const PartitionOptions& opts) {
    auto [lo, hi] = log.vehicle_range(vehicle_id);
    if (hi == lo) throw std::invalid_argument("vehicle not in trip log: " + vehicle_id);
    std::vector<TripRecord> history(log.records.begin() + static_cast<std::ptrdiff_t>(lo),
                                    log.records.begin() + static_cast<std::ptrdiff_t>(hi));
    return build_partition(history, spec, curve, opts);
}

BatteryPartition build_partition(const std::vector<TripRecord>& history, const VehicleSpec& spec,
                                 const ChargingCurve& curve, const PartitionOptions& opts) {
    if (history.empty()) throw std::invalid_argument("build_partition: empty history");
    if (!(opts.quantile > 0.0 && opts.quantile <= 1.0))
        throw std::invalid_argument("build_partition: quantile out of (0,1]");

    std::vector<const TripRecord*> trips;
    trips.reserve(history.size());
    for (const TripRecord& r : history)
        if (r.end > r.start) trips.push_back(&r);
    std::sort(trips.begin(), trips.end(),
              [](const TripRecord* a, const TripRecord* b) { return a->start < b->start; });
    if (trips.empty()) throw std::invalid_argument("build_partition: no usable trips");

    BatteryPartition part;
    part.e_bat_kwh = spec.battery_kwh;
    part.spontaneous_buffer_kwh = opts.buffer_fraction * spec.battery_kwh;
    part.cv_limit_kwh = curve.cv_threshold * spec.battery_kwh;

    // Journeys are grouped into excursions: a departure from the charging
    // point plus any chained journeys while the vehicle stayed unplugged.
    // The energy for the whole excursion must be on board at the first
    // departure, since no charging happens in between.
    struct Excursion {
        Timestamp start;
        double consumption_kwh;
    };
    std::vector<Excursion> excursions;
    bool at_company = true;
    for (const TripRecord* t : trips) {
        const double c = t->consumption_or(spec.mean_consumption);
        if (at_company || excursions.empty())
            excursions.push_back({t->start, c});
        else
            excursions.back().consumption_kwh += c;
        at_company = t->end_at_company;
    }

    // Consumption of excursions departing within the lookahead window of
    // each slot, summed per observed day, then quantiled per weekday/slot.
    const std::int64_t first_day = day_index(trips.front()->start);
    std::int64_t last_day = first_day;
    for (const TripRecord* t : trips) last_day = std::max(last_day, day_index(t->end));
    const std::int64_t s0 = first_day * kSlotsPerDay;
    const std::int64_t s1 = (last_day + 1) * kSlotsPerDay;
    const int lookahead_slots = std::max(1, opts.lookahead_minutes / kSlotMinutes);

    std::vector<double> window_sum(static_cast<std::size_t>(s1 - s0), 0.0);
    for (const Excursion& e : excursions) {
        const std::int64_t ds = slot_index(e.start);
        for (std::int64_t s = std::max(ds - lookahead_slots + 1, s0); s <= ds && s < s1; ++s)
            window_sum[static_cast<std::size_t>(s - s0)] += e.consumption_kwh;
    }

    std::vector<double> samples;
    for (int wd = 0; wd < 7; ++wd) {
        for (int sod = 0; sod < kSlotsPerDay; ++sod) {
            samples.clear();
            for (std::int64_t day = first_day; day <= last_day; ++day)
                if (weekday_of_day(day) == wd)
                    samples.push_back(window_sum[static_cast<std::size_t>(day * kSlotsPerDay + sod - s0)]);
            if (samples.empty()) continue;
            std::sort(samples.begin(), samples.end());
            // nearest-rank quantile
            const std::size_t rank = static_cast<std::size_t>(
                std::ceil(opts.quantile * static_cast<double>(samples.size())));
            part.trip_energy_kwh[wd][sod] = samples[std::min(rank, samples.size()) - 1];
        }
    }

    double mobility_max = part.spontaneous_buffer_kwh;
    for (int wd = 0; wd < 7; ++wd)
        for (int sod = 0; sod < kSlotsPerDay; ++sod)
            mobility_max = std::max(mobility_max,
                                    part.spontaneous_buffer_kwh + part.trip_energy_kwh[wd][sod]);
    part.soe_max_kwh = std::min(part.cv_limit_kwh, mobility_max + opts.margin_fraction * spec.battery_kwh);

    // Raise the charging limit until the recorded journeys replay without
    // running the battery empty (or the CV band is reached).
    for (int iter = 0; iter < 8; ++iter) {
        const double min_soe = replay_min_soe(trips, spec, curve, part.soe_max_kwh);
        if (min_soe >= 0.0) break;
        if (part.soe_max_kwh >= part.cv_limit_kwh) {
            part.history_infeasible = true;
            break;
        }
        part.soe_max_kwh = std::min(part.cv_limit_kwh, part.soe_max_kwh - min_soe);
    }
    return part;
}

MarketableEnergy marketable_energy(const EVState& state, const BatteryPartition& partition,
                                   int weekday, int slot) {
    MarketableEnergy e;
    const double e_mob = mobility_energy(partition, weekday, slot);
    if (!state.plugged || state.soe_kwh <= e_mob || state.soe_kwh > partition.cv_limit_kwh)
        return e;
    e.available = true;
    e.e_charge_kwh = partition.e_bat_kwh - state.soe_kwh;
    e.e_discharge_kwh = state.soe_kwh - e_mob;
    e.e_market_kwh = partition.e_bat_kwh - e_mob;
    e.e_charge_to_limit_kwh = std::max(0.0, partition.soe_max_kwh - state.soe_kwh);
    return e;
}

AvailablePower available_power(const MarketableEnergy& energies, const ChargingCurve& curve,
                               double p_station_kw, double dt_supply_hours) {
    AvailablePower p;
    if (!energies.available) return p;
    p.p_charge_kw = std::min({energies.e_charge_kwh / dt_supply_hours, curve.cp_power_ac_kw,
                              p_station_kw});
    p.p_discharge_kw = std::min({energies.e_discharge_kwh / dt_supply_hours, curve.cp_power_ac_kw,
                                 p_station_kw});
    return p;
}

ChargeResult charge_step(const EVState& state, const VehicleSpec& spec, const ChargingCurve& curve,
                         double target_soe_kwh, int dt_minutes) {
    const double e_bat = spec.battery_kwh;
    const double target = std::min(target_soe_kwh, e_bat);
    ChargeResult res;
    res.soe_kwh = state.soe_kwh;
    if (dt_minutes <= 0 || res.soe_kwh >= target) return res;

    const auto segs = dc_segments(curve, e_bat);
    double t_left = dt_minutes / 60.0;  // hours
    double soe = res.soe_kwh;
    while (t_left > 0.0 && soe < target) {
        const Segment* seg = nullptr;
        for (const Segment& s : segs)
            if (soe < s.soe_hi) {
                seg = &s;
                break;
            }
        if (!seg) break;
        const double seg_end = std::min(seg->soe_hi, target);
        const double span = seg->soe_hi - seg->soe_lo;
        const double slope = span > 0.0 ? (seg->p_hi - seg->p_lo) / span : 0.0;  // kW per kWh
        const double p_here = seg->p_lo + slope * (soe - seg->soe_lo);
        if (p_here <= 0.0) break;
        if (slope == 0.0) {
            const double t_need = (seg_end - soe) / p_here;
            if (t_need <= t_left) {
                soe = seg_end;
                t_left -= t_need;
            } else {
                soe += p_here * t_left;
                t_left = 0.0;
            }
        } else {
            // dSOE/dt = p_lo + slope * (SOE - soe_lo): exponential in time.
            const double p_end = seg->p_lo + slope * (seg_end - seg->soe_lo);
            const double t_need = p_end > 0.0 ? std::log(p_end / p_here) / slope
                                              : std::numeric_limits<double>::infinity();
            if (t_need <= t_left) {
                soe = seg_end;
                t_left -= t_need;
            } else {
                const double p_new = p_here * std::exp(slope * t_left);
                soe = seg->soe_lo + (p_new - seg->p_lo) / slope;
                t_left = 0.0;
            }
        }
    }
    soe = std::min(soe, target);
    res.ac_energy_kwh = (soe - state.soe_kwh) / curve.efficiency;
    res.soe_kwh = soe;
    return res;
}

}  // namespace evfcr
