#include "evfcr/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <stdexcept>

#include "evfcr/csv.hpp"

namespace evfcr {

namespace {

bool parse_double(const std::string& s, double& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

bool parse_bool(const std::string& s, bool& out) {
    if (s == "1" || s == "true" || s == "True" || s == "TRUE") {
        out = true;
        return true;
    }
    if (s == "0" || s == "false" || s == "False" || s == "FALSE") {
        out = false;
        return true;
    }
    return false;
}

std::size_t require_column(const std::vector<std::string>& header, const std::string& name,
                           const std::string& path) {
    auto idx = column_index(header, name);
    if (!idx)
        throw std::runtime_error(path + ": missing mandatory column '" + name + "'");
    return *idx;
}

}  // namespace

TripLog parse_trip_log(const std::string& path, const ColumnMap& columns, ParseReport* report) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read trip log: " + path);

    CsvReader reader(in);
    std::vector<std::string> fields;
    if (!reader.next(fields)) throw std::runtime_error(path + ": empty file, expected header");

    const std::size_t c_vid = require_column(fields, columns.vehicle_id, path);
    const std::size_t c_start = require_column(fields, columns.start, path);
    const std::size_t c_end = require_column(fields, columns.end, path);
    const std::size_t c_dist = require_column(fields, columns.distance_km, path);
    std::optional<std::size_t> c_cons, c_eac, c_dtc;
    if (!columns.consumption_kwh.empty())
        c_cons = require_column(fields, columns.consumption_kwh, path);
    if (!columns.end_at_company.empty())
        c_eac = require_column(fields, columns.end_at_company, path);
    if (!columns.distance_to_company_km.empty())
        c_dtc = require_column(fields, columns.distance_to_company_km, path);

    ParseReport local;
    ParseReport& rep = report ? *report : local;

    TripLog log;
    const std::size_t needed =
        std::max({c_vid, c_start, c_end, c_dist, c_cons.value_or(0), c_eac.value_or(0),
                  c_dtc.value_or(0)}) + 1;
    while (reader.next(fields)) {
        ++rep.rows_total;
        auto reject = [&](const std::string& msg) {
            ++rep.rows_rejected;
            rep.issues.push_back({reader.line_number(), msg});
        };
        if (fields.size() < needed) {
            reject("too few columns");
            continue;
        }
        TripRecord rec;
        rec.vehicle_id = fields[c_vid];
        if (rec.vehicle_id.empty()) {
            reject("empty vehicle id");
            continue;
        }
        auto start = parse_timestamp(fields[c_start]);
        auto end = parse_timestamp(fields[c_end]);
        if (!start || !end) {
            reject("bad timestamp");
            continue;
        }
        rec.start = *start;
        rec.end = *end;
        if (rec.end <= rec.start) {
            reject("trip end not after start");
            continue;
        }
        if (!parse_double(fields[c_dist], rec.distance_km) || rec.distance_km < 0) {
            reject("bad distance");
            continue;
        }
        if (c_cons && !fields[*c_cons].empty()) {
            double v;
            if (!parse_double(fields[*c_cons], v) || v < 0) {
                reject("bad consumption");
                continue;
            }
            rec.consumption_kwh = v;
        }
        if (c_eac) {
            bool v;
            if (!parse_bool(fields[*c_eac], v)) {
                reject("bad end_at_company flag");
                continue;
            }
            rec.end_at_company = v;
        } else if (c_dtc) {
            double v;
            if (!parse_double(fields[*c_dtc], v) || v < 0) {
                reject("bad distance to company");
                continue;
            }
            rec.end_at_company = v <= 0.1;
        }
        log.records.push_back(std::move(rec));
        ++rep.rows_kept;
    }
    log.sort();
    return log;
}

void write_trip_log(const TripLog& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write trip log: " + path);
    out << "vehicle_id,start,end,distance_km,consumption_kwh,end_at_company\n";
    for (const auto& r : log.records) {
        out << r.vehicle_id << ',' << format_timestamp(r.start) << ',' << format_timestamp(r.end)
            << ',' << fmt_double(r.distance_km) << ','
            << (r.consumption_kwh ? fmt_double(*r.consumption_kwh) : "") << ','
            << (r.end_at_company ? '1' : '0') << '\n';
    }
}

TripLog parse_canonical_trip_log(const std::string& path, ParseReport* report) {
    ColumnMap cols;
    cols.consumption_kwh = "consumption_kwh";
    cols.end_at_company = "end_at_company";
    return parse_trip_log(path, cols, report);
}

TripLog filter_vehicles(const TripLog& log) {
    TripLog out;
    std::size_t i = 0;
    const auto& recs = log.records;
    while (i < recs.size()) {
        std::size_t j = i;
        Timestamp first = recs[i].start, last = recs[i].end;
        while (j < recs.size() && recs[j].vehicle_id == recs[i].vehicle_id) {
            first = std::min(first, recs[j].start);
            last = std::max(last, recs[j].end);
            ++j;
        }
        if (last - first >= 7 * kMinutesPerDay)
            out.records.insert(out.records.end(), recs.begin() + static_cast<std::ptrdiff_t>(i),
                               recs.begin() + static_cast<std::ptrdiff_t>(j));
        i = j;
    }
    return out;
}

std::vector<ChargeEvent> load_charge_events(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read charge events: " + path);
    CsvReader reader(in);
    std::vector<std::string> fields;
    if (!reader.next(fields)) throw std::runtime_error(path + ": empty file, expected header");
    const std::size_t c_vid = require_column(fields, "vehicle_id", path);
    const std::size_t c_start = require_column(fields, "start", path);
    std::vector<ChargeEvent> events;
    while (reader.next(fields)) {
        if (fields.size() <= std::max(c_vid, c_start)) continue;
        auto ts = parse_timestamp(fields[c_start]);
        if (!ts) continue;
        events.push_back({fields[c_vid], *ts});
    }
    return events;
}

void apply_charge_events(TripLog& log, std::vector<ChargeEvent> events, Timestamp max_gap_minutes) {
    std::sort(events.begin(), events.end(), [](const ChargeEvent& a, const ChargeEvent& b) {
        if (a.vehicle_id != b.vehicle_id) return a.vehicle_id < b.vehicle_id;
        return a.start < b.start;
    });
    for (auto& rec : log.records) {
        ChargeEvent probe{rec.vehicle_id, rec.end};
        auto it = std::lower_bound(events.begin(), events.end(), probe,
                                   [](const ChargeEvent& a, const ChargeEvent& b) {
                                       if (a.vehicle_id != b.vehicle_id)
                                           return a.vehicle_id < b.vehicle_id;
                                       return a.start < b.start;
                                   });
        rec.end_at_company = it != events.end() && it->vehicle_id == rec.vehicle_id &&
                             it->start - rec.end <= max_gap_minutes;
    }
}

ClusterTable load_cluster_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read cluster table: " + path);
    CsvReader reader(in);
    std::vector<std::string> fields;
    if (!reader.next(fields)) throw std::runtime_error(path + ": empty file, expected header");
    const std::size_t c_vid = require_column(fields, "vehicle_id", path);
    const std::size_t c_sector = require_column(fields, "sector", path);
    auto c_class = column_index(fields, "vehicle_class");
    ClusterTable table;
    while (reader.next(fields)) {
        if (fields.size() <= std::max(c_vid, c_sector)) continue;
        ClusterEntry entry;
        entry.sector = fields[c_sector];
        if (c_class && fields.size() > *c_class && !fields[*c_class].empty()) {
            auto cls = parse_vehicle_class(fields[*c_class]);
            if (!cls)
                throw std::runtime_error(path + ": unknown vehicle class '" + fields[*c_class] + "'");
            entry.vehicle_class = *cls;
        }
        table.entries[fields[c_vid]] = std::move(entry);
    }
    return table;
}

VehicleSpec electrify_vehicle(VehicleClass vehicle_class) {
    VehicleSpec spec;
    spec.vehicle_class = vehicle_class;
    spec.max_charge_kw = 11.0;  // three-phase AC
    spec.consumption_stddev = 1.0;
    switch (vehicle_class) {
        case VehicleClass::small:
            spec.battery_kwh = 19.1;
            spec.mean_consumption = 18.9;
            break;
        case VehicleClass::medium:
            spec.battery_kwh = 31.4;
            spec.mean_consumption = 20.1;
            break;
        case VehicleClass::large:
            spec.battery_kwh = 80.7;
            spec.mean_consumption = 27.0;
            break;
        case VehicleClass::transporter:
            spec.battery_kwh = 27.9;
            spec.mean_consumption = 25.2;
            break;
    }
    return spec;
}

double draw_consumption_rate(const VehicleSpec& spec, RngStream& rng) {
    return rng.truncated_normal(spec.mean_consumption, spec.consumption_stddev,
                                kConsumptionFloorKwhPer100km);
}

}  // namespace evfcr
