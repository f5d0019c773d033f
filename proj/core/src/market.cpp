#include "evfcr/market.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include "evfcr/csv.hpp"

#include "json.hpp"

namespace evfcr {

const char* to_string(Remuneration r) {
    return r == Remuneration::pay_as_bid ? "pay_as_bid" : "market_clearing";
}

std::optional<Remuneration> parse_remuneration(std::string_view s) {
    if (s == "pay_as_bid") return Remuneration::pay_as_bid;
    if (s == "market_clearing") return Remuneration::market_clearing;
    return std::nullopt;
}

void MarketDesign::validate() const {
    if (min_bid_mw <= 0.0) throw std::invalid_argument("market design: min bid must be > 0");
    if (increment_mw <= 0.0) throw std::invalid_argument("market design: increment must be > 0");
    if (buffer_factor < 1.0) throw std::invalid_argument("market design: buffer factor must be >= 1");
    if (provision_hours <= 0.0) throw std::invalid_argument("market design: provision time must be > 0");
}

double biddable_power(double p_min_mw, const MarketDesign& design) {
    if (p_min_mw <= 0.0) return 0.0;
    const double buffered = p_min_mw / design.buffer_factor;
    const double q = std::floor(buffered / design.increment_mw) * design.increment_mw;
    return q >= design.min_bid_mw ? q : 0.0;
}

Timestamp PriceSeries::end() const {
    if (windows.empty()) return 0;
    return next_window_start(windows.back().start, period);
}

PriceSeries parse_prices_csv(std::istream& in, ServicePeriod declared, const std::string& origin) {
    CsvReader reader(in);
    std::vector<std::string> fields;
    if (!reader.next(fields)) throw std::runtime_error(origin + ": empty file, expected header");
    auto c_start = column_index(fields, "window_start");
    auto c_price = column_index(fields, "price_eur_per_mw");
    if (!c_start || !c_price)
        throw std::runtime_error(origin + ": expected columns window_start,price_eur_per_mw");

    PriceSeries series;
    series.period = declared;
    while (reader.next(fields)) {
        if (fields.size() <= std::max(*c_start, *c_price))
            throw std::runtime_error(origin + ": too few columns on line " +
                                     std::to_string(reader.line_number()));
        auto ts = parse_timestamp(fields[*c_start]);
        if (!ts)
            throw std::runtime_error(origin + ": bad timestamp on line " +
                                     std::to_string(reader.line_number()));
        double price;
        auto [p, ec] = std::from_chars(fields[*c_price].data(),
                                       fields[*c_price].data() + fields[*c_price].size(), price);
        if (ec != std::errc{} || p != fields[*c_price].data() + fields[*c_price].size())
            throw std::runtime_error(origin + ": bad price on line " +
                                     std::to_string(reader.line_number()));
        if (price < 0.0)
            throw std::runtime_error(origin + ": negative price at " + format_timestamp(*ts));
        series.windows.push_back({*ts, price});
    }
    if (series.windows.empty()) throw std::runtime_error(origin + ": no price windows");
    std::sort(series.windows.begin(), series.windows.end(),
              [](const PriceWindow& a, const PriceWindow& b) { return a.start < b.start; });

    const Timestamp first = series.windows.front().start;
    if (window_start_at(first, declared) != first)
        throw std::runtime_error(origin + ": first window " + format_timestamp(first) +
                                 " not aligned to service period " + to_string(declared));
    for (std::size_t i = 1; i < series.windows.size(); ++i) {
        const Timestamp expected = next_window_start(series.windows[i - 1].start, declared);
        const Timestamp got = series.windows[i].start;
        if (got > expected)
            throw std::runtime_error(origin + ": gap between " + format_timestamp(expected) +
                                     " and " + format_timestamp(got));
        if (got < expected)
            throw std::runtime_error(origin + ": overlapping window at " + format_timestamp(got));
    }
    return series;
}

PriceSeries load_prices(const std::string& path, ServicePeriod declared) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read prices: " + path);
    return parse_prices_csv(in, declared, path);
}

void write_prices_csv(const PriceSeries& series, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write prices: " + path);
    out << "window_start,price_eur_per_mw\n";
    for (const PriceWindow& w : series.windows)
        out << format_timestamp(w.start) << ',' << fmt_double(w.eur_per_mw) << '\n';
}

PriceSeries constant_prices(ServicePeriod period, Timestamp start, Timestamp end,
                            double eur_per_mw) {
    PriceSeries series;
    series.period = period;
    for (const Window& w : period_windows(start, end, period))
        series.windows.push_back({w.start, eur_per_mw});
    return series;
}

std::vector<WeeklyPrice> normalize_weekly(const PriceSeries& series) {
    if (series.windows.empty()) return {};
    std::vector<WeeklyPrice> out;

    if (series.period == ServicePeriod::week) {
        for (const PriceWindow& w : series.windows) out.push_back({w.start, w.eur_per_mw, false});
        return out;
    }

    const Timestamp cover_start = series.start();
    const Timestamp cover_end = series.end();

    if (series.period == ServicePeriod::month) {
        // Month price / 4 per week, time-weighted where a week straddles
        // two months; weeks not fully covered are flagged.
        Timestamp week = window_start_at(cover_start, ServicePeriod::week);
        for (; week < cover_end; week += kMinutesPerWeek) {
            const Timestamp week_end = week + kMinutesPerWeek;
            double value = 0.0;
            Timestamp covered = 0;
            for (const PriceWindow& m : series.windows) {
                const Timestamp m_end = next_month_start(m.start);
                const Timestamp lo = std::max(week, m.start);
                const Timestamp hi = std::min(week_end, m_end);
                if (hi <= lo) continue;
                covered += hi - lo;
                value += (static_cast<double>(hi - lo) / static_cast<double>(kMinutesPerWeek)) *
                         (m.eur_per_mw / 4.0);
            }
            out.push_back({week, value, covered != kMinutesPerWeek});
        }
        return out;
    }

    // Sub-weekly periods: sum within each calendar week.
    std::map<Timestamp, std::pair<double, Timestamp>> weeks;  // week -> (sum, covered minutes)
    for (const PriceWindow& w : series.windows) {
        const Timestamp wk = window_start_at(w.start, ServicePeriod::week);
        auto& [sum, covered] = weeks[wk];
        sum += w.eur_per_mw;
        covered += next_window_start(w.start, series.period) - w.start;
    }
    for (const auto& [wk, agg] : weeks)
        out.push_back({wk, agg.first, agg.second != kMinutesPerWeek});
    return out;
}

RevenueReport revenue(const PeriodMinSeries& minima, const PriceSeries& prices,
                      const MarketDesign& design, std::size_t fleet_size,
                      std::optional<double> opex_per_ev_year) {
    design.validate();
    if (minima.period != design.service_period)
        throw std::invalid_argument("revenue: minima period does not match market design");
    if (prices.period != design.service_period)
        throw std::invalid_argument("revenue: price period does not match market design");
    if (fleet_size == 0) throw std::invalid_argument("revenue: empty fleet");

    RevenueReport report;
    report.design_name = design.name;
    report.period = design.service_period;
    report.fleet_size = fleet_size;

    std::size_t pi = 0;
    for (std::size_t i = 0; i < minima.windows.size(); ++i) {
        const Timestamp start = minima.windows[i].start;
        while (pi < prices.windows.size() && prices.windows[pi].start < start) ++pi;
        if (pi >= prices.windows.size() || prices.windows[pi].start != start)
            throw std::invalid_argument("revenue: no price for window starting " +
                                        format_timestamp(start));
        RevenueWindow w;
        w.start = start;
        w.p_min_mw = minima.p_min_kw[i] / 1000.0;
        w.p_bid_mw = biddable_power(w.p_min_mw, design);
        w.price_eur_per_mw = prices.windows[pi].eur_per_mw;
        w.revenue_eur = w.p_bid_mw * w.price_eur_per_mw;
        report.total_eur += w.revenue_eur;
        report.windows.push_back(w);
    }
    if (report.windows.empty()) return report;

    const Timestamp span_start = minima.windows.front().start;
    const Timestamp span_end = minima.windows.back().end;

    if (design.service_period == ServicePeriod::month) {
        // Calendar months do not tile weeks; normalize over the span.
        report.weeks = static_cast<double>(span_end - span_start) /
                       static_cast<double>(kMinutesPerWeek);
        report.eur_per_week = report.total_eur / report.weeks;
    } else {
        // Partial calendar weeks are dropped from the normalized figure.
        Timestamp week = window_start_at(span_start, ServicePeriod::week);
        if (week < span_start) week += kMinutesPerWeek;
        int full_weeks = 0;
        double full_week_rev = 0.0;
        for (; week + kMinutesPerWeek <= span_end; week += kMinutesPerWeek) {
            ++full_weeks;
            for (const RevenueWindow& w : report.windows)
                if (w.start >= week && w.start < week + kMinutesPerWeek)
                    full_week_rev += w.revenue_eur;
        }
        if (full_weeks > 0) {
            report.weeks = full_weeks;
            report.eur_per_week = full_week_rev / full_weeks;
        } else {
            report.weeks = static_cast<double>(span_end - span_start) /
                           static_cast<double>(kMinutesPerWeek);
            report.eur_per_week = report.total_eur / report.weeks;
        }
    }
    report.eur_per_ev_week = report.eur_per_week / static_cast<double>(fleet_size);
    if (opex_per_ev_year) {
        const double opex_week = *opex_per_ev_year / 52.0;
        report.net_eur_per_week = report.eur_per_week - opex_week * static_cast<double>(fleet_size);
        report.net_eur_per_ev_week = report.eur_per_ev_week - opex_week;
    }
    return report;
}

DesignComparison compare_designs(const PowerCapabilityProfile& profile,
                                 const std::vector<PricedDesign>& designs, std::size_t fleet_size,
                                 std::optional<double> opex_per_ev_year) {
    DesignComparison cmp;
    for (const PricedDesign& pd : designs) {
        const PeriodMinSeries minima = period_minima(profile, pd.design.service_period);
        cmp.reports.push_back(revenue(minima, pd.prices, pd.design, fleet_size, opex_per_ev_year));
    }
    for (std::size_t i = 0; i < cmp.reports.size(); ++i)
        for (std::size_t j = i + 1; j < cmp.reports.size(); ++j)
            cmp.deltas.push_back({cmp.reports[i].design_name, cmp.reports[j].design_name,
                                  cmp.reports[j].eur_per_week - cmp.reports[i].eur_per_week});
    return cmp;
}

void write_revenue_csv(const RevenueReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write revenue report: " + path);
    out << "window_start,p_min_mw,p_bid_mw,price_eur_per_mw,revenue_eur\n";
    for (const RevenueWindow& w : report.windows)
        out << format_timestamp(w.start) << ',' << fmt_double(w.p_min_mw) << ','
            << fmt_double(w.p_bid_mw) << ',' << fmt_double(w.price_eur_per_mw) << ','
            << fmt_double(w.revenue_eur) << '\n';
}

void write_revenue_json(const RevenueReport& report, const std::string& path) {
    nlohmann::json j;
    j["design"] = report.design_name;
    j["service_period"] = to_string(report.period);
    j["fleet_size"] = report.fleet_size;
    j["windows"] = report.windows.size();
    j["total_eur"] = report.total_eur;
    j["weeks"] = report.weeks;
    j["eur_per_week"] = report.eur_per_week;
    j["eur_per_ev_week"] = report.eur_per_ev_week;
    if (report.net_eur_per_week) j["net_eur_per_week"] = *report.net_eur_per_week;
    if (report.net_eur_per_ev_week) j["net_eur_per_ev_week"] = *report.net_eur_per_ev_week;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write revenue report: " + path);
    out << j.dump(2) << '\n';
}

void write_compare_csv(const DesignComparison& cmp, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write comparison: " + path);
    out << "kind,name,period,total_eur,weeks,eur_per_week,eur_per_ev_week,net_eur_per_week\n";
    for (const RevenueReport& r : cmp.reports) {
        out << "design," << r.design_name << ',' << to_string(r.period) << ','
            << fmt_double(r.total_eur) << ',' << fmt_double(r.weeks) << ','
            << fmt_double(r.eur_per_week) << ',' << fmt_double(r.eur_per_ev_week) << ','
            << (r.net_eur_per_week ? fmt_double(*r.net_eur_per_week) : "") << '\n';
    }
    for (const DesignDelta& d : cmp.deltas)
        out << "delta," << d.from << "->" << d.to << ",,,," << fmt_double(d.delta_eur_per_week)
            << ",,\n";
}

}  // namespace evfcr
