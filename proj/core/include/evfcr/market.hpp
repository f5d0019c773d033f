#pragma once

#include <optional>
#include <string>
#include <vector>

#include "evfcr/pool.hpp"
#include "evfcr/timeutil.hpp"

namespace evfcr {

enum class Remuneration { pay_as_bid, market_clearing };

const char* to_string(Remuneration r);
std::optional<Remuneration> parse_remuneration(std::string_view s);

// FCR market design. Remuneration and tender schedule are metadata; the
// revenue math is price-taking either way.
struct MarketDesign {
    std::string name = "fcr";
    ServicePeriod service_period = ServicePeriod::h4;
    double min_bid_mw = 1.0;
    double increment_mw = 1.0;
    double buffer_factor = 1.25;       // hold 1.25x the awarded power
    double provision_hours = 0.25;     // 15-minutes criterion
    Remuneration remuneration = Remuneration::market_clearing;
    std::string tender_schedule;

    void validate() const;  // throws std::invalid_argument
};

// Awarded power for a window minimum: divide by the buffer factor, round
// down to the increment, zero below the minimum bid.
double biddable_power(double p_min_mw, const MarketDesign& design);

struct PriceWindow {
    Timestamp start = 0;
    double eur_per_mw = 0.0;
};

struct PriceSeries {
    ServicePeriod period = ServicePeriod::h4;
    std::vector<PriceWindow> windows;  // contiguous, non-overlapping

    Timestamp start() const { return windows.empty() ? 0 : windows.front().start; }
    Timestamp end() const;  // end of the last window
};

// CSV `window_start,price_eur_per_mw` with contiguity and sign checks.
PriceSeries load_prices(const std::string& path, ServicePeriod declared);
PriceSeries parse_prices_csv(std::istream& in, ServicePeriod declared, const std::string& origin);
void write_prices_csv(const PriceSeries& series, const std::string& path);

// Constant-price fixture covering [start, end).
PriceSeries constant_prices(ServicePeriod period, Timestamp start, Timestamp end,
                            double eur_per_mw);

struct WeeklyPrice {
    Timestamp week_start = 0;
    double eur_per_mw = 0.0;
    bool partial = false;  // week not fully covered by the series
};

// Scales a series to weekly figures: monthly prices are divided by four,
// daily and 4-h prices are summed within each calendar week, weekly prices
// pass through.
std::vector<WeeklyPrice> normalize_weekly(const PriceSeries& series);

struct RevenueWindow {
    Timestamp start = 0;
    double p_min_mw = 0.0;
    double p_bid_mw = 0.0;
    double price_eur_per_mw = 0.0;
    double revenue_eur = 0.0;
};

struct RevenueReport {
    std::string design_name;
    ServicePeriod period = ServicePeriod::h4;
    std::size_t fleet_size = 0;
    std::vector<RevenueWindow> windows;
    double total_eur = 0.0;

    // Normalized over full calendar weeks (raw total keeps partial windows).
    double weeks = 0.0;
    double eur_per_week = 0.0;
    double eur_per_ev_week = 0.0;
    std::optional<double> net_eur_per_week;  // after flat per-EV operating cost
    std::optional<double> net_eur_per_ev_week;
};

// The revenue procedure: window minimum -> buffer division -> increment
// rounding -> price multiplication -> summation and weekly normalization.
RevenueReport revenue(const PeriodMinSeries& minima, const PriceSeries& prices,
                      const MarketDesign& design, std::size_t fleet_size,
                      std::optional<double> opex_per_ev_year = std::nullopt);

struct PricedDesign {
    MarketDesign design;
    PriceSeries prices;
};

struct DesignDelta {
    std::string from;
    std::string to;
    double delta_eur_per_week = 0.0;
};

struct DesignComparison {
    std::vector<RevenueReport> reports;
    std::vector<DesignDelta> deltas;  // all ordered pairs (i -> j, i < j)
};

DesignComparison compare_designs(const PowerCapabilityProfile& profile,
                                 const std::vector<PricedDesign>& designs, std::size_t fleet_size,
                                 std::optional<double> opex_per_ev_year = std::nullopt);

void write_revenue_csv(const RevenueReport& report, const std::string& path);
void write_revenue_json(const RevenueReport& report, const std::string& path);
void write_compare_csv(const DesignComparison& cmp, const std::string& path);

}  // namespace evfcr
