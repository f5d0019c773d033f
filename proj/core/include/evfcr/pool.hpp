#pragma once

#include <array>
#include <string>
#include <vector>

#include "evfcr/sim.hpp"
#include "evfcr/timeutil.hpp"

namespace evfcr {

// Pool power capability: per slot the sum over EVs of the bidirectional
// (min of charge and discharge) power. FCR is awarded symmetrically, so
// the min is taken per EV before summation.
struct PowerCapabilityProfile {
    Timestamp start = 0;
    std::vector<double> pool_kw;
    double rated_kw = 0.0;  // sum of min(P_car, P_station)

    Timestamp end() const { return start + static_cast<Timestamp>(pool_kw.size()) * kSlotMinutes; }
};

PowerCapabilityProfile capability_profile(const std::vector<EVTrace>& traces);

// Minimum pool power per service-period window; the window minimum is the
// maximum FCR power that can be offered for that window.
struct PeriodMinSeries {
    ServicePeriod period = ServicePeriod::week;
    std::vector<Window> windows;
    std::vector<double> p_min_kw;
};

PeriodMinSeries period_minima(const PowerCapabilityProfile& profile, ServicePeriod period);

// Order statistics of the capability per time of day, across days:
// median plus the central 50%, 75% and 100% value ranges.
struct DistributionBands {
    std::array<double, kSlotsPerDay> median{}, lo50{}, hi50{}, lo75{}, hi75{}, lo100{}, hi100{};
    int days = 0;
};

DistributionBands distribution_bands(const PowerCapabilityProfile& profile);

void write_capability_csv(const PowerCapabilityProfile& profile, const std::string& path);
void write_minima_csv(const PeriodMinSeries& minima, const std::string& path);
void write_bands_csv(const DistributionBands& bands, const std::string& path);

}  // namespace evfcr
