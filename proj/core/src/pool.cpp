#include "evfcr/pool.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "evfcr/csv.hpp"

namespace evfcr {

PowerCapabilityProfile capability_profile(const std::vector<EVTrace>& traces) {
    if (traces.empty()) throw std::invalid_argument("capability_profile: no traces");
    const std::size_t n = traces.front().n_slots();
    PowerCapabilityProfile profile;
    profile.start = traces.front().start;
    profile.pool_kw.assign(n, 0.0);
    for (const EVTrace& tr : traces) {
        if (tr.n_slots() != n || tr.start != profile.start)
            throw std::invalid_argument("capability_profile: trace length mismatch");
        // Summation in fleet order keeps results reproducible.
        for (std::size_t s = 0; s < n; ++s)
            profile.pool_kw[s] += std::min(tr.p_charge_kw[s], tr.p_discharge_kw[s]);
        profile.rated_kw += tr.rated_kw;
    }
    return profile;
}

PeriodMinSeries period_minima(const PowerCapabilityProfile& profile, ServicePeriod period) {
    PeriodMinSeries out;
    out.period = period;
    out.windows = period_windows(profile.start, profile.end(), period);
    out.p_min_kw.reserve(out.windows.size());
    for (const Window& w : out.windows) {
        const std::size_t lo = static_cast<std::size_t>((w.start - profile.start) / kSlotMinutes);
        const std::size_t hi = static_cast<std::size_t>((w.end - profile.start) / kSlotMinutes);
        double m = profile.pool_kw[lo];
        for (std::size_t s = lo + 1; s < hi; ++s) m = std::min(m, profile.pool_kw[s]);
        out.p_min_kw.push_back(m);
    }
    return out;
}

namespace {

// Linear-interpolated quantile of a sorted sample.
double quantile_sorted(const std::vector<double>& v, double q) {
    if (v.size() == 1) return v[0];
    const double pos = q * static_cast<double>(v.size() - 1);
    const std::size_t i = static_cast<std::size_t>(pos);
    if (i + 1 >= v.size()) return v.back();
    const double frac = pos - static_cast<double>(i);
    return v[i] + frac * (v[i + 1] - v[i]);
}

}  // namespace

DistributionBands distribution_bands(const PowerCapabilityProfile& profile) {
    if (profile.start % kMinutesPerDay != 0)
        throw std::invalid_argument("distribution_bands: profile must start at midnight");
    const int days = static_cast<int>(profile.pool_kw.size() / kSlotsPerDay);
    if (days < 2 || profile.pool_kw.size() % kSlotsPerDay != 0)
        throw std::invalid_argument("distribution_bands: need at least 2 full days");

    DistributionBands bands;
    bands.days = days;
    std::vector<double> values(static_cast<std::size_t>(days));
    for (int s = 0; s < kSlotsPerDay; ++s) {
        for (int d = 0; d < days; ++d)
            values[static_cast<std::size_t>(d)] =
                profile.pool_kw[static_cast<std::size_t>(d) * kSlotsPerDay + static_cast<std::size_t>(s)];
        std::sort(values.begin(), values.end());
        bands.median[s] = quantile_sorted(values, 0.5);
        bands.lo50[s] = quantile_sorted(values, 0.25);
        bands.hi50[s] = quantile_sorted(values, 0.75);
        bands.lo75[s] = quantile_sorted(values, 0.125);
        bands.hi75[s] = quantile_sorted(values, 0.875);
        bands.lo100[s] = values.front();
        bands.hi100[s] = values.back();
    }
    return bands;
}

void write_capability_csv(const PowerCapabilityProfile& profile, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write capability profile: " + path);
    out << "slot_start,pool_kw,rated_kw\n";
    for (std::size_t s = 0; s < profile.pool_kw.size(); ++s)
        out << format_timestamp(profile.start + static_cast<Timestamp>(s) * kSlotMinutes) << ','
            << fmt_double(profile.pool_kw[s]) << ',' << fmt_double(profile.rated_kw) << '\n';
}

void write_minima_csv(const PeriodMinSeries& minima, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write period minima: " + path);
    out << "window_start,window_end,p_min_kw\n";
    for (std::size_t i = 0; i < minima.windows.size(); ++i)
        out << format_timestamp(minima.windows[i].start) << ','
            << format_timestamp(minima.windows[i].end) << ',' << fmt_double(minima.p_min_kw[i])
            << '\n';
}

void write_bands_csv(const DistributionBands& bands, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write bands: " + path);
    out << "slot_of_day,median_kw,lo50_kw,hi50_kw,lo75_kw,hi75_kw,min_kw,max_kw\n";
    for (int s = 0; s < kSlotsPerDay; ++s)
        out << s << ',' << fmt_double(bands.median[s]) << ',' << fmt_double(bands.lo50[s]) << ','
            << fmt_double(bands.hi50[s]) << ',' << fmt_double(bands.lo75[s]) << ','
            << fmt_double(bands.hi75[s]) << ',' << fmt_double(bands.lo100[s]) << ','
            << fmt_double(bands.hi100[s]) << '\n';
}

}  // namespace evfcr
