#include "evfcr/rng.hpp"

#include <cmath>

namespace evfcr {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

RngStream RngStream::for_vehicle(std::uint64_t seed, std::uint64_t vehicle_index) {
    return derive(seed, vehicle_index, 0);
}

RngStream RngStream::derive(std::uint64_t seed, std::uint64_t vehicle_index, std::uint64_t purpose) {
    std::uint64_t s = splitmix64(seed);
    s = splitmix64(s ^ (vehicle_index + 1));
    s = splitmix64(s ^ (purpose * 0x9e3779b97f4a7c15ULL));
    return RngStream(s);
}

double RngStream::normal(double mean, double stddev) {
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(2.0 * 3.14159265358979323846 * u2);
}

double RngStream::truncated_normal(double mean, double stddev, double floor_value) {
    if (stddev <= 0.0) return mean < floor_value ? floor_value : mean;
    for (;;) {
        const double v = normal(mean, stddev);
        if (v >= floor_value) return v;
    }
}

}  // namespace evfcr
