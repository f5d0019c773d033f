#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace evfcr {

// Deterministic random stream. One stream per simulated EV, derived from
// (run seed, vehicle index), so results do not depend on thread count or
// scheduling. All floating-point draws use explicit transforms instead of
// std:: distributions, whose output is implementation-defined.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    static RngStream for_vehicle(std::uint64_t seed, std::uint64_t vehicle_index);

    // Derives a stream for a named sub-purpose (e.g. history sampling) so
    // different uses of the same vehicle's randomness stay independent.
    static RngStream derive(std::uint64_t seed, std::uint64_t vehicle_index, std::uint64_t purpose);

    // [0, 1)
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // 0 .. n-1
    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(uniform01() * static_cast<double>(n));
    }

    // Box-Muller; consumes exactly two uniforms per call.
    double normal(double mean, double stddev);

    // Redraws until the sample reaches the floor.
    double truncated_normal(double mean, double stddev, double floor_value);

private:
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace evfcr
