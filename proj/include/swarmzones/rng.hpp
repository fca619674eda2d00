#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace swarmzones {

/// Seeded generator with labelled substreams. Draw transforms are implemented
/// here rather than through <random> distributions, whose output is not
/// specified portably.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix(seed)) {}

    /// Independent stream derived from (seed, label).
    Rng substream(std::string_view label) const;

    std::uint64_t next() { return engine_(); }
    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    /// Uniform integer in [0, n); n > 0.
    std::uint64_t below(std::uint64_t n);
    bool bernoulli(double p) { return uniform01() < p; }
    double exponential(double mean);
    /// Knuth's product method for small means, normal approximation above 60.
    std::int64_t poisson(double mean);

    std::uint64_t seed() const noexcept { return seed_; }

private:
    static std::uint64_t mix(std::uint64_t x) noexcept;

    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace swarmzones
