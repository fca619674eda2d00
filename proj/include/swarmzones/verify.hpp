#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "swarmzones/social_distancing.hpp"

namespace swarmzones {

struct SuiteResult {
    std::string name;
    std::int64_t cases = 0;
    bool passed = true;
    std::string counterexample;  // first failure, empty on success
};

using ZoneValueFn = std::function<std::int64_t(int a, int b, int n)>;
using PixelRatioFn = std::function<double(const QueuePerson&, const QueuePerson&, const CameraModel&)>;

/// drone_zone_value against the diagonal enumeration for every n in [1, max_n].
SuiteResult verify_bijection(int max_n = 40, const ZoneValueFn& f = drone_zone_value);

/// Chord identity, haversine gap bound and pixel-ratio symmetry on random pairs.
SuiteResult verify_distances(int pairs = 1000, std::uint64_t seed = 1, const PixelRatioFn& pixel = pixel_ratio_distance);

/// Scatter mode against brute force; Queue mode a subset of Scatter mode.
SuiteResult verify_violations(int configs = 1000, std::uint64_t seed = 2);

/// Randomized fixed-area, two-layer and parallel-sweep traffic; every tick is
/// checked against an independent occupancy recount.
SuiteResult verify_collisions(std::int64_t steps = 100000, std::uint64_t seed = 3);

std::vector<SuiteResult> verify_all();

}  // namespace swarmzones
