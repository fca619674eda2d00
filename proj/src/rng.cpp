#include "swarmzones/rng.hpp"

#include <algorithm>
#include <cmath>

namespace swarmzones {

std::uint64_t Rng::mix(std::uint64_t x) noexcept {
    // splitmix64 finaliser
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Rng Rng::substream(std::string_view label) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return Rng(mix(seed_ ^ mix(h)));
}

std::uint64_t Rng::below(std::uint64_t n) {
    const std::uint64_t limit = n * (UINT64_MAX / n);
    std::uint64_t x = next();
    while (x >= limit) x = next();
    return x % n;
}

double Rng::exponential(double mean) { return -mean * std::log1p(-uniform01()); }

std::int64_t Rng::poisson(double mean) {
    if (!(mean > 0.0)) return 0;
    if (mean > 60.0) {
        const double u1 = 1.0 - uniform01();
        const double u2 = uniform01();
        const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793 * u2);
        return std::max<std::int64_t>(0, std::llround(mean + std::sqrt(mean) * z));
    }
    const double limit = std::exp(-mean);
    std::int64_t k = 0;
    double p = uniform01();
    while (p > limit) {
        ++k;
        p *= uniform01();
    }
    return k;
}

}  // namespace swarmzones
