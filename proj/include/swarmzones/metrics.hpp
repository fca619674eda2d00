#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "swarmzones/fleet.hpp"
#include "swarmzones/rng.hpp"

namespace swarmzones {

inline constexpr int kPacketBytes = 256;

struct LinkSample {
    double packets_success = 0.0;
    double ber = 0.0;
    double transmission_time = 1.0;  // s
};

/// 256 * 8 * N * (1 - BER) / T, in bit/s.
double throughput(const LinkSample& s);

/// Exact rational value p/q with q > 0, reduced.
struct Rational {
    std::int64_t p = 0;
    std::int64_t q = 1;

    static Rational of(std::int64_t p, std::int64_t q);
    double value() const noexcept { return static_cast<double>(p) / static_cast<double>(q); }
    friend bool operator==(const Rational&, const Rational&) = default;
};

Rational throughput_exact(std::int64_t packets_success, Rational ber, Rational transmission_time);

struct SignalTimeModel {
    double min = 0.0;
    double mode = 2.3;
    double max = 10.0;

    void validate() const;
    double mean() const noexcept { return (min + mode + max) / 3.0; }
    double stddev() const noexcept;
};

/// Inverse-CDF triangular draw in [min, max).
double sample_signal_time(const SignalTimeModel& m, Rng& rng);
double triangular_cdf(const SignalTimeModel& m, double x);

struct CoverageModel {
    double per_drone_rate = 0.1142;  // route km per minute of work
    double sortie_minutes = 12.5;    // work per tank
    double refill_time = 5.0;        // minutes
    double recharge_time = 40.0;     // minutes
    double transit_time = 0.0;       // minutes each way to the depot
    int depot_servers = 0;           // 0: scale with the fleet
    int drones_per_server = 2;

    int servers_for(int drones) const noexcept;
};

/// Event-driven makespan, in minutes, of sweeping `total_km` with `drones`
/// drones that queue FIFO at the depot between sorties.
double coverage_time(double total_km, int drones, const CoverageModel& cm);

/// Bisects per_drone_rate so coverage_time(total_km, drones) hits target_minutes.
CoverageModel calibrate_coverage(double total_km, int drones, double target_minutes, CoverageModel cm);

/// One drone entering a state at time `t` (seconds).
struct StateChange {
    std::int64_t t = 0;
    DroneId drone = 0;
    DroneState state = DroneState::Idle;
};

struct UtilizationWindow {
    std::int64_t start = 0;
    std::int64_t end = 0;
    std::int64_t cumulative_dispatches = 0;  // re-dispatches count again
    double busy_seconds = 0.0;               // summed active time of all drones
    double mean_utilization = 0.0;
    double max_utilization = 0.0;
};

/// Windows of `window_s` seconds tiling [0, horizon). Drones start Idle.
/// `fleet_size` is the denominator for the mean.
std::vector<UtilizationWindow> utilization_series(std::span<const StateChange> log, std::int64_t window_s,
                                                  std::int64_t horizon, int fleet_size);

/// Drones whose most recent state at or before t is neither Idle nor Recalled.
int drones_in_use(std::span<const StateChange> log, std::int64_t t);

}  // namespace swarmzones
