#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "swarmzones/fleet.hpp"
#include "swarmzones/zone_grid.hpp"

namespace swarmzones {

enum class SensorSource { Thermal, Wearable };

struct PersonObservation {
    int person = 0;
    ZoneId zone;
    std::int64_t timestamp = 0;
    double temperature = 0.0;  // degrees C
    SensorSource source = SensorSource::Thermal;
};

/// Ground-truth person used by the scan loop. `history` accumulates the
/// readings taken so far.
struct Person {
    int id = 0;
    double x = 0.0;
    double y = 0.0;
    double temperature = 37.0;
    SensorSource source = SensorSource::Thermal;
    std::vector<std::pair<std::int64_t, double>> history;
};

enum class ActionKind { FeverAlarm, Sanitize, Medicate };

struct ZoneAction {
    int person = 0;
    ActionKind kind = ActionKind::Sanitize;
};

struct ScanConfig {
    double normal_temperature = 37.0;
    int trend_rises = 2;
    bool doubling_interval = false;  // literal reading of the interval update
};

struct ScanClock {
    std::int64_t tick = 0;
    std::int64_t interval = 60;
};

void advance_scan_clock(ScanClock& clock, bool doubling) noexcept;

struct ScanResult {
    std::vector<PersonObservation> observations;
    std::vector<ZoneAction> actions;
};

/// One scan of `zone`: observes every person inside it, appends to their
/// histories, applies the trend and alarm rules, then advances the clock.
/// Throws DroneAbsent unless the drone is Scanning inside the zone.
ScanResult scan_cycle(const ZoneId& zone, const Drone& drone, std::span<Person> persons, const GridSpec& g,
                      ScanClock& clock, const ScanConfig& cfg = {});

struct TrendResult {
    bool rising = false;
    bool insufficient_data = false;
};

/// Rising iff the last k successive differences are all strictly positive.
TrendResult fever_trend(std::span<const std::pair<std::int64_t, double>> series, int k = 2);

/// t >= normal + 2. Throws SensorRange outside [25, 45].
bool fever_alarm(double t, double normal = 37.0);

struct QosVector {
    double mean_signal_time = 0.0;  // s
    double throughput = 0.0;        // bit/s
    double coverage_fraction = 0.0;
};

struct ExperienceCounters {
    std::int64_t persons_scanned = 0;
    std::int64_t fever_alarms = 0;
    std::int64_t sanitizations = 0;
    std::int64_t medications = 0;

    ExperienceCounters& operator+=(const ExperienceCounters& o) noexcept;
    friend bool operator==(const ExperienceCounters&, const ExperienceCounters&) = default;
};

struct Window {
    std::int64_t start = 0;
    std::int64_t end = 0;  // exclusive

    bool contains(std::int64_t t) const noexcept { return t >= start && t < end; }
    friend bool operator==(const Window&, const Window&) = default;
};

struct ZoneStats {
    ZoneId zone;
    int network = 0;
    QosVector qos;
    ExperienceCounters experience;
    Window window;
};

enum class OpsKind { Scan, FeverAlarm, Sanitize, Medicate, Visit, SignalTime, Throughput };

/// Zone-level activity extracted from the event log.
struct OpsRecord {
    std::int64_t tick = 0;
    ZoneId zone;
    OpsKind kind = OpsKind::Scan;
    double value = 0.0;  // seconds for SignalTime, bit/s for Throughput
};

/// Tallies `records` inside the window. Coverage is the fraction of zones on
/// the zone's layer that received a Visit. Throws EmptyWindow when start >= end.
ZoneStats compute_zone_stats(const ZoneId& zone, int network, const Window& window,
                             std::span<const OpsRecord> records, const GridSpec& g);

struct NetworkSummary {
    int network = 0;
    Window window;
    QosVector qos;                 // componentwise mean
    ExperienceCounters experience; // componentwise sum
    std::vector<ZoneStats> zones;  // inputs, kept per zone
};

/// Throws MixedNetworks, MixedWindows, or InvalidArgument for an empty input.
NetworkSummary edge_aggregate(std::span<const ZoneStats> stats);

struct PresenceSample {
    std::int64_t tick = 0;
    ZoneId zone;
};

struct DensityMap {
    int n = 0;
    int layer = 0;
    std::vector<std::int64_t> counts;  // row-major n x n

    std::int64_t at(int row, int col) const { return counts.at(static_cast<std::size_t>(row * n + col)); }
    std::int64_t total() const noexcept;
};

/// Per-zone count of samples on `layer` inside the window.
DensityMap density_map(std::span<const PresenceSample> samples, const Window& window, const GridSpec& g, int layer);

/// Zones by descending count, ties by zone value.
std::vector<ZoneId> sanitization_priority(const DensityMap& dm);

}  // namespace swarmzones
