#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "swarmzones/error.hpp"
#include "swarmzones/event_log.hpp"
#include "swarmzones/fleet.hpp"
#include "swarmzones/metrics.hpp"
#include "swarmzones/ped_flow.hpp"
#include "swarmzones/social_distancing.hpp"
#include "swarmzones/transfer.hpp"
#include "swarmzones/zone_ops.hpp"

namespace swarmzones {

struct PersonsConfig {
    int count = 0;
    double step_m = 0.7;          // per tick
    int sample_interval_s = 60;   // presence sampling for density maps
    double fever_fraction = 0.02;
    double fever_rise_per_min = 0.02;
    int hotspots = 0;             // attractors that make density uneven
    double hotspot_pull = 0.0;    // probability a step heads to the nearest hotspot
};

struct OpsConfig {
    int scan_interval_s = 60;
    ScanConfig scan;
    int sanitize_duration_s = 120;
    int sanitize_interval_s = 900;  // density-driven sanitization round
    int sanitize_top_zones = 3;
    int networks = 1;               // edge networks; zone ordinal mod networks
};

struct MissionConfig {
    int target_in_use = -1;        // -1: dispatch every available drone
    int control_interval_s = 60;
    double utilization_lower = 0.2;
    double utilization_upper = 0.8;
    double return_margin = 0.05;   // head home this far above the battery floor
    double tank_reserve_l = 0.4;
    int recall_rest_s = 600;
    /// Drones launched at t = 0 start part-way through a sortie, battery
    /// uniform above the return threshold, so the fleet does not cycle in lockstep.
    bool warm_start = true;
};

struct StrategyConfig {
    Strategy kind = Strategy::FixedArea;
    std::vector<HybridLevel> levels;  // Hybrid only
    int swap_interval_s = 300;
    int timeout_ticks = 20;
    int rotation_interval = 8;       // protocol ticks between sweep rotations
};

struct LinkConfig {
    bool enabled = false;
    SignalTimeModel signal;
    int interval_s = 30;
    double peak_mbps = 80.0;
    double decay_m = 3000.0;          // distance attenuation scale to the ground station
    double contention_drones = 200.0; // shared-channel scale
    double success_min = 0.7;
    double success_max = 1.0;
    double ber_max = 0.02;
    double transmission_time_s = 1.0;
};

struct PedFlowConfig {
    bool enabled = false;
    PedFlowSpec spec;                    // arrival_rate and supply_points derived from the fleet
    double arrival_rate_per_drone = 21.3;
    int monitor_drones = 2;              // drones that only watch; the rest carry medicine
    int gate_capacity_per_drone = 13;    // added to spec.gate_capacity for every drone
};

struct DistancingConfig {
    double threshold_m = 1.0;
    DistanceMethod method = DistanceMethod::Planar;
};

struct Scenario {
    std::string name = "Custom";
    GridSpec grid{4, 50.0, 1};
    int drones = 0;
    FleetDefaults fleet;
    MissionConfig mission;
    StrategyConfig strategy;
    PersonsConfig persons;
    OpsConfig ops;
    LinkConfig link;
    PedFlowConfig ped;
    DistancingConfig distancing;
    std::int64_t duration = 3600;  // ticks of one second
    std::uint64_t seed = 42;
    int metrics_window_s = 3600;
};

struct FieldError {
    std::string path;
    ErrorCode code = ErrorCode::ValidationError;
    std::string message;
};

/// Cross-field checks; never throws.
std::vector<FieldError> validate(const Scenario& s);

/// Parses a scenario document. Unknown keys and type mismatches are
/// reported with their field path. Throws Error{ValidationError} carrying
/// every problem, one per line.
Scenario scenario_from_json(std::string_view text);
std::string scenario_to_json(const Scenario& s);

/// FNV-1a of the canonical JSON form, as 16 hex digits.
std::string scenario_hash(const Scenario& s);

/// Arrival rate, gate capacity and supply points for the pedestrian pipeline of `s`.
PedFlowSpec effective_ped_spec(const Scenario& s);

struct WindowMetrics {
    std::int64_t start = 0;
    std::int64_t end = 0;
    int in_use_min = 0;
    int in_use_max = 0;
    double in_use_mean = 0.0;
    double utilization_mean = 0.0;
    double utilization_max = 0.0;
    std::int64_t cumulative_dispatches = 0;
    double throughput_mean_bps = 0.0;
    double signal_mean_s = 0.0;
    std::int64_t persons_checked = 0;  // cumulative
    std::int64_t persons_served = 0;   // cumulative
};

struct RunSummary {
    double throughput_mean_bps = 0.0;
    std::int64_t throughput_samples = 0;
    double signal_mean_s = 0.0;
    std::int64_t signal_samples = 0;
    int in_use_min = 0;  // over ticks >= 1
    int in_use_max = 0;
    double in_use_mean = 0.0;
    double utilization_max = 0.0;
    std::int64_t dispatches = 0;
    std::int64_t transfers_done = 0;
    std::int64_t transfers_aborted = 0;
    std::int64_t ledger_checks = 0;
    std::int64_t ledger_violations = 0;
    PedFlowCounters ped;
    bool ped_conserved = true;
    std::int64_t violations_detected = 0;
};

struct RunResult {
    std::string scenario_hash;
    std::uint64_t seed = 0;
    EventLog log;
    std::vector<WindowMetrics> windows;
    std::vector<UtilizationWindow> utilization;
    DensityMap density;
    std::vector<ZoneStats> zone_stats;
    std::vector<NetworkSummary> networks;
    RunSummary summary;
};

/// Runs the scenario to completion. Throws Error{ValidationError} listing
/// every field error when the scenario does not validate.
RunResult run(const Scenario& s);

/// State changes recovered from a run's event log.
std::vector<StateChange> state_changes(const EventLog& log);

// Exports. Every CSV row and the first NDJSON record carry (scenario hash, seed).
std::string events_csv(const RunResult& r);
std::string events_ndjson(const RunResult& r);
std::string metrics_csv(const RunResult& r);
std::string density_csv(const RunResult& r);
std::string zone_stats_csv(const RunResult& r);

}  // namespace swarmzones
