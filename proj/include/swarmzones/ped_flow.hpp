#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "swarmzones/event_log.hpp"
#include "swarmzones/rng.hpp"

namespace swarmzones {

enum class ServiceTimeKind { Fixed, TruncatedExponential };

/// Source -> fare gates -> walk -> spaced queue -> service -> sink, one tick
/// per second.
struct PedFlowSpec {
    double arrival_rate = 60.0;      // persons per minute
    int gate_capacity = 660;         // persons walking between gate and queue
    double walk_min_s = 60.0;
    double walk_max_s = 180.0;
    double wait_spacing = 1.0;       // metres
    double gap_min = 0.6;            // metres; stand-off drawn uniformly
    double gap_max = 2.4;
    int check_interval_s = 10;       // queue distancing sweep period
    double medicine_fraction = 0.8;  // checked persons who need a medicine
    int service_units = 10;          // parallel units per supply point
    int supply_points = 1;
    ServiceTimeKind service_kind = ServiceTimeKind::TruncatedExponential;
    double service_time_mean_s = 20.0;
    double service_time_max_s = 120.0;

    /// Throws ValidationError naming the offending field.
    void validate() const;
    int total_units() const noexcept { return service_units * supply_points; }
};

struct Pedestrian {
    std::int64_t id = 0;
    std::int64_t arrived = 0;
    std::int64_t ready_at = 0;  // walk end or service end
    double gap = 0.0;           // distance to the person ahead in the queue
    bool needs_medicine = false;
    bool flagged = false;
};

struct PedFlowCounters {
    std::int64_t arrivals = 0;
    std::int64_t admitted = 0;
    std::int64_t checked = 0;
    std::int64_t requeued = 0;
    std::int64_t served = 0;
    std::int64_t sunk = 0;
};

struct PedFlowState {
    std::int64_t tick = 0;
    std::deque<Pedestrian> gate;
    std::vector<Pedestrian> walking;
    std::deque<Pedestrian> queue;
    std::vector<Pedestrian> in_service;
    PedFlowCounters counters;

    std::int64_t in_system() const noexcept {
        return static_cast<std::int64_t>(gate.size() + walking.size() + queue.size() + in_service.size());
    }
};

/// Advances the pipeline by one tick. Violators found by the queue sweep go
/// back to the tail instead of being served. Appends person events to `log`
/// when given.
void ped_flow_step(const PedFlowSpec& spec, PedFlowState& state, Rng& rng, EventLog* log = nullptr);

/// Persons that reached the sink after service.
std::int64_t medicine_service_count(const EventLog& log);

}  // namespace swarmzones
