#include "swarmzones/ped_flow.hpp"

#include <algorithm>
#include <cmath>

#include "swarmzones/error.hpp"
#include "swarmzones/social_distancing.hpp"

namespace swarmzones {

namespace {

void require(bool ok, const char* field, const char* rule) {
    if (!ok) throw Error(ErrorCode::ValidationError, std::string("ped_flow.") + field + ": " + rule);
}

double service_time(const PedFlowSpec& s, Rng& rng) {
    if (s.service_kind == ServiceTimeKind::Fixed) return s.service_time_max_s;
    return std::min(rng.exponential(s.service_time_mean_s), s.service_time_max_s);
}

void note(EventLog* log, std::int64_t tick, const Pedestrian& p, const char* kind) {
    if (log) log->append(tick, EntityKind::Person, p.id, kind);
}

// Marks the rear member of every consecutive pair closer than the spacing.
void sweep_queue(const PedFlowSpec& spec, std::deque<Pedestrian>& queue) {
    std::vector<QueuePerson> line;
    line.reserve(queue.size());
    double x = 0.0;
    for (const auto& p : queue) {
        x += p.gap;
        QueuePerson q;
        q.id = static_cast<int>(p.id);
        q.position = Position{x, 0.0, 0};
        line.push_back(q);
    }
    for (const auto& v : detect_violations(line, DistanceMethod::Planar, spec.wait_spacing, CrowdMode::Queue)) {
        queue[v.second].flagged = true;
    }
}

}  // namespace

void PedFlowSpec::validate() const {
    require(arrival_rate >= 0.0 && std::isfinite(arrival_rate), "arrival_rate", "must be >= 0");
    require(gate_capacity >= 1, "gate_capacity", "must be >= 1");
    require(walk_min_s > 0.0 && walk_max_s >= walk_min_s, "walk_max_s", "need 0 < walk_min_s <= walk_max_s");
    require(wait_spacing > 0.0, "wait_spacing", "must be > 0");
    require(gap_min > 0.0 && gap_max >= gap_min, "gap_max", "need 0 < gap_min <= gap_max");
    require(check_interval_s >= 1, "check_interval_s", "must be >= 1");
    require(medicine_fraction >= 0.0 && medicine_fraction <= 1.0, "medicine_fraction", "must lie in [0, 1]");
    require(service_units >= 1, "service_units", "must be >= 1");
    require(supply_points >= 0, "supply_points", "must be >= 0");
    require(service_time_mean_s > 0.0, "service_time_mean_s", "must be > 0");
    require(service_time_max_s > 0.0, "service_time_max_s", "must be > 0");
}

void ped_flow_step(const PedFlowSpec& spec, PedFlowState& st, Rng& rng, EventLog* log) {
    const std::int64_t now = st.tick;
    auto& c = st.counters;

    // pedSource
    const std::int64_t born = rng.poisson(spec.arrival_rate / 60.0);
    for (std::int64_t i = 0; i < born; ++i) {
        Pedestrian p;
        p.id = c.arrivals++;
        p.arrived = now;
        p.needs_medicine = rng.bernoulli(spec.medicine_fraction);
        note(log, now, p, "ped_arrive");
        st.gate.push_back(p);
    }

    // atFareGates, pedGoTo
    while (!st.gate.empty() && static_cast<int>(st.walking.size()) < spec.gate_capacity) {
        Pedestrian p = st.gate.front();
        st.gate.pop_front();
        p.ready_at = now + static_cast<std::int64_t>(std::llround(rng.uniform(spec.walk_min_s, spec.walk_max_s)));
        ++c.admitted;
        st.walking.push_back(p);
    }

    // Drones check everyone reaching the queue area.
    std::vector<Pedestrian> still;
    still.reserve(st.walking.size());
    for (auto& p : st.walking) {
        if (p.ready_at > now) {
            still.push_back(p);
            continue;
        }
        ++c.checked;
        note(log, now, p, "ped_checked");
        if (p.needs_medicine && spec.supply_points > 0) {
            p.gap = rng.uniform(spec.gap_min, spec.gap_max);
            st.queue.push_back(p);
        } else {
            ++c.sunk;
            note(log, now, p, "ped_sink");
        }
    }
    st.walking.swap(still);

    if (now % spec.check_interval_s == 0) sweep_queue(spec, st.queue);

    // pedService completions, pedSink
    auto done = std::stable_partition(st.in_service.begin(), st.in_service.end(),
                                      [&](const Pedestrian& p) { return p.ready_at > now; });
    for (auto it = done; it != st.in_service.end(); ++it) {
        ++c.served;
        ++c.sunk;
        if (log) log->append(now, EntityKind::Person, it->id, "ped_sink", {{"served", "1"}});
    }
    st.in_service.erase(done, st.in_service.end());

    // Violators at the head return to the tail; each person is looked at once per tick.
    std::size_t looked = 0;
    const std::size_t limit = st.queue.size();
    while (!st.queue.empty() && static_cast<int>(st.in_service.size()) < spec.total_units() && looked < limit) {
        Pedestrian p = st.queue.front();
        st.queue.pop_front();
        ++looked;
        if (p.flagged) {
            p.flagged = false;
            p.gap = rng.uniform(spec.gap_min, spec.gap_max);
            ++c.requeued;
            note(log, now, p, "ped_requeue");
            st.queue.push_back(p);
            continue;
        }
        p.ready_at = now + std::max<std::int64_t>(1, std::llround(service_time(spec, rng)));
        note(log, now, p, "ped_service");
        st.in_service.push_back(p);
    }
    ++st.tick;
}

std::int64_t medicine_service_count(const EventLog& log) {
    return std::count_if(log.events().begin(), log.events().end(),
                         [](const SimEvent& e) { return e.kind == "ped_sink" && e.field("served") == "1"; });
}

}  // namespace swarmzones
