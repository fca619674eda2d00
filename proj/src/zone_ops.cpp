#include "swarmzones/zone_ops.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "swarmzones/error.hpp"

namespace swarmzones {

void advance_scan_clock(ScanClock& clock, bool doubling) noexcept {
    if (doubling) clock.interval *= 2;
    clock.tick += clock.interval;
}

ScanResult scan_cycle(const ZoneId& zone, const Drone& drone, std::span<Person> persons, const GridSpec& g,
                      ScanClock& clock, const ScanConfig& cfg) {
    if (drone.state != DroneState::Scanning || zone_of_position(drone.position, g) != zone) {
        throw Error(ErrorCode::DroneAbsent, "drone " + std::to_string(drone.id) + " is not scanning its zone");
    }
    ScanResult out;
    for (auto& p : persons) {
        if (zone_of_position(Position{p.x, p.y, zone.layer}, g) != zone) continue;
        out.observations.push_back({p.id, zone, clock.tick, p.temperature, p.source});
        p.history.emplace_back(clock.tick, p.temperature);
        const bool alarm = fever_alarm(p.temperature, cfg.normal_temperature);
        const bool rising = fever_trend(p.history, cfg.trend_rises).rising;
        if (alarm) out.actions.push_back({p.id, ActionKind::FeverAlarm});
        if (alarm || rising) {
            out.actions.push_back({p.id, ActionKind::Sanitize});
            out.actions.push_back({p.id, ActionKind::Medicate});
        }
    }
    advance_scan_clock(clock, cfg.doubling_interval);
    return out;
}

TrendResult fever_trend(std::span<const std::pair<std::int64_t, double>> series, int k) {
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
    if (series.size() < static_cast<std::size_t>(k) + 1) return {false, true};
    const std::size_t last = series.size() - 1;
    for (int i = 0; i < k; ++i) {
        if (!(series[last - i].second > series[last - i - 1].second)) return {false, false};
    }
    return {true, false};
}

bool fever_alarm(double t, double normal) {
    if (!(t >= 25.0 && t <= 45.0)) {
        throw Error(ErrorCode::SensorRange, "reading " + std::to_string(t) + " C outside [25, 45]");
    }
    return t >= normal + 2.0;
}

ExperienceCounters& ExperienceCounters::operator+=(const ExperienceCounters& o) noexcept {
    persons_scanned += o.persons_scanned;
    fever_alarms += o.fever_alarms;
    sanitizations += o.sanitizations;
    medications += o.medications;
    return *this;
}

ZoneStats compute_zone_stats(const ZoneId& zone, int network, const Window& window,
                             std::span<const OpsRecord> records, const GridSpec& g) {
    if (window.start >= window.end) throw Error(ErrorCode::EmptyWindow, "window start must precede end");
    ZoneStats st{zone, network, {}, {}, window};
    double signal_sum = 0.0;
    double rate_sum = 0.0;
    std::int64_t signals = 0;
    std::int64_t rates = 0;
    std::set<std::pair<int, int>> visited;
    for (const auto& r : records) {
        if (!window.contains(r.tick)) continue;
        if (r.kind == OpsKind::Visit) {
            if (r.zone.layer == zone.layer) visited.emplace(r.zone.row, r.zone.col);
            continue;
        }
        if (r.zone != zone) continue;
        switch (r.kind) {
            case OpsKind::Scan: ++st.experience.persons_scanned; break;
            case OpsKind::FeverAlarm: ++st.experience.fever_alarms; break;
            case OpsKind::Sanitize: ++st.experience.sanitizations; break;
            case OpsKind::Medicate: ++st.experience.medications; break;
            case OpsKind::SignalTime:
                signal_sum += r.value;
                ++signals;
                break;
            case OpsKind::Throughput:
                rate_sum += r.value;
                ++rates;
                break;
            case OpsKind::Visit: break;
        }
    }
    st.qos.mean_signal_time = signals ? signal_sum / static_cast<double>(signals) : 0.0;
    st.qos.throughput = rates ? rate_sum / static_cast<double>(rates) : 0.0;
    st.qos.coverage_fraction = static_cast<double>(visited.size()) / g.zones_per_layer();
    return st;
}

NetworkSummary edge_aggregate(std::span<const ZoneStats> stats) {
    if (stats.empty()) throw Error(ErrorCode::InvalidArgument, "nothing to aggregate");
    NetworkSummary out;
    out.network = stats.front().network;
    out.window = stats.front().window;
    double sig = 0.0, thr = 0.0, cov = 0.0;
    for (const auto& s : stats) {
        if (s.network != out.network) throw Error(ErrorCode::MixedNetworks, "stats span several networks");
        if (s.window != out.window) throw Error(ErrorCode::MixedWindows, "stats span several windows");
        sig += s.qos.mean_signal_time;
        thr += s.qos.throughput;
        cov += s.qos.coverage_fraction;
        out.experience += s.experience;
    }
    const auto k = static_cast<double>(stats.size());
    out.qos = {sig / k, thr / k, cov / k};
    out.zones.assign(stats.begin(), stats.end());
    return out;
}

std::int64_t DensityMap::total() const noexcept {
    std::int64_t t = 0;
    for (auto c : counts) t += c;
    return t;
}

DensityMap density_map(std::span<const PresenceSample> samples, const Window& window, const GridSpec& g, int layer) {
    DensityMap dm{g.n, layer, std::vector<std::int64_t>(static_cast<std::size_t>(g.n * g.n), 0)};
    for (const auto& s : samples) {
        if (!window.contains(s.tick) || s.zone.layer != layer || !is_valid(s.zone, g)) continue;
        ++dm.counts[static_cast<std::size_t>(s.zone.row * g.n + s.zone.col)];
    }
    return dm;
}

std::vector<ZoneId> sanitization_priority(const DensityMap& dm) {
    std::vector<ZoneId> zones;
    zones.reserve(dm.counts.size());
    for (int r = 0; r < dm.n; ++r)
        for (int c = 0; c < dm.n; ++c) zones.push_back({r, c, dm.layer});
    std::stable_sort(zones.begin(), zones.end(), [&](const ZoneId& a, const ZoneId& b) {
        const auto ca = dm.at(a.row, a.col);
        const auto cb = dm.at(b.row, b.col);
        if (ca != cb) return ca > cb;
        return drone_zone_value(a.row, a.col, dm.n) < drone_zone_value(b.row, b.col, dm.n);
    });
    return zones;
}

}  // namespace swarmzones
