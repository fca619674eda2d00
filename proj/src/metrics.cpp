#include "swarmzones/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <queue>
#include <string>

#include "swarmzones/error.hpp"

namespace swarmzones {

double throughput(const LinkSample& s) {
    if (!(s.ber >= 0.0 && s.ber <= 1.0)) throw Error(ErrorCode::InvalidArgument, "ber must lie in [0, 1]");
    if (!(s.transmission_time > 0.0)) throw Error(ErrorCode::InvalidArgument, "transmission time must be > 0");
    return kPacketBytes * 8.0 * s.packets_success * (1.0 - s.ber) / s.transmission_time;
}

Rational Rational::of(std::int64_t p, std::int64_t q) {
    if (q == 0) throw Error(ErrorCode::InvalidArgument, "zero denominator");
    if (q < 0) {
        p = -p;
        q = -q;
    }
    const std::int64_t g = std::gcd(p < 0 ? -p : p, q);
    return {p / (g ? g : 1), q / (g ? g : 1)};
}

Rational throughput_exact(std::int64_t packets_success, Rational ber, Rational transmission_time) {
    // (8*256*N) * (q_b - p_b)/q_b / (p_t/q_t)
    const __int128 num = static_cast<__int128>(kPacketBytes) * 8 * packets_success * (ber.q - ber.p) * transmission_time.q;
    const __int128 den = static_cast<__int128>(ber.q) * transmission_time.p;
    __int128 a = num < 0 ? -num : num;
    __int128 b = den;
    while (b != 0) {
        const __int128 t = a % b;
        a = b;
        b = t;
    }
    return Rational::of(static_cast<std::int64_t>(num / a), static_cast<std::int64_t>(den / a));
}

void SignalTimeModel::validate() const {
    if (!(min <= mode && mode <= max)) throw Error(ErrorCode::InvalidArgument, "need min <= mode <= max");
}

double SignalTimeModel::stddev() const noexcept {
    const double v = (min * min + mode * mode + max * max - min * mode - min * max - mode * max) / 18.0;
    return std::sqrt(v);
}

double sample_signal_time(const SignalTimeModel& m, Rng& rng) {
    m.validate();
    if (m.max == m.min) return m.min;
    const double u = rng.uniform01();
    const double width = m.max - m.min;
    const double fc = (m.mode - m.min) / width;
    if (u < fc) return m.min + std::sqrt(u * width * (m.mode - m.min));
    return m.max - std::sqrt((1.0 - u) * width * (m.max - m.mode));
}

double triangular_cdf(const SignalTimeModel& m, double x) {
    if (x <= m.min) return 0.0;
    if (x >= m.max) return 1.0;
    const double width = m.max - m.min;
    if (x <= m.mode) return (x - m.min) * (x - m.min) / (width * (m.mode - m.min));
    return 1.0 - (m.max - x) * (m.max - x) / (width * (m.max - m.mode));
}

int CoverageModel::servers_for(int drones) const noexcept {
    if (depot_servers > 0) return depot_servers;
    const int per = std::max(1, drones_per_server);
    return std::max(1, (drones + per - 1) / per);
}

double coverage_time(double total_km, int drones, const CoverageModel& cm) {
    if (!(total_km > 0.0)) throw Error(ErrorCode::InvalidArgument, "total distance must be > 0");
    if (drones < 1) throw Error(ErrorCode::InvalidArgument, "need at least one drone");
    if (!(cm.per_drone_rate > 0.0 && cm.sortie_minutes > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "rate and sortie length must be > 0");
    }
    double remaining = total_km / cm.per_drone_rate;  // minutes of work
    const double service = cm.refill_time + cm.recharge_time;

    // Events: (time, drone) ready to start a sortie, or arriving at the depot.
    enum class Kind { Ready, AtDepot };
    struct Ev {
        double t;
        int drone;
        Kind kind;
        bool operator>(const Ev& o) const { return t != o.t ? t > o.t : drone > o.drone; }
    };
    std::priority_queue<Ev, std::vector<Ev>, std::greater<>> events;
    for (int d = 0; d < drones; ++d) events.push({0.0, d, Kind::Ready});
    std::vector<double> server_free(static_cast<std::size_t>(cm.servers_for(drones)), 0.0);
    double makespan = 0.0;

    while (!events.empty() && remaining > 0.0) {
        const Ev ev = events.top();
        events.pop();
        if (ev.kind == Kind::Ready) {
            const double work = std::min(cm.sortie_minutes, remaining);
            remaining -= work;
            const double done = ev.t + work;
            makespan = std::max(makespan, done);
            if (remaining > 0.0) events.push({done + cm.transit_time, ev.drone, Kind::AtDepot});
        } else {
            auto it = std::min_element(server_free.begin(), server_free.end());
            const double start = std::max(ev.t, *it);
            *it = start + service;
            events.push({*it + cm.transit_time, ev.drone, Kind::Ready});
        }
    }
    // Drones already in flight keep working; remaining work was assigned as
    // sorties were launched, so the makespan is the last sortie's end.
    return makespan;
}

CoverageModel calibrate_coverage(double total_km, int drones, double target_minutes, CoverageModel cm) {
    double lo = 1e-6;
    double hi = 1e3;
    for (int i = 0; i < 200; ++i) {
        const double mid = std::sqrt(lo * hi);
        cm.per_drone_rate = mid;
        if (coverage_time(total_km, drones, cm) > target_minutes) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    cm.per_drone_rate = hi;
    return cm;
}

std::vector<UtilizationWindow> utilization_series(std::span<const StateChange> log, std::int64_t window_s,
                                                  std::int64_t horizon, int fleet_size) {
    if (window_s <= 0 || horizon <= 0) throw Error(ErrorCode::InvalidArgument, "window and horizon must be > 0");
    const std::int64_t count = (horizon + window_s - 1) / window_s;
    std::vector<UtilizationWindow> out(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i) {
        out[i].start = i * window_s;
        out[i].end = std::min(horizon, (i + 1) * window_s);
    }
    std::vector<std::map<DroneId, double>> busy(out.size());
    std::vector<std::int64_t> dispatches(out.size(), 0);

    auto add_busy = [&](DroneId d, std::int64_t a, std::int64_t b) {
        a = std::max<std::int64_t>(a, 0);
        b = std::min(b, horizon);
        for (std::int64_t w = a / window_s; a < b; ++w) {
            const std::int64_t stop = std::min(b, (w + 1) * window_s);
            busy[w][d] += static_cast<double>(stop - a);
            a = stop;
        }
    };

    std::map<DroneId, StateChange> current;
    for (const auto& e : log) {
        auto it = current.find(e.drone);
        const DroneState prev = it == current.end() ? DroneState::Idle : it->second.state;
        if (it != current.end() && is_active(prev)) add_busy(e.drone, it->second.t, e.t);
        if (!is_in_use(prev) && is_in_use(e.state) && e.t >= 0 && e.t < horizon) ++dispatches[e.t / window_s];
        current[e.drone] = e;
    }
    for (const auto& [d, e] : current) {
        if (is_active(e.state)) add_busy(d, e.t, horizon);
    }

    std::int64_t running = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        running += dispatches[i];
        out[i].cumulative_dispatches = running;
        const double len = static_cast<double>(out[i].end - out[i].start);
        double sum = 0.0;
        for (const auto& [d, s] : busy[i]) {
            sum += s;
            out[i].max_utilization = std::max(out[i].max_utilization, s / len);
        }
        out[i].busy_seconds = sum;
        out[i].mean_utilization = fleet_size > 0 ? sum / (len * fleet_size) : 0.0;
    }
    return out;
}

int drones_in_use(std::span<const StateChange> log, std::int64_t t) {
    std::map<DroneId, DroneState> latest;
    for (const auto& e : log) {
        if (e.t > t) continue;
        latest[e.drone] = e.state;
    }
    return static_cast<int>(std::count_if(latest.begin(), latest.end(),
                                          [](const auto& kv) { return is_in_use(kv.second); }));
}

}  // namespace swarmzones
