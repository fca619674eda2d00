#include "swarmzones/sim_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "json.hpp"
#include "swarmzones/error.hpp"

namespace swarmzones {

namespace {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Names

constexpr std::pair<DistanceMethod, const char*> kMethods[] = {
    {DistanceMethod::TunnelChord, "TunnelChord"},
    {DistanceMethod::FlatLatLon, "FlatLatLon"},
    {DistanceMethod::GroundSampleDistance, "GroundSampleDistance"},
    {DistanceMethod::PixelRatio, "PixelRatio"},
    {DistanceMethod::Planar, "Planar"},
};

const char* method_name(DistanceMethod m) {
    for (const auto& [k, v] : kMethods) {
        if (k == m) return v;
    }
    return "Planar";
}

std::optional<DistanceMethod> method_from(std::string_view s) {
    for (const auto& [k, v] : kMethods) {
        if (s == v) return k;
    }
    return std::nullopt;
}

const char* service_name(ServiceTimeKind k) {
    return k == ServiceTimeKind::Fixed ? "Fixed" : "TruncatedExponential";
}

// ---------------------------------------------------------------------------
// JSON reading with field paths

class Reader {
public:
    explicit Reader(std::vector<FieldError>& errs) : errs_(errs) {}

    void fail(const std::string& path, const std::string& msg, ErrorCode code = ErrorCode::ValidationError) {
        errs_.push_back({path, code, msg});
    }

    bool object(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
        if (!j.is_object()) {
            fail(path, "expected an object");
            return false;
        }
        for (const auto& [k, v] : j.items()) {
            if (std::find_if(keys.begin(), keys.end(), [&](const char* a) { return k == a; }) == keys.end()) {
                fail(join(path, k), "unknown field");
            }
        }
        return true;
    }

    template <class T>
    void get(const json& j, const std::string& path, const char* key, T& out) {
        if (!j.contains(key)) return;
        const json& v = j.at(key);
        const std::string p = join(path, key);
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) return fail(p, "expected a boolean");
            out = v.get<bool>();
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) return fail(p, "expected an integer");
            if constexpr (std::is_unsigned_v<T>) {
                if (v.is_number_unsigned()) {
                    out = static_cast<T>(v.get<std::uint64_t>());
                } else if (v.get<std::int64_t>() < 0) {
                    fail(p, "must be >= 0");
                } else {
                    out = static_cast<T>(v.get<std::int64_t>());
                }
            } else {
                out = static_cast<T>(v.get<std::int64_t>());
            }
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) return fail(p, "expected a number");
            out = v.get<double>();
        } else {
            if (!v.is_string()) return fail(p, "expected a string");
            out = v.get<std::string>();
        }
    }

    static std::string join(const std::string& path, std::string_view key) {
        return path.empty() ? std::string(key) : path + "." + std::string(key);
    }

private:
    std::vector<FieldError>& errs_;
};

Strategy read_strategy(Reader& r, const json& j, const std::string& path, const char* key, Strategy fallback) {
    std::string s(to_string(fallback));
    r.get(j, path, key, s);
    if (auto st = strategy_from_string(s)) return *st;
    r.fail(Reader::join(path, key), "unknown strategy '" + s + "'");
    return fallback;
}

void read_scenario(Reader& r, const json& j, Scenario& s) {
    if (!r.object(j, "", {"name", "seed", "duration", "drones", "metrics_window_s", "grid", "fleet", "mission",
                          "strategy", "persons", "ops", "link", "ped_flow", "distancing"})) {
        return;
    }
    r.get(j, "", "name", s.name);
    r.get(j, "", "seed", s.seed);
    r.get(j, "", "duration", s.duration);
    r.get(j, "", "drones", s.drones);
    r.get(j, "", "metrics_window_s", s.metrics_window_s);

    if (j.contains("grid") && r.object(j["grid"], "grid", {"n", "tau", "layers", "band_fraction"})) {
        const auto& g = j["grid"];
        r.get(g, "grid", "n", s.grid.n);
        r.get(g, "grid", "tau", s.grid.tau);
        r.get(g, "grid", "layers", s.grid.layers);
        r.get(g, "grid", "band_fraction", s.grid.band_fraction);
    }
    if (j.contains("fleet") &&
        r.object(j["fleet"], "fleet",
                 {"speed_mps", "scan_flight_time_s", "spray_flight_time_s", "tank_liters", "spray_rate_lpm",
                  "battery_floor", "tank_floor", "recharge_time_s", "refill_time_s"})) {
        const auto& f = j["fleet"];
        r.get(f, "fleet", "speed_mps", s.fleet.speed_mps);
        r.get(f, "fleet", "scan_flight_time_s", s.fleet.scan_flight_time_s);
        r.get(f, "fleet", "spray_flight_time_s", s.fleet.spray_flight_time_s);
        r.get(f, "fleet", "tank_liters", s.fleet.tank_liters);
        r.get(f, "fleet", "spray_rate_lpm", s.fleet.spray_rate_lpm);
        r.get(f, "fleet", "battery_floor", s.fleet.battery_floor);
        r.get(f, "fleet", "tank_floor", s.fleet.tank_floor);
        r.get(f, "fleet", "recharge_time_s", s.fleet.recharge_time_s);
        r.get(f, "fleet", "refill_time_s", s.fleet.refill_time_s);
    }
    if (j.contains("mission") &&
        r.object(j["mission"], "mission",
                 {"target_in_use", "control_interval_s", "utilization_lower", "utilization_upper", "return_margin",
                  "tank_reserve_l", "recall_rest_s", "warm_start"})) {
        const auto& m = j["mission"];
        r.get(m, "mission", "target_in_use", s.mission.target_in_use);
        r.get(m, "mission", "control_interval_s", s.mission.control_interval_s);
        r.get(m, "mission", "utilization_lower", s.mission.utilization_lower);
        r.get(m, "mission", "utilization_upper", s.mission.utilization_upper);
        r.get(m, "mission", "return_margin", s.mission.return_margin);
        r.get(m, "mission", "tank_reserve_l", s.mission.tank_reserve_l);
        r.get(m, "mission", "recall_rest_s", s.mission.recall_rest_s);
        r.get(m, "mission", "warm_start", s.mission.warm_start);
    }
    if (j.contains("strategy") &&
        r.object(j["strategy"], "strategy",
                 {"kind", "levels", "swap_interval_s", "timeout_ticks", "rotation_interval"})) {
        const auto& st = j["strategy"];
        s.strategy.kind = read_strategy(r, st, "strategy", "kind", s.strategy.kind);
        r.get(st, "strategy", "swap_interval_s", s.strategy.swap_interval_s);
        r.get(st, "strategy", "timeout_ticks", s.strategy.timeout_ticks);
        r.get(st, "strategy", "rotation_interval", s.strategy.rotation_interval);
        if (st.contains("levels")) {
            if (!st["levels"].is_array()) {
                r.fail("strategy.levels", "expected an array");
            } else {
                s.strategy.levels.clear();
                for (std::size_t i = 0; i < st["levels"].size(); ++i) {
                    const std::string p = "strategy.levels[" + std::to_string(i) + "]";
                    const auto& lv = st["levels"][i];
                    HybridLevel h;
                    if (r.object(lv, p, {"area", "layer", "strategy"})) {
                        r.get(lv, p, "area", h.area);
                        r.get(lv, p, "layer", h.layer);
                        h.strategy = read_strategy(r, lv, p, "strategy", h.strategy);
                    }
                    s.strategy.levels.push_back(h);
                }
            }
        }
    }
    if (j.contains("persons") &&
        r.object(j["persons"], "persons",
                 {"count", "step_m", "sample_interval_s", "fever_fraction", "fever_rise_per_min", "hotspots",
                  "hotspot_pull"})) {
        const auto& p = j["persons"];
        r.get(p, "persons", "count", s.persons.count);
        r.get(p, "persons", "step_m", s.persons.step_m);
        r.get(p, "persons", "sample_interval_s", s.persons.sample_interval_s);
        r.get(p, "persons", "fever_fraction", s.persons.fever_fraction);
        r.get(p, "persons", "fever_rise_per_min", s.persons.fever_rise_per_min);
        r.get(p, "persons", "hotspots", s.persons.hotspots);
        r.get(p, "persons", "hotspot_pull", s.persons.hotspot_pull);
    }
    if (j.contains("ops") &&
        r.object(j["ops"], "ops",
                 {"scan_interval_s", "normal_temperature", "trend_rises", "doubling_interval", "sanitize_duration_s",
                  "sanitize_interval_s", "sanitize_top_zones", "networks"})) {
        const auto& o = j["ops"];
        r.get(o, "ops", "scan_interval_s", s.ops.scan_interval_s);
        r.get(o, "ops", "normal_temperature", s.ops.scan.normal_temperature);
        r.get(o, "ops", "trend_rises", s.ops.scan.trend_rises);
        r.get(o, "ops", "doubling_interval", s.ops.scan.doubling_interval);
        r.get(o, "ops", "sanitize_duration_s", s.ops.sanitize_duration_s);
        r.get(o, "ops", "sanitize_interval_s", s.ops.sanitize_interval_s);
        r.get(o, "ops", "sanitize_top_zones", s.ops.sanitize_top_zones);
        r.get(o, "ops", "networks", s.ops.networks);
    }
    if (j.contains("link") &&
        r.object(j["link"], "link",
                 {"enabled", "signal_min_s", "signal_mode_s", "signal_max_s", "interval_s", "peak_mbps", "decay_m",
                  "contention_drones", "success_min", "success_max", "ber_max", "transmission_time_s"})) {
        const auto& l = j["link"];
        s.link.enabled = true;
        r.get(l, "link", "enabled", s.link.enabled);
        r.get(l, "link", "signal_min_s", s.link.signal.min);
        r.get(l, "link", "signal_mode_s", s.link.signal.mode);
        r.get(l, "link", "signal_max_s", s.link.signal.max);
        r.get(l, "link", "interval_s", s.link.interval_s);
        r.get(l, "link", "peak_mbps", s.link.peak_mbps);
        r.get(l, "link", "decay_m", s.link.decay_m);
        r.get(l, "link", "contention_drones", s.link.contention_drones);
        r.get(l, "link", "success_min", s.link.success_min);
        r.get(l, "link", "success_max", s.link.success_max);
        r.get(l, "link", "ber_max", s.link.ber_max);
        r.get(l, "link", "transmission_time_s", s.link.transmission_time_s);
    }
    if (j.contains("ped_flow") &&
        r.object(j["ped_flow"], "ped_flow",
                 {"enabled", "arrival_rate_per_drone", "monitor_drones", "gate_capacity", "gate_capacity_per_drone", "walk_min_s", "walk_max_s",
                  "wait_spacing", "gap_min", "gap_max", "check_interval_s", "medicine_fraction", "service_units",
                  "service_time", "service_time_mean_s", "service_time_max_s"})) {
        const auto& p = j["ped_flow"];
        auto& sp = s.ped.spec;
        s.ped.enabled = true;
        r.get(p, "ped_flow", "enabled", s.ped.enabled);
        r.get(p, "ped_flow", "arrival_rate_per_drone", s.ped.arrival_rate_per_drone);
        r.get(p, "ped_flow", "monitor_drones", s.ped.monitor_drones);
        r.get(p, "ped_flow", "gate_capacity", sp.gate_capacity);
        r.get(p, "ped_flow", "gate_capacity_per_drone", s.ped.gate_capacity_per_drone);
        r.get(p, "ped_flow", "walk_min_s", sp.walk_min_s);
        r.get(p, "ped_flow", "walk_max_s", sp.walk_max_s);
        r.get(p, "ped_flow", "wait_spacing", sp.wait_spacing);
        r.get(p, "ped_flow", "gap_min", sp.gap_min);
        r.get(p, "ped_flow", "gap_max", sp.gap_max);
        r.get(p, "ped_flow", "check_interval_s", sp.check_interval_s);
        r.get(p, "ped_flow", "medicine_fraction", sp.medicine_fraction);
        r.get(p, "ped_flow", "service_units", sp.service_units);
        r.get(p, "ped_flow", "service_time_mean_s", sp.service_time_mean_s);
        r.get(p, "ped_flow", "service_time_max_s", sp.service_time_max_s);
        std::string kind = service_name(sp.service_kind);
        r.get(p, "ped_flow", "service_time", kind);
        if (kind == "Fixed") {
            sp.service_kind = ServiceTimeKind::Fixed;
        } else if (kind == "TruncatedExponential") {
            sp.service_kind = ServiceTimeKind::TruncatedExponential;
        } else {
            r.fail("ped_flow.service_time", "expected Fixed or TruncatedExponential");
        }
    }
    if (j.contains("distancing") && r.object(j["distancing"], "distancing", {"threshold_m", "method"})) {
        const auto& d = j["distancing"];
        r.get(d, "distancing", "threshold_m", s.distancing.threshold_m);
        std::string m = method_name(s.distancing.method);
        r.get(d, "distancing", "method", m);
        if (auto dm = method_from(m)) {
            s.distancing.method = *dm;
        } else {
            r.fail("distancing.method", "unknown distance method '" + m + "'");
        }
    }
}

json scenario_json(const Scenario& s) {
    json j;
    j["name"] = s.name;
    j["seed"] = s.seed;
    j["duration"] = s.duration;
    j["drones"] = s.drones;
    j["metrics_window_s"] = s.metrics_window_s;
    j["grid"] = {{"n", s.grid.n}, {"tau", s.grid.tau}, {"layers", s.grid.layers},
                 {"band_fraction", s.grid.band_fraction}};
    const auto& f = s.fleet;
    j["fleet"] = {{"speed_mps", f.speed_mps},           {"scan_flight_time_s", f.scan_flight_time_s},
                  {"spray_flight_time_s", f.spray_flight_time_s}, {"tank_liters", f.tank_liters},
                  {"spray_rate_lpm", f.spray_rate_lpm}, {"battery_floor", f.battery_floor},
                  {"tank_floor", f.tank_floor},         {"recharge_time_s", f.recharge_time_s},
                  {"refill_time_s", f.refill_time_s}};
    const auto& m = s.mission;
    j["mission"] = {{"target_in_use", m.target_in_use},
                    {"control_interval_s", m.control_interval_s},
                    {"utilization_lower", m.utilization_lower},
                    {"utilization_upper", m.utilization_upper},
                    {"return_margin", m.return_margin},
                    {"tank_reserve_l", m.tank_reserve_l},
                    {"recall_rest_s", m.recall_rest_s},
                    {"warm_start", m.warm_start}};
    json levels = json::array();
    for (const auto& lv : s.strategy.levels) {
        levels.push_back({{"area", lv.area}, {"layer", lv.layer}, {"strategy", std::string(to_string(lv.strategy))}});
    }
    j["strategy"] = {{"kind", std::string(to_string(s.strategy.kind))},
                     {"levels", levels},
                     {"swap_interval_s", s.strategy.swap_interval_s},
                     {"timeout_ticks", s.strategy.timeout_ticks},
                     {"rotation_interval", s.strategy.rotation_interval}};
    const auto& p = s.persons;
    j["persons"] = {{"count", p.count},
                    {"step_m", p.step_m},
                    {"sample_interval_s", p.sample_interval_s},
                    {"fever_fraction", p.fever_fraction},
                    {"fever_rise_per_min", p.fever_rise_per_min},
                    {"hotspots", p.hotspots},
                    {"hotspot_pull", p.hotspot_pull}};
    const auto& o = s.ops;
    j["ops"] = {{"scan_interval_s", o.scan_interval_s},
                {"normal_temperature", o.scan.normal_temperature},
                {"trend_rises", o.scan.trend_rises},
                {"doubling_interval", o.scan.doubling_interval},
                {"sanitize_duration_s", o.sanitize_duration_s},
                {"sanitize_interval_s", o.sanitize_interval_s},
                {"sanitize_top_zones", o.sanitize_top_zones},
                {"networks", o.networks}};
    const auto& l = s.link;
    j["link"] = {{"enabled", l.enabled},
                 {"signal_min_s", l.signal.min},
                 {"signal_mode_s", l.signal.mode},
                 {"signal_max_s", l.signal.max},
                 {"interval_s", l.interval_s},
                 {"peak_mbps", l.peak_mbps},
                 {"decay_m", l.decay_m},
                 {"contention_drones", l.contention_drones},
                 {"success_min", l.success_min},
                 {"success_max", l.success_max},
                 {"ber_max", l.ber_max},
                 {"transmission_time_s", l.transmission_time_s}};
    const auto& sp = s.ped.spec;
    j["ped_flow"] = {{"enabled", s.ped.enabled},
                     {"arrival_rate_per_drone", s.ped.arrival_rate_per_drone},
                     {"monitor_drones", s.ped.monitor_drones},
                     {"gate_capacity", sp.gate_capacity},
                     {"gate_capacity_per_drone", s.ped.gate_capacity_per_drone},
                     {"walk_min_s", sp.walk_min_s},
                     {"walk_max_s", sp.walk_max_s},
                     {"wait_spacing", sp.wait_spacing},
                     {"gap_min", sp.gap_min},
                     {"gap_max", sp.gap_max},
                     {"check_interval_s", sp.check_interval_s},
                     {"medicine_fraction", sp.medicine_fraction},
                     {"service_units", sp.service_units},
                     {"service_time", service_name(sp.service_kind)},
                     {"service_time_mean_s", sp.service_time_mean_s},
                     {"service_time_max_s", sp.service_time_max_s}};
    j["distancing"] = {{"threshold_m", s.distancing.threshold_m}, {"method", method_name(s.distancing.method)}};
    return j;
}

}  // namespace

// ---------------------------------------------------------------------------
// Validation

std::vector<FieldError> validate(const Scenario& s) {
    std::vector<FieldError> errs;
    auto fail = [&](std::string path, std::string msg, ErrorCode code = ErrorCode::ValidationError) {
        errs.push_back({std::move(path), code, std::move(msg)});
    };
    try {
        s.grid.validate();
    } catch (const Error& e) {
        // Messages read "<field> must ...", after the "<code>: " prefix.
        std::string msg = e.what();
        msg.erase(0, msg.find(": ") + 2);
        fail("grid." + msg.substr(0, msg.find(' ')), msg, e.code());
    }
    if (s.duration < 1) fail("duration", "must be >= 1 tick");
    if (s.metrics_window_s < 1) fail("metrics_window_s", "must be >= 1");
    if (s.drones < 0) fail("drones", "must be >= 0");

    const auto& f = s.fleet;
    if (!(f.speed_mps > 0.0)) fail("fleet.speed_mps", "must be > 0");
    if (!(f.scan_flight_time_s > 0.0)) fail("fleet.scan_flight_time_s", "must be > 0");
    if (!(f.spray_flight_time_s > 0.0)) fail("fleet.spray_flight_time_s", "must be > 0");
    if (f.tank_liters < 0.0) fail("fleet.tank_liters", "must be >= 0");
    if (f.spray_rate_lpm < 0.0) fail("fleet.spray_rate_lpm", "must be >= 0");
    if (!(f.battery_floor >= 0.0 && f.battery_floor < 1.0)) fail("fleet.battery_floor", "must lie in [0, 1)");
    if (f.recharge_time_s < 0.0) fail("fleet.recharge_time_s", "must be >= 0");
    if (f.refill_time_s < 0.0) fail("fleet.refill_time_s", "must be >= 0");

    const auto& m = s.mission;
    if (m.control_interval_s < 1) fail("mission.control_interval_s", "must be >= 1");
    if (!(m.utilization_lower >= 0.0 && m.utilization_lower < m.utilization_upper && m.utilization_upper <= 1.0)) {
        fail("mission.utilization_upper", "need 0 <= lower < upper <= 1", ErrorCode::InvalidThresholds);
    }
    if (m.return_margin < 0.0 || f.battery_floor + m.return_margin >= 1.0) {
        fail("mission.return_margin", "battery_floor + return_margin must stay below 1");
    }
    if (m.recall_rest_s < 0) fail("mission.recall_rest_s", "must be >= 0");

    const auto& st = s.strategy;
    if (st.swap_interval_s < 0) fail("strategy.swap_interval_s", "must be >= 0");
    if (st.timeout_ticks < 1) fail("strategy.timeout_ticks", "must be >= 1");
    if (st.rotation_interval < 0) fail("strategy.rotation_interval", "must be >= 0");
    if (st.kind == Strategy::Hybrid) {
        if (st.levels.empty()) fail("strategy.levels", "Hybrid needs at least one level");
    } else if (!st.levels.empty()) {
        fail("strategy.levels", "levels apply to Hybrid only");
    }
    if (errs.empty() || std::none_of(errs.begin(), errs.end(), [](const auto& e) { return e.path.rfind("grid.", 0) == 0; })) {
        std::vector<HybridLevel> levels = st.levels;
        if (st.kind != Strategy::Hybrid) levels = {HybridLevel{"operation", s.grid.layers - 1, st.kind}};
        if (!levels.empty()) {
            try {
                (void)hybrid_plan(levels, s.grid);
            } catch (const Error& e) {
                fail(st.kind == Strategy::Hybrid ? "strategy.levels" : "strategy.kind", e.what(), e.code());
            }
        }
        const int per_level = s.grid.n * s.grid.n;
        const int level_count = std::max<int>(1, static_cast<int>(levels.size()));
        const int max_drones = per_level * level_count;
        if (s.drones > max_drones) {
            fail("drones", std::to_string(s.drones) + " drones exceed the " + std::to_string(max_drones) +
                               " zones available for operations", ErrorCode::TooManyDrones);
        }
    }

    const auto& p = s.persons;
    if (p.count < 0) fail("persons.count", "must be >= 0");
    if (!(p.step_m >= 0.0)) fail("persons.step_m", "must be >= 0");
    if (p.sample_interval_s < 1) fail("persons.sample_interval_s", "must be >= 1");
    if (!(p.fever_fraction >= 0.0 && p.fever_fraction <= 1.0)) fail("persons.fever_fraction", "must lie in [0, 1]");
    if (p.fever_rise_per_min < 0.0) fail("persons.fever_rise_per_min", "must be >= 0");
    if (p.hotspots < 0) fail("persons.hotspots", "must be >= 0");
    if (!(p.hotspot_pull >= 0.0 && p.hotspot_pull <= 1.0)) fail("persons.hotspot_pull", "must lie in [0, 1]");

    const auto& o = s.ops;
    if (o.scan_interval_s < 1) fail("ops.scan_interval_s", "must be >= 1");
    if (o.scan.trend_rises < 1) fail("ops.trend_rises", "must be >= 1");
    if (o.sanitize_duration_s < 0) fail("ops.sanitize_duration_s", "must be >= 0");
    if (o.sanitize_interval_s < 1) fail("ops.sanitize_interval_s", "must be >= 1");
    if (o.sanitize_top_zones < 0) fail("ops.sanitize_top_zones", "must be >= 0");
    if (o.networks < 1) fail("ops.networks", "must be >= 1");

    if (s.link.enabled) {
        const auto& l = s.link;
        try {
            l.signal.validate();
        } catch (const Error& e) {
            fail("link.signal_mode_s", e.what(), e.code());
        }
        if (l.interval_s < 1) fail("link.interval_s", "must be >= 1");
        if (!(l.peak_mbps > 0.0)) fail("link.peak_mbps", "must be > 0");
        if (!(l.decay_m > 0.0)) fail("link.decay_m", "must be > 0");
        if (!(l.contention_drones > 0.0)) fail("link.contention_drones", "must be > 0");
        if (!(l.success_min >= 0.0 && l.success_min <= l.success_max && l.success_max <= 1.0)) {
            fail("link.success_max", "need 0 <= success_min <= success_max <= 1");
        }
        if (!(l.ber_max >= 0.0 && l.ber_max < 1.0)) fail("link.ber_max", "must lie in [0, 1)");
        if (!(l.transmission_time_s > 0.0)) fail("link.transmission_time_s", "must be > 0");
    }

    if (s.ped.enabled) {
        if (!(s.ped.arrival_rate_per_drone >= 0.0) || !std::isfinite(s.ped.arrival_rate_per_drone)) {
            fail("ped_flow.arrival_rate_per_drone", "must be >= 0");
        }
        if (s.ped.monitor_drones < 0) fail("ped_flow.monitor_drones", "must be >= 0");
        if (s.ped.gate_capacity_per_drone < 0) fail("ped_flow.gate_capacity_per_drone", "must be >= 0");
        try {
            PedFlowSpec spec = s.ped.spec;
            spec.arrival_rate = 0.0;
            spec.validate();
        } catch (const Error& e) {
            const std::string what = e.what();
            const auto start = what.find("ped_flow.");
            const auto colon = what.find(':', start);
            fail(start != std::string::npos ? what.substr(start, colon - start) : "ped_flow", what, e.code());
        }
    }
    if (!(s.distancing.threshold_m > 0.0)) fail("distancing.threshold_m", "must be > 0");
    return errs;
}

Scenario scenario_from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
    Scenario s;
    std::vector<FieldError> errs;
    Reader r(errs);
    read_scenario(r, j, s);
    if (!errs.empty()) {
        std::string msg;
        for (const auto& e : errs) msg += "\n  " + e.path + ": " + e.message;
        throw Error(ErrorCode::ValidationError, "scenario has " + std::to_string(errs.size()) + " problem(s):" + msg);
    }
    return s;
}

std::string scenario_to_json(const Scenario& s) { return scenario_json(s).dump(2); }

std::string scenario_hash(const Scenario& s) {
    const std::string text = scenario_json(s).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

PedFlowSpec effective_ped_spec(const Scenario& s) {
    PedFlowSpec spec = s.ped.spec;
    spec.arrival_rate = s.ped.arrival_rate_per_drone * s.drones;
    spec.gate_capacity += s.ped.gate_capacity_per_drone * s.drones;
    spec.supply_points = std::max(0, s.drones - s.ped.monitor_drones);
    return spec;
}

}  // namespace swarmzones
