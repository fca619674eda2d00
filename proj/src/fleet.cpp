#include "swarmzones/fleet.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "swarmzones/error.hpp"

namespace swarmzones {

namespace {

constexpr std::array<std::pair<DroneState, std::string_view>, 7> kStateNames{{
    {DroneState::Idle, "Idle"},
    {DroneState::Scanning, "Scanning"},
    {DroneState::Sanitizing, "Sanitizing"},
    {DroneState::Transferring, "Transferring"},
    {DroneState::WaitingInTransferArea, "WaitingInTransferArea"},
    {DroneState::Refilling, "Refilling"},
    {DroneState::Recalled, "Recalled"},
}};

Position step_towards(const Position& from, const Position& to, double max_distance) {
    const double dx = to.x - from.x;
    const double dy = to.y - from.y;
    const double dist = std::hypot(dx, dy);
    if (dist <= max_distance) return to;
    const double f = max_distance / dist;
    return Position{from.x + dx * f, from.y + dy * f, from.layer};
}

}  // namespace

std::string_view to_string(DroneState s) noexcept {
    for (const auto& [state, name] : kStateNames) {
        if (state == s) return name;
    }
    return "Unknown";
}

std::optional<DroneState> drone_state_from_string(std::string_view s) noexcept {
    for (const auto& [state, name] : kStateNames) {
        if (name == s) return state;
    }
    return std::nullopt;
}

bool is_active(DroneState s) noexcept {
    return s == DroneState::Scanning || s == DroneState::Sanitizing || s == DroneState::Transferring;
}

bool is_in_use(DroneState s) noexcept { return s != DroneState::Idle && s != DroneState::Recalled; }

int operational_layer(const GridSpec& g) noexcept { return g.layers - 1; }

std::vector<Drone> create_fleet(int count, const GridSpec& g, const FleetDefaults& defaults) {
    g.validate();
    if (count < 1) throw Error(ErrorCode::InvalidArgument, "fleet needs at least one drone");
    if (count > g.zones_per_layer()) {
        throw Error(ErrorCode::TooManyDrones, std::to_string(count) + " drones for " +
                                                  std::to_string(g.zones_per_layer()) + " zones per layer");
    }
    std::vector<Drone> fleet;
    fleet.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const auto [row, col] = cell_at_zone_value(i, g.n);
        Drone d;
        d.id = i;
        d.position = zone_center(ZoneId{row, col, operational_layer(g)}, g);
        d.speed = defaults.speed_mps;
        replenish(d, defaults);
        fleet.push_back(d);
    }
    return fleet;
}

Drone advance_drone(const Drone& d, double dt, const FleetDefaults& defaults) {
    if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
    Drone out = d;
    out.window_seconds += dt;
    if (is_active(d.state)) out.active_seconds += dt;
    out.utilization = out.window_seconds > 0.0 ? std::clamp(out.active_seconds / out.window_seconds, 0.0, 1.0) : 0.0;

    if (d.state == DroneState::Idle || d.state == DroneState::Recalled) return out;

    if (out.waypoint && d.state != DroneState::WaitingInTransferArea) {
        out.position = step_towards(out.position, *out.waypoint, out.speed * dt);
        if (out.position.x == out.waypoint->x && out.position.y == out.waypoint->y) {
            out.position.layer = out.waypoint->layer;
        }
    }
    // Refilling covers the ferry leg to the depot; consumables are restored there.
    if (d.state == DroneState::Refilling) return out;

    const bool spraying = d.state == DroneState::Sanitizing;
    const double endurance = spraying ? defaults.spray_flight_time_s : defaults.scan_flight_time_s;
    out.battery = std::max(0.0, out.battery - dt / endurance);
    out.flight_budget = out.battery * defaults.scan_flight_time_s;
    if (spraying) out.tank = std::max(0.0, out.tank - defaults.spray_rate_lpm * dt / 60.0);

    if (out.battery <= defaults.battery_floor || (spraying && out.tank <= defaults.tank_floor)) {
        out.battery = std::max(out.battery, 0.0);
        out.state = DroneState::Refilling;
        out.waypoint = defaults.depot;
    }
    return out;
}

double measure_utilization(const Drone& d, double window) {
    if (!(window > 0.0)) throw Error(ErrorCode::InvalidArgument, "window must be positive");
    return std::clamp(d.active_seconds / window, 0.0, 1.0);
}

void reset_utilization_window(Drone& d) noexcept {
    d.active_seconds = 0.0;
    d.window_seconds = 0.0;
    d.utilization = 0.0;
}

void replenish(Drone& d, const FleetDefaults& defaults) noexcept {
    d.battery = 1.0;
    d.flight_budget = defaults.scan_flight_time_s;
    d.tank = defaults.tank_liters;
}

}  // namespace swarmzones
