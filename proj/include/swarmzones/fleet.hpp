#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "swarmzones/zone_grid.hpp"

namespace swarmzones {

enum class DroneState { Idle, Scanning, Sanitizing, Transferring, WaitingInTransferArea, Refilling, Recalled };

std::string_view to_string(DroneState s) noexcept;
std::optional<DroneState> drone_state_from_string(std::string_view s) noexcept;

/// Scanning, Sanitizing and Transferring count towards utilization.
bool is_active(DroneState s) noexcept;
/// Everything except Idle and Recalled; matches the "drones in use" notion.
bool is_in_use(DroneState s) noexcept;

/// Fleet constants. Flight times and tank size follow the TCCD hardware sheet
/// (35-40 min thermal only, 12-15 min spraying, 5 L tank).
struct FleetDefaults {
    double speed_mps = 5.0;
    double scan_flight_time_s = 35.0 * 60.0;
    double spray_flight_time_s = 15.0 * 60.0;
    double tank_liters = 5.0;
    double spray_rate_lpm = 0.4;
    double battery_floor = 0.1;  // reserve for the ferry leg home
    double tank_floor = 0.0;
    double recharge_time_s = 40.0 * 60.0;
    double refill_time_s = 5.0 * 60.0;
    /// Depot sits at the grid corner on the operational layer.
    Position depot{0.0, 0.0, 0};
};

struct Drone {
    DroneId id = 0;
    Position position;
    std::optional<Position> waypoint;
    DroneState state = DroneState::Idle;
    double battery = 1.0;        // fraction of a full charge
    double tank = 0.0;           // liters remaining
    double speed = 5.0;          // m/s
    double flight_budget = 0.0;  // seconds of flight left at scanning load
    double utilization = 0.0;    // active fraction of the current window

    // Accounting for the current utilization window.
    double active_seconds = 0.0;
    double window_seconds = 0.0;
};

/// Operation layer used for initial placement: the bottom layer.
int operational_layer(const GridSpec& g) noexcept;

/// Places `count` Idle drones one per zone in drone_zone_value order.
/// Throws Error{TooManyDrones} when count exceeds the zones of one layer.
std::vector<Drone> create_fleet(int count, const GridSpec& g, const FleetDefaults& defaults);

/// Kinematics and consumables for one step of dt seconds. Grounded drones
/// (Idle, Recalled) are unchanged apart from window accounting. Crossing a
/// battery or tank floor forces Refilling with the depot as waypoint.
Drone advance_drone(const Drone& d, double dt, const FleetDefaults& defaults);

/// Fraction of `window` spent in active states, clamped to [0, 1].
double measure_utilization(const Drone& d, double window);

void reset_utilization_window(Drone& d) noexcept;

/// Restores battery, flight budget and tank to full.
void replenish(Drone& d, const FleetDefaults& defaults) noexcept;

}  // namespace swarmzones
