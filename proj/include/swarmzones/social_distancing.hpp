#pragma once

#include <optional>
#include <span>
#include <vector>

#include "swarmzones/zone_grid.hpp"

namespace swarmzones {

struct GeoPoint {
    double lat = 0.0;  // degrees, [-90, 90]
    double lon = 0.0;  // degrees, (-180, 180]

    /// Throws InvalidArgument outside the ranges above.
    void validate() const;
};

inline constexpr double kEarthRadiusKm = 6371.0;

struct CameraModel {
    double sensor_width_mm = 13.2;
    double focal_length_mm = 8.8;
    double image_width_px = 5472.0;
    double altitude_m = 100.0;
    double pixel_angular_size = 0.001;  // rad/px; apparent length = this * range
};

enum class DistanceMethod { TunnelChord, FlatLatLon, GroundSampleDistance, PixelRatio, Planar };

struct QueuePerson {
    int id = 0;
    int queue = 0;
    std::optional<GeoPoint> geo;
    std::optional<Position> position;                  // metres on the ground (Planar)
    std::optional<std::pair<double, double>> pixel;    // image coordinates (GroundSampleDistance)
    std::optional<double> apparent_length;             // P(L)
    std::optional<double> range;                       // P(r), metres
};

/// One sensor return or image object seen while looking in `direction` (0..3).
struct Detection {
    int object = 0;
    int direction = 0;
    std::optional<double> range;
    std::optional<double> apparent_length;
};

/// Ranged mode counts distinct objects with a range; image mode counts those
/// whose apparent length (given, or pixel_angular_size * range) exceeds the
/// threshold. `all_directions` unions the four sensor directions, otherwise
/// only direction 0 is used.
int count_persons(std::span<const Detection> detections, bool sensors_available, const CameraModel& cam,
                  double length_threshold, bool all_directions = false);

/// Straight-line chord through the sphere, in km.
double tunnel_distance(const GeoPoint& p1, const GeoPoint& p2, double radius_km = kEarthRadiusKm);

/// Chord-versus-arc error estimate d (d/R)^2 / 24, in km.
double tunnel_error_bound(double d_km, double radius_km = kEarthRadiusKm);

/// 111.32 km per degree of Euclidean lat/lon difference, without a latitude
/// correction; inaccurate away from the equator.
double flat_latlon_distance(const GeoPoint& p1, const GeoPoint& p2);

/// Great-circle arc length, in km.
double haversine_distance(const GeoPoint& p1, const GeoPoint& p2, double radius_km = kEarthRadiusKm);

struct GroundSample {
    double gsd_cm_per_px = 0.0;
    double footprint_m = 0.0;
};

GroundSample ground_sample_distance(const CameraModel& cam);

/// |r_a - r_b| with r = apparent_length / pixel_angular_size. Throws
/// MissingObservation when either apparent length is absent.
double pixel_ratio_distance(const QueuePerson& a, const QueuePerson& b, const CameraModel& cam);

/// Separation in metres under `method`. Throws MissingObservation when the
/// required field is absent on either person.
double measure_distance(const QueuePerson& a, const QueuePerson& b, DistanceMethod method, const CameraModel& cam);

enum class CrowdMode { Queue, Scatter };

struct Violation {
    std::size_t first = 0;  // index into the input list, first < second
    std::size_t second = 0;
    double distance = 0.0;
};

/// Queue mode checks consecutive people, Scatter mode every pair; a pair
/// violates when its distance is strictly below the threshold.
std::vector<Violation> detect_violations(std::span<const QueuePerson> persons, DistanceMethod method,
                                         double threshold_m, CrowdMode mode, const CameraModel& cam = {});

enum class Directive { Recall, StartOps, NoAction };

struct UtilizationReading {
    DroneId drone = 0;
    double utilization = 0.0;
};

struct ControlRoomReport {
    std::vector<std::pair<DroneId, Directive>> directives;  // one per reading
    std::vector<Violation> intimations;                     // standing violations, re-issued
};

/// Recall at or above `upper`, StartOps below `lower`. Throws InvalidThresholds
/// unless 0 <= lower < upper <= 1.
ControlRoomReport control_room_notification(std::span<const UtilizationReading> readings, double lower,
                                            double upper, std::span<const Violation> violations);

}  // namespace swarmzones
