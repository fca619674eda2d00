#include "swarmzones/social_distancing.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include "swarmzones/error.hpp"

namespace swarmzones {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kKmPerDegree = 111.32;

struct Unit {
    double x, y, z;
};

Unit unit_vector(const GeoPoint& p) {
    const double phi = p.lat * kDeg;
    const double lam = p.lon * kDeg;
    return {std::cos(phi) * std::cos(lam), std::cos(phi) * std::sin(lam), std::sin(phi)};
}

[[noreturn]] void missing(const char* what, int a, int b) {
    throw Error(ErrorCode::MissingObservation,
                std::string(what) + " missing for person " + std::to_string(a) + " or " + std::to_string(b));
}

}  // namespace

void GeoPoint::validate() const {
    if (!(lat >= -90.0 && lat <= 90.0) || !(lon > -180.0 && lon <= 180.0)) {
        throw Error(ErrorCode::InvalidArgument,
                    "geo point (" + std::to_string(lat) + ", " + std::to_string(lon) + ") out of range");
    }
}

int count_persons(std::span<const Detection> detections, bool sensors_available, const CameraModel& cam,
                  double length_threshold, bool all_directions) {
    std::set<int> seen;
    for (const auto& d : detections) {
        if (!all_directions && d.direction != 0) continue;
        if (sensors_available) {
            if (d.range) seen.insert(d.object);
            continue;
        }
        std::optional<double> length = d.apparent_length;
        if (!length && d.range) length = cam.pixel_angular_size * *d.range;
        if (length && *length > length_threshold) seen.insert(d.object);
    }
    return static_cast<int>(seen.size());
}

double tunnel_distance(const GeoPoint& p1, const GeoPoint& p2, double radius_km) {
    p1.validate();
    p2.validate();
    const Unit a = unit_vector(p1);
    const Unit b = unit_vector(p2);
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double dz = b.z - a.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz) * radius_km;
}

double tunnel_error_bound(double d_km, double radius_km) {
    const double r = d_km / radius_km;
    return d_km * r * r / 24.0;
}

double flat_latlon_distance(const GeoPoint& p1, const GeoPoint& p2) {
    p1.validate();
    p2.validate();
    return kKmPerDegree * std::hypot(p2.lat - p1.lat, p2.lon - p1.lon);
}

double haversine_distance(const GeoPoint& p1, const GeoPoint& p2, double radius_km) {
    p1.validate();
    p2.validate();
    const double dphi = (p2.lat - p1.lat) * kDeg;
    const double dlam = (p2.lon - p1.lon) * kDeg;
    const double h = std::pow(std::sin(dphi / 2), 2) +
                     std::cos(p1.lat * kDeg) * std::cos(p2.lat * kDeg) * std::pow(std::sin(dlam / 2), 2);
    return 2.0 * radius_km * std::asin(std::min(1.0, std::sqrt(h)));
}

GroundSample ground_sample_distance(const CameraModel& cam) {
    if (!(cam.sensor_width_mm > 0 && cam.focal_length_mm > 0 && cam.image_width_px > 0 && cam.altitude_m > 0)) {
        throw Error(ErrorCode::InvalidArgument, "camera parameters must be positive");
    }
    const double gsd = cam.sensor_width_mm * cam.altitude_m * 100.0 / (cam.focal_length_mm * cam.image_width_px);
    return {gsd, gsd * cam.image_width_px / 100.0};
}

double pixel_ratio_distance(const QueuePerson& a, const QueuePerson& b, const CameraModel& cam) {
    if (!a.apparent_length || !b.apparent_length) missing("apparent length", a.id, b.id);
    if (!(cam.pixel_angular_size > 0)) throw Error(ErrorCode::InvalidArgument, "pixel_angular_size must be > 0");
    const double ra = *a.apparent_length / cam.pixel_angular_size;
    const double rb = *b.apparent_length / cam.pixel_angular_size;
    return std::abs(ra - rb);
}

double measure_distance(const QueuePerson& a, const QueuePerson& b, DistanceMethod method, const CameraModel& cam) {
    switch (method) {
        case DistanceMethod::TunnelChord:
            if (!a.geo || !b.geo) missing("geo point", a.id, b.id);
            return tunnel_distance(*a.geo, *b.geo) * 1000.0;
        case DistanceMethod::FlatLatLon:
            if (!a.geo || !b.geo) missing("geo point", a.id, b.id);
            return flat_latlon_distance(*a.geo, *b.geo) * 1000.0;
        case DistanceMethod::GroundSampleDistance: {
            if (!a.pixel || !b.pixel) missing("pixel position", a.id, b.id);
            const double px = std::hypot(a.pixel->first - b.pixel->first, a.pixel->second - b.pixel->second);
            return px * ground_sample_distance(cam).gsd_cm_per_px / 100.0;
        }
        case DistanceMethod::PixelRatio: return pixel_ratio_distance(a, b, cam);
        case DistanceMethod::Planar:
            if (!a.position || !b.position) missing("position", a.id, b.id);
            return std::hypot(a.position->x - b.position->x, a.position->y - b.position->y);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown distance method");
}

std::vector<Violation> detect_violations(std::span<const QueuePerson> persons, DistanceMethod method,
                                         double threshold_m, CrowdMode mode, const CameraModel& cam) {
    if (!(threshold_m > 0)) throw Error(ErrorCode::InvalidArgument, "threshold must be > 0");
    std::vector<Violation> out;
    const std::size_t n = persons.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t stop = mode == CrowdMode::Queue ? std::min(n, i + 2) : n;
        for (std::size_t k = i + 1; k < stop; ++k) {
            const double d = measure_distance(persons[i], persons[k], method, cam);
            if (d < threshold_m) out.push_back({i, k, d});
        }
    }
    return out;
}

ControlRoomReport control_room_notification(std::span<const UtilizationReading> readings, double lower,
                                            double upper, std::span<const Violation> violations) {
    if (!(lower >= 0.0 && lower < upper && upper <= 1.0)) {
        throw Error(ErrorCode::InvalidThresholds, "need 0 <= lower < upper <= 1");
    }
    ControlRoomReport report;
    report.directives.reserve(readings.size());
    for (const auto& r : readings) {
        Directive d = Directive::NoAction;
        if (r.utilization >= upper) {
            d = Directive::Recall;
        } else if (r.utilization < lower) {
            d = Directive::StartOps;
        }
        report.directives.emplace_back(r.drone, d);
    }
    report.intimations.assign(violations.begin(), violations.end());
    return report;
}

}  // namespace swarmzones
