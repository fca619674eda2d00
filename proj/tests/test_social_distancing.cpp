#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "swarmzones/error.hpp"
#include "swarmzones/social_distancing.hpp"

using namespace swarmzones;

namespace {

constexpr double R = 6371.0;
constexpr double kRad = std::numbers::pi / 180.0;

double chord_oracle(const GeoPoint& a, const GeoPoint& b) {
    const double c = std::sin(a.lat * kRad) * std::sin(b.lat * kRad) +
                     std::cos(a.lat * kRad) * std::cos(b.lat * kRad) * std::cos((b.lon - a.lon) * kRad);
    const double sigma = std::acos(std::clamp(c, -1.0, 1.0));
    return 2.0 * R * std::sin(sigma / 2.0);
}

GeoPoint random_point(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> lat(-89.0, 89.0), lon(-179.0, 180.0);
    return {lat(rng), lon(rng)};
}

QueuePerson at(int id, double x, double y) {
    QueuePerson p;
    p.id = id;
    p.position = Position{x, y, 0};
    return p;
}

}  // namespace

TEST_CASE("tunnel distance anchors") {
    CHECK(tunnel_distance({10, 20}, {10, 20}) == 0.0);
    // 2R sin(pi/4) = 9009.95 km; the figure of 9010.2 often quoted rounds differently.
    CHECK(tunnel_distance({0, 0}, {0, 90}) == doctest::Approx(9009.95).epsilon(1e-6));
    CHECK(tunnel_distance({0, 0}, {0, 90}) == doctest::Approx(9010.2).epsilon(1e-4));
    CHECK(tunnel_distance({0, 0}, {0, 1}) == doctest::Approx(111.19).epsilon(1e-4));
    CHECK_THROWS_AS(tunnel_distance({91, 0}, {0, 0}), Error);
}

TEST_CASE("tunnel distance matches the chord oracle") {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 1000; ++i) {
        const auto a = random_point(rng);
        // Mix of far pairs and near pairs; near pairs keep acos well conditioned
        // by staying above ~1 km separation.
        GeoPoint b = random_point(rng);
        if (i % 2) b = {std::clamp(a.lat + (b.lat / 89.0) * 3.0, -89.0, 89.0), a.lon + b.lon / 180.0 * 3.0};
        if (b.lon > 180.0) b.lon -= 360.0;
        if (b.lon <= -180.0) b.lon += 360.0;
        const double oracle = chord_oracle(a, b);
        CHECK(std::abs(tunnel_distance(a, b) - oracle) <= 1e-12 * oracle + 1e-9);
        CHECK(tunnel_distance(a, b) == tunnel_distance(b, a));
    }
}

TEST_CASE("chord versus arc gap is bounded by the error estimate") {
    CHECK(tunnel_error_bound(0.0) == 0.0);
    CHECK(tunnel_error_bound(111.19) == doctest::Approx(0.00141).epsilon(0.01));
    CHECK(tunnel_error_bound(1000.0) == doctest::Approx(1.026).epsilon(1e-3));
    const double gap = haversine_distance({0, 0}, {0, 1}) - tunnel_distance({0, 0}, {0, 1});
    CHECK(gap == doctest::Approx(0.0014).epsilon(0.05));

    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> off(-6.0, 6.0);
    int checked = 0;
    for (int i = 0; i < 5000; ++i) {
        const auto a = random_point(rng);
        GeoPoint b{std::clamp(a.lat + off(rng), -90.0, 90.0), a.lon + off(rng)};
        if (b.lon > 180.0) b.lon -= 360.0;
        if (b.lon <= -180.0) b.lon += 360.0;
        const double d = tunnel_distance(a, b);
        if (d > 1000.0) continue;
        ++checked;
        CHECK(std::abs(haversine_distance(a, b) - d) <= 1.25 * tunnel_error_bound(d) + 1e-9);
    }
    CHECK(checked > 1000);
}

TEST_CASE("flat lat/lon distance") {
    CHECK(flat_latlon_distance({5, 5}, {5, 5}) == 0.0);
    CHECK(flat_latlon_distance({0, 0}, {1, 0}) == doctest::Approx(111.32));
    CHECK(flat_latlon_distance({0, 0}, {3, 4}) == doctest::Approx(556.6));
}

TEST_CASE("ground sample distance") {
    const CameraModel cam{13.2, 8.8, 5472.0, 100.0};
    const auto gs = ground_sample_distance(cam);
    CHECK(gs.gsd_cm_per_px == doctest::Approx(2.741).epsilon(1e-3));
    CHECK(gs.footprint_m == doctest::Approx(150.0));
    auto high = cam;
    high.altitude_m *= 2;
    CHECK(ground_sample_distance(high).gsd_cm_per_px == doctest::Approx(2 * gs.gsd_cm_per_px));
    auto wide = cam;
    wide.focal_length_mm /= 2;
    CHECK(ground_sample_distance(wide).gsd_cm_per_px == doctest::Approx(2 * gs.gsd_cm_per_px));
}

TEST_CASE("pixel ratio distance") {
    CameraModel cam;
    cam.pixel_angular_size = 0.17;
    QueuePerson a, b;
    a.apparent_length = 1.7;
    b.apparent_length = 1.7;
    CHECK(pixel_ratio_distance(a, b, cam) == 0.0);
    b.apparent_length = 2.04;
    CHECK(pixel_ratio_distance(a, b, cam) == doctest::Approx(2.0));
    CHECK(pixel_ratio_distance(b, a, cam) == pixel_ratio_distance(a, b, cam));
    QueuePerson none;
    CHECK_THROWS_AS(pixel_ratio_distance(a, none, cam), Error);
}

TEST_CASE("count_persons") {
    const CameraModel cam;
    CHECK(count_persons({}, true, cam, 1.0) == 0);
    std::vector<Detection> ranged;
    for (int i = 0; i < 5; ++i) ranged.push_back({i, 0, 3.0 + i, std::nullopt});
    CHECK(count_persons(ranged, true, cam, 1.0) == 5);
    const std::vector<Detection> image{{0, 0, std::nullopt, 1.7}, {1, 0, std::nullopt, 1.6}, {2, 0, std::nullopt, 0.4}};
    CHECK(count_persons(image, false, cam, 1.0) == 2);
    const std::vector<Detection> around{{0, 0, 2.0, std::nullopt}, {1, 2, 2.0, std::nullopt}, {1, 3, 2.5, std::nullopt}};
    CHECK(count_persons(around, true, cam, 1.0) == 1);
    CHECK(count_persons(around, true, cam, 1.0, true) == 2);
}

TEST_CASE("detect_violations") {
    std::vector<QueuePerson> spaced;
    for (int i = 0; i < 5; ++i) spaced.push_back(at(i, i * 1.0, 0));
    CHECK(detect_violations(spaced, DistanceMethod::Planar, 1.0, CrowdMode::Queue).empty());

    std::vector<QueuePerson> q{at(1, 0, 0), at(2, 0.8, 0), at(3, 2.0, 0), at(4, 2.9, 0)};
    const auto v = detect_violations(q, DistanceMethod::Planar, 1.0, CrowdMode::Queue);
    REQUIRE(v.size() == 2);
    CHECK((v[0].first == 0 && v[0].second == 1));
    CHECK((v[1].first == 2 && v[1].second == 3));

    std::vector<QueuePerson> cluster{at(1, 0, 0), at(2, 0.3, 0), at(3, 0, 0.3)};
    CHECK(detect_violations(cluster, DistanceMethod::Planar, 1.0, CrowdMode::Scatter).size() == 3);
    CHECK_THROWS_AS(detect_violations(q, DistanceMethod::Planar, 0.0, CrowdMode::Queue), Error);
}

TEST_CASE("scatter detection equals the pairwise oracle") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = static_cast<int>(rng() % 201);
        std::uniform_real_distribution<double> coord(0.0, 5.0 + n * 0.2);
        std::vector<QueuePerson> people;
        for (int i = 0; i < n; ++i) people.push_back(at(i, coord(rng), coord(rng)));
        std::vector<std::pair<std::size_t, std::size_t>> expected;
        for (int i = 0; i < n; ++i)
            for (int k = i + 1; k < n; ++k) {
                const double dx = people[i].position->x - people[k].position->x;
                const double dy = people[i].position->y - people[k].position->y;
                if (std::sqrt(dx * dx + dy * dy) < 1.0) expected.emplace_back(i, k);
            }
        const auto scatter = detect_violations(people, DistanceMethod::Planar, 1.0, CrowdMode::Scatter);
        std::vector<std::pair<std::size_t, std::size_t>> got;
        for (const auto& x : scatter) got.emplace_back(x.first, x.second);
        REQUIRE(got == expected);
        for (const auto& x : detect_violations(people, DistanceMethod::Planar, 1.0, CrowdMode::Queue)) {
            CHECK(std::find(got.begin(), got.end(), std::pair{x.first, x.second}) != got.end());
        }
    }
}

TEST_CASE("every method is symmetric and zero on the diagonal") {
    std::mt19937_64 rng(9);
    CameraModel cam;
    cam.pixel_angular_size = 0.05;
    for (int i = 0; i < 200; ++i) {
        QueuePerson a, b;
        a.geo = random_point(rng);
        b.geo = random_point(rng);
        a.position = Position{static_cast<double>(rng() % 100), static_cast<double>(rng() % 100), 0};
        b.position = Position{static_cast<double>(rng() % 100), static_cast<double>(rng() % 100), 0};
        a.pixel = std::pair{static_cast<double>(rng() % 5000), static_cast<double>(rng() % 3000)};
        b.pixel = std::pair{static_cast<double>(rng() % 5000), static_cast<double>(rng() % 3000)};
        a.apparent_length = 0.5 + (rng() % 100) / 50.0;
        b.apparent_length = 0.5 + (rng() % 100) / 50.0;
        for (auto m : {DistanceMethod::TunnelChord, DistanceMethod::FlatLatLon, DistanceMethod::GroundSampleDistance,
                       DistanceMethod::PixelRatio, DistanceMethod::Planar}) {
            CHECK(measure_distance(a, b, m, cam) == measure_distance(b, a, m, cam));
            CHECK(measure_distance(a, a, m, cam) == 0.0);
        }
    }
}

TEST_CASE("control room notification") {
    const std::vector<UtilizationReading> r{{1, 0.9}, {2, 0.1}, {3, 0.5}, {4, 0.8}, {5, 0.2}};
    const std::vector<Violation> standing{{0, 1, 0.5}};
    const auto rep = control_room_notification(r, 0.2, 0.8, standing);
    REQUIRE(rep.directives.size() == r.size());
    CHECK(rep.directives[0].second == Directive::Recall);
    CHECK(rep.directives[1].second == Directive::StartOps);
    CHECK(rep.directives[2].second == Directive::NoAction);
    CHECK(rep.directives[3].second == Directive::Recall);
    CHECK(rep.directives[4].second == Directive::NoAction);
    CHECK(rep.intimations.size() == 1);
    CHECK_THROWS_AS(control_room_notification(r, 0.8, 0.2, standing), Error);
    CHECK_THROWS_AS(control_room_notification(r, -0.1, 0.5, standing), Error);
}
