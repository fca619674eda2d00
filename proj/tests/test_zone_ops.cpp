#include <random>

#include "doctest.h"
#include "swarmzones/error.hpp"
#include "swarmzones/zone_ops.hpp"

using namespace swarmzones;

namespace {

Drone scanning_drone_at(const ZoneId& z, const GridSpec& g) {
    Drone d;
    d.state = DroneState::Scanning;
    d.position = zone_center(z, g);
    return d;
}

}  // namespace

TEST_CASE("fever_trend") {
    using S = std::vector<std::pair<std::int64_t, double>>;
    CHECK(fever_trend(S{{0, 37.0}, {1, 37.8}, {2, 38.5}}).rising);
    CHECK_FALSE(fever_trend(S{{0, 36.5}, {1, 36.6}, {2, 36.4}}).rising);
    const auto one = fever_trend(S{{0, 37.0}});
    CHECK_FALSE(one.rising);
    CHECK(one.insufficient_data);
    CHECK_FALSE(fever_trend(S{{0, 37.0}, {1, 37.0}, {2, 37.5}}).rising);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> t(35.0, 40.0), shift(-5.0, 5.0);
    for (int i = 0; i < 500; ++i) {
        S s;
        for (int k = 0; k < 5; ++k) s.emplace_back(k, t(rng));
        S moved = s;
        const double c = std::round(shift(rng));  // integer shift keeps differences exact
        for (auto& p : moved) p.second += c;
        CHECK(fever_trend(s).rising == fever_trend(moved).rising);
    }
}

TEST_CASE("fever_alarm") {
    CHECK(fever_alarm(39.2, 37.0));
    CHECK_FALSE(fever_alarm(38.9, 37.0));
    CHECK_FALSE(fever_alarm(37.0, 37.0));
    CHECK_THROWS_AS(fever_alarm(46.0), Error);
    CHECK_THROWS_AS(fever_alarm(24.9), Error);
    bool seen = false;
    for (int i = 0; i <= 2000; ++i) {
        const double x = 25.0 + i * 0.01;
        const bool a = fever_alarm(x);
        CHECK((!seen || a));
        seen = seen || a;
    }
}

TEST_CASE("scan_cycle") {
    const GridSpec g{3, 10.0, 1};
    const ZoneId z{1, 1, 0};
    const auto drone = scanning_drone_at(z, g);

    SUBCASE("afebrile people") {
        std::vector<Person> people{{1, 12, 12, 36.6}, {2, 15, 15, 36.6}, {3, 18, 11, 36.6}, {4, 2, 2, 36.6}};
        ScanClock clock{0, 60};
        const auto r = scan_cycle(z, drone, people, g, clock);
        CHECK(r.observations.size() == 3);
        CHECK(r.actions.empty());
        CHECK(clock.tick == 60);
    }
    SUBCASE("rising temperature triggers sanitize and medicate") {
        std::vector<Person> people{{1, 12, 12, 37.0}};
        ScanClock clock{0, 60};
        ScanResult r;
        for (double t : {37.0, 37.6, 38.2}) {
            people[0].temperature = t;
            r = scan_cycle(z, drone, people, g, clock);
        }
        REQUIRE(r.actions.size() == 2);
        CHECK(r.actions[0].kind == ActionKind::Sanitize);
        CHECK(r.actions[1].kind == ActionKind::Medicate);
    }
    SUBCASE("empty zone still advances the clock") {
        std::vector<Person> none;
        ScanClock clock{100, 30};
        const auto r = scan_cycle(z, drone, none, g, clock);
        CHECK(r.observations.empty());
        CHECK(clock.tick == 130);
        ScanClock dbl{0, 30};
        scan_cycle(z, drone, none, g, dbl, ScanConfig{37.0, 2, true});
        CHECK(dbl.interval == 60);
        CHECK(dbl.tick == 60);
    }
    SUBCASE("drone outside the zone") {
        std::vector<Person> none;
        ScanClock clock;
        CHECK_THROWS_AS(scan_cycle({0, 0, 0}, drone, none, g, clock), Error);
        auto idle = drone;
        idle.state = DroneState::Idle;
        CHECK_THROWS_AS(scan_cycle(z, idle, none, g, clock), Error);
    }
}

TEST_CASE("compute_zone_stats") {
    const GridSpec g{3, 10.0, 1};
    const ZoneId z{0, 0, 0};
    std::vector<OpsRecord> log;
    CHECK(compute_zone_stats(z, 1, {0, 100}, log, g).experience == ExperienceCounters{});
    CHECK_THROWS_AS(compute_zone_stats(z, 1, {5, 5}, log, g), Error);

    for (int i = 0; i < 10; ++i) log.push_back({i, z, OpsKind::Scan});
    log.push_back({3, z, OpsKind::FeverAlarm});
    log.push_back({4, z, OpsKind::FeverAlarm});
    log.push_back({5, z, OpsKind::Sanitize});
    log.push_back({5, {1, 1, 0}, OpsKind::Sanitize});
    log.push_back({500, z, OpsKind::Scan});
    for (int v = 0; v < 6; ++v) log.push_back({7, {v / 3, v % 3, 0}, OpsKind::Visit});
    log.push_back({8, z, OpsKind::Throughput, 40e6});
    log.push_back({9, z, OpsKind::Throughput, 60e6});
    const auto st = compute_zone_stats(z, 1, {0, 100}, log, g);
    CHECK(st.experience == ExperienceCounters{10, 2, 1, 0});
    CHECK(st.qos.coverage_fraction == doctest::Approx(2.0 / 3.0));
    CHECK(st.qos.throughput == doctest::Approx(50e6));
    const auto again = compute_zone_stats(z, 1, {0, 100}, log, g);
    CHECK(again.experience == st.experience);
    CHECK(again.qos.throughput == st.qos.throughput);
}

TEST_CASE("edge_aggregate") {
    ZoneStats a{{0, 0, 0}, 1, {2.0, 40e6, 0.5}, {10, 2, 1, 0}, {0, 60}};
    ZoneStats b{{0, 1, 0}, 1, {4.0, 60e6, 1.0}, {5, 1, 0, 1}, {0, 60}};
    const auto single = edge_aggregate(std::vector<ZoneStats>{a});
    CHECK(single.qos.throughput == a.qos.throughput);
    CHECK(single.experience == a.experience);

    const auto two = edge_aggregate(std::vector<ZoneStats>{a, b});
    CHECK(two.qos.throughput == 50e6);
    CHECK(two.experience == ExperienceCounters{15, 3, 1, 1});
    CHECK(two.zones.size() == 2);

    std::vector<ZoneStats> same(7, b);
    const auto k = edge_aggregate(same);
    CHECK(k.qos.mean_signal_time == b.qos.mean_signal_time);
    CHECK(k.qos.coverage_fraction == b.qos.coverage_fraction);
    CHECK(k.experience == ExperienceCounters{35, 7, 0, 7});

    auto other = b;
    other.network = 2;
    CHECK_THROWS_AS(edge_aggregate(std::vector<ZoneStats>{a, other}), Error);
    other = b;
    other.window = {0, 61};
    CHECK_THROWS_AS(edge_aggregate(std::vector<ZoneStats>{a, other}), Error);
}

TEST_CASE("density_map and sanitization priority") {
    const GridSpec g{3, 10.0, 1};
    std::vector<PresenceSample> samples;
    CHECK(density_map(samples, {0, 10}, g, 0).total() == 0);
    for (int i = 0; i < 10; ++i) samples.push_back({i, {1, 1, 0}});
    const auto dm = density_map(samples, {0, 10}, g, 0);
    CHECK(dm.at(1, 1) == 10);
    CHECK(dm.total() == 10);

    // Random walk that proposes one of four directions and stays put at the
    // edge: the transition matrix is symmetric, so occupancy is uniform.
    std::mt19937_64 rng(11);
    std::vector<PresenceSample> walk;
    ZoneId z{1, 1, 0};
    const int dr[] = {-1, 1, 0, 0};
    const int dc[] = {0, 0, -1, 1};
    for (int t = 0; t < 100000; ++t) {
        const auto k = rng() % 4;
        const ZoneId next{z.row + dr[k], z.col + dc[k], 0};
        if (is_valid(next, g)) z = next;
        walk.push_back({t, z});
    }
    const auto big = density_map(walk, {0, 100000}, g, 0);
    CHECK(big.total() == 100000);
    std::int64_t split = 0;
    for (std::int64_t a = 0; a < 100000; a += 12345) split += density_map(walk, {a, a + 12345}, g, 0).total();
    CHECK(split == 100000);
    const auto [lo, hi] = std::minmax_element(big.counts.begin(), big.counts.end());
    CHECK(static_cast<double>(*hi) / static_cast<double>(*lo) < 1.1);

    DensityMap zero{3, 0, std::vector<std::int64_t>(9, 0)};
    const auto order = sanitization_priority(zero);
    for (std::size_t i = 0; i < order.size(); ++i) {
        CHECK(drone_zone_value(order[i].row, order[i].col, 3) == static_cast<std::int64_t>(i));
    }
    DensityMap abc{3, 0, {5, 9, 1, 0, 0, 0, 0, 0, 0}};
    const auto ranked = sanitization_priority(abc);
    CHECK(ranked[0] == ZoneId{0, 1, 0});
    CHECK(ranked[1] == ZoneId{0, 0, 0});
    CHECK(ranked[2] == ZoneId{0, 2, 0});
    DensityMap one{1, 0, {4}};
    CHECK(sanitization_priority(one).size() == 1);
}
