#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "swarmzones/error.hpp"
#include "swarmzones/metrics.hpp"

using namespace swarmzones;

TEST_CASE("throughput formula") {
    CHECK(throughput({1000, 1.0, 0.05}) == 0.0);
    CHECK(throughput({1000, 0.01, 0.05}) == doctest::Approx(40550400.0).epsilon(1e-12));
    CHECK(throughput_exact(1000, Rational::of(1, 100), Rational::of(1, 20)) == Rational::of(40550400, 1));
    // Linear in N and (1 - BER); inverse in T.
    const auto base = throughput_exact(300, Rational::of(3, 7), Rational::of(2, 9));
    CHECK(throughput_exact(600, Rational::of(3, 7), Rational::of(2, 9)) == Rational::of(base.p * 2, base.q));
    CHECK(throughput_exact(300, Rational::of(3, 7), Rational::of(1, 9)) == Rational::of(base.p * 2, base.q));
    const auto half_ok = throughput_exact(300, Rational::of(5, 7), Rational::of(2, 9));  // 1-BER = 2/7
    CHECK(half_ok == Rational::of(base.p, base.q * 2));
    CHECK_THROWS_AS(throughput({1, 1.5, 1}), Error);
    CHECK_THROWS_AS(throughput({1, 0.5, 0}), Error);
}

TEST_CASE("triangular signal time") {
    SignalTimeModel m;
    Rng rng(2024);
    const int N = 100000;
    std::vector<double> xs(N);
    double sum = 0.0;
    for (auto& x : xs) {
        x = sample_signal_time(m, rng);
        CHECK((x >= 0.0 && x < 10.0));
        sum += x;
    }
    CHECK(std::abs(sum / N - 4.1) <= 0.2);
    std::sort(xs.begin(), xs.end());
    double ks = 0.0;
    for (int i = 0; i < N; ++i) {
        const double f = triangular_cdf(m, xs[i]);
        ks = std::max({ks, std::abs(f - static_cast<double>(i) / N), std::abs(f - static_cast<double>(i + 1) / N)});
    }
    CHECK(ks < 0.01);
    CHECK(m.stddev() < 2.5);  // far from the 3.7 s the figure reports

    SignalTimeModel flat{3.0, 3.0, 3.0};
    for (int i = 0; i < 10; ++i) CHECK(sample_signal_time(flat, rng) == 3.0);
}

TEST_CASE("coverage time") {
    CoverageModel cm;
    cm.per_drone_rate = 2.0;
    CHECK(coverage_time(10.0, 1, cm) == doctest::Approx(5.0));  // one sortie, no depot visit

    cm = CoverageModel{};
    for (double km : {100.0, 600.0, 1200.0}) {
        double prev = 1e300;
        for (int k : {1, 2, 3, 4, 6, 8, 10, 15, 20, 30, 40, 60}) {
            const double t = coverage_time(km, k, cm);
            CHECK(t <= prev);
            prev = t;
        }
    }
    for (int k : {1, 3, 10, 30}) {
        double prev = 0.0;
        for (double km = 50; km <= 1200; km += 50) {
            const double t = coverage_time(km, k, cm);
            CHECK(t >= prev);
            prev = t;
        }
    }
}

TEST_CASE("coverage calibration reproduces the fleet scaling") {
    const auto cm = calibrate_coverage(1200.0, 3, 18900.0, CoverageModel{});
    CHECK(coverage_time(1200.0, 3, cm) == doctest::Approx(18900.0).epsilon(0.01));
    const double paper[] = {9390, 3680, 2293};
    const int fleet[] = {10, 20, 30};
    double prev = coverage_time(1200.0, 3, cm);
    for (int i = 0; i < 3; ++i) {
        const double t = coverage_time(1200.0, fleet[i], cm);
        CHECK(std::abs(t - paper[i]) / paper[i] <= 0.25);
        CHECK(t < prev);
        prev = t;
    }
}

TEST_CASE("utilization series") {
    CHECK(utilization_series({}, 60, 600, 3)[0].mean_utilization == 0.0);
    CHECK(utilization_series({}, 60, 600, 3).back().cumulative_dispatches == 0);

    std::vector<StateChange> log;
    for (int i = 0; i < 3; ++i) {
        log.push_back({i * 100, 1, DroneState::Scanning});
        log.push_back({i * 100 + 50, 1, DroneState::Idle});
    }
    const auto w = utilization_series(log, 100, 300, 1);
    REQUIRE(w.size() == 3);
    CHECK(w.back().cumulative_dispatches == 3);
    for (const auto& x : w) CHECK(x.mean_utilization == doctest::Approx(0.5));

    // Busy time is conserved across window sizes.
    std::vector<StateChange> mixed{{0, 1, DroneState::Scanning},   {35, 2, DroneState::Sanitizing},
                                   {70, 1, DroneState::Refilling}, {90, 1, DroneState::Transferring},
                                   {130, 2, DroneState::Idle},     {170, 1, DroneState::Recalled}};
    const double expected = 70 + (130 - 35) + (170 - 90);
    for (std::int64_t win : {1, 7, 25, 60, 200}) {
        double total = 0.0;
        for (const auto& x : utilization_series(mixed, win, 200, 2)) total += x.busy_seconds;
        CHECK(total == expected);
    }
    const auto one = utilization_series(mixed, 200, 200, 2);
    CHECK(one[0].max_utilization == doctest::Approx(150.0 / 200.0));
}

TEST_CASE("drones in use") {
    CHECK(drones_in_use({}, 10) == 0);
    std::vector<StateChange> log;
    for (int d = 0; d < 9; ++d) log.push_back({d, d, DroneState::Scanning});
    log.push_back({20, 0, DroneState::Idle});
    log.push_back({21, 1, DroneState::Recalled});
    log.push_back({22, 2, DroneState::Refilling});
    CHECK(drones_in_use(log, 30) == 7);
    CHECK(drones_in_use(log, 4) == 5);
}
