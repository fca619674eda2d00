#include <algorithm>

#include "doctest.h"
#include "swarmzones/error.hpp"
#include "swarmzones/ped_flow.hpp"

using namespace swarmzones;

namespace {

PedFlowSpec single_unit_fixed() {
    PedFlowSpec s;
    s.arrival_rate = 600.0;
    s.gate_capacity = 5000;
    s.walk_min_s = s.walk_max_s = 1.0;
    s.medicine_fraction = 1.0;
    s.gap_min = s.gap_max = 2.0;  // never closer than the spacing
    s.service_units = 1;
    s.supply_points = 1;
    s.service_kind = ServiceTimeKind::Fixed;
    s.service_time_max_s = 120.0;
    return s;
}

}  // namespace

TEST_CASE("zero arrivals leave the pipeline untouched") {
    PedFlowSpec spec;
    spec.arrival_rate = 0.0;
    PedFlowState st;
    Rng rng(3);
    EventLog log;
    for (int t = 0; t < 500; ++t) ped_flow_step(spec, st, rng, &log);
    CHECK(st.tick == 500);
    CHECK(st.in_system() == 0);
    CHECK(st.counters.arrivals == 0);
    CHECK(st.counters.sunk == 0);
    CHECK(log.size() == 0);
    CHECK(medicine_service_count(log) == 0);
}

TEST_CASE("one unit with a fixed 120 s service serves half a person per minute") {
    const auto spec = single_unit_fixed();
    PedFlowState st;
    Rng rng(11);
    const int minutes = 120;
    for (int t = 0; t < minutes * 60; ++t) ped_flow_step(spec, st, rng);
    const double rate = static_cast<double>(st.counters.served) / minutes;
    // The first service starts after the 1 s walk; every later one back to back.
    CHECK(st.counters.served == (minutes * 60 - 2) / 120);
    CHECK(rate == doctest::Approx(60.0 / 120.0).epsilon(0.01));
}

TEST_CASE("conservation holds on every tick") {
    PedFlowSpec spec;
    spec.arrival_rate = 300.0;
    spec.gate_capacity = 200;
    spec.supply_points = 2;
    PedFlowState st;
    Rng rng(5);
    for (int t = 0; t < 2000; ++t) {
        ped_flow_step(spec, st, rng);
        const auto& c = st.counters;
        REQUIRE(c.arrivals == st.in_system() + c.sunk);
        REQUIRE(c.served <= c.checked);
        REQUIRE(c.checked <= c.admitted);
        REQUIRE(static_cast<int>(st.walking.size()) <= spec.gate_capacity);
        REQUIRE(static_cast<int>(st.in_service.size()) <= spec.total_units());
    }
}

TEST_CASE("a spacing violator goes back to the tail instead of being served") {
    PedFlowSpec spec = single_unit_fixed();
    spec.arrival_rate = 0.0;
    spec.wait_spacing = 1.0;
    spec.check_interval_s = 1;
    PedFlowState st;
    st.tick = 10;
    for (int i = 0; i < 3; ++i) {
        Pedestrian p;
        p.id = i;
        p.needs_medicine = true;
        p.gap = i == 1 ? 0.4 : 2.0;  // person 1 stands too close to person 0
        st.queue.push_back(p);
    }
    st.counters.arrivals = 3;
    st.counters.admitted = 3;
    st.counters.checked = 3;
    Rng rng(1);
    EventLog log;
    ped_flow_step(spec, st, rng, &log);
    // Person 0 takes the single unit; 1 is flagged but not yet at the head.
    REQUIRE(st.in_service.size() == 1);
    CHECK(st.in_service[0].id == 0);
    CHECK(st.queue.front().flagged);

    for (int t = 0; t < 121; ++t) ped_flow_step(spec, st, rng, &log);
    CHECK(st.counters.requeued >= 1);
    REQUIRE(st.in_service.size() == 1);
    CHECK(st.in_service[0].id == 2);
    CHECK(st.queue.back().id == 1);
    const auto served_1 = std::count_if(log.events().begin(), log.events().end(), [](const SimEvent& e) {
        return e.kind == "ped_service" && e.entity == 1;
    });
    CHECK(served_1 == 0);
}

TEST_CASE("served never exceeds checked and matches the log") {
    PedFlowSpec spec;
    spec.arrival_rate = 120.0;
    spec.supply_points = 1;
    PedFlowState st;
    Rng rng(9);
    EventLog log;
    for (int t = 0; t < 1800; ++t) ped_flow_step(spec, st, rng, &log);
    CHECK(st.counters.served <= st.counters.checked);
    CHECK(medicine_service_count(log) == st.counters.served);
    CHECK(log.ordered());
}

TEST_CASE("spec validation names the field") {
    PedFlowSpec spec;
    spec.arrival_rate = -1.0;
    try {
        spec.validate();
        FAIL("expected ValidationError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ValidationError);
        CHECK(std::string(e.what()).find("ped_flow.arrival_rate") != std::string::npos);
    }
    spec.arrival_rate = 1.0;
    spec.service_units = 0;
    CHECK_THROWS_AS(spec.validate(), Error);
}
