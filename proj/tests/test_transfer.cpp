#include <random>
#include <set>

#include "doctest.h"
#include "swarmzones/error.hpp"
#include "swarmzones/transfer.hpp"

using namespace swarmzones;

namespace {

// Recomputes the collision invariant from the snapshot alone.
bool snapshot_is_safe(const OccupancyLedger& ledger) {
    std::set<DroneId> drones;
    std::set<int> lanes;
    std::set<ZoneId> zones;
    for (const auto& [d, c] : ledger.snapshot()) {
        if (!drones.insert(d).second) return false;
        const bool fresh = c.kind == Cell::Kind::Zone ? zones.insert(c.zone).second : lanes.insert(c.lane).second;
        if (!fresh) return false;
    }
    return true;
}

int run_until_done(TransferCoordinator& tc, int id, std::int64_t start, std::int64_t limit) {
    for (std::int64_t t = start; t < start + limit; ++t) {
        tc.tick(t);
        REQUIRE(snapshot_is_safe(tc.ledger()));
        if (!tc.session(id).live()) return static_cast<int>(t - start + 1);
    }
    return -1;
}

}  // namespace

TEST_CASE("ledger rejects double occupancy and non-adjacent moves") {
    const GridSpec g{3, 10.0, 1};
    OccupancyLedger L(g);
    L.place(1, Cell::of({0, 0, 0}));
    L.place(2, Cell::of({0, 1, 0}));
    CHECK_THROWS_AS(L.place(3, Cell::of({0, 0, 0})), Error);
    CHECK_THROWS_AS(L.place(1, Cell::of({2, 2, 0})), Error);
    CHECK_THROWS_AS(L.move(1, Cell::of({0, 1, 0})), Error);
    CHECK_THROWS_AS(L.move(1, Cell::of({2, 2, 0})), Error);
    const Cell lane = Cell::of_lane(transfer_lane({0, 0, 0}, {0, 1, 0}, g).id);
    L.move(1, lane);
    CHECK(L.cell_of(1) == lane);
    CHECK(L.check_invariants());
    CHECK(L.journal().size() == 3);
}

TEST_CASE("fixed-area swap with both lanes free") {
    const GridSpec g{3, 10.0, 1};
    TransferCoordinator tc(g);
    const ZoneId z1{0, 0, 0}, z3{0, 1, 0};
    tc.ledger().place(10, Cell::of(z1));
    tc.ledger().place(30, Cell::of(z3));
    const int id = tc.submit(10, z1, z3, Strategy::FixedArea, 0);
    const int ticks = run_until_done(tc, id, 0, 10);
    CHECK(ticks >= 1);
    CHECK(ticks <= 4);
    CHECK(tc.session(id).request.status == RequestStatus::Done);
    CHECK(tc.ledger().occupant(Cell::of(z1)) == 30);
    CHECK(tc.ledger().occupant(Cell::of(z3)) == 10);
}

TEST_CASE("fixed-area swap parks in the opposite lane while T_LR is held") {
    const GridSpec g{3, 10.0, 1};
    TransferCoordinator tc(g);
    const ZoneId a{1, 0, 0}, b{1, 1, 0};
    const Cell lr = Cell::of_lane(transfer_lane(a, b, g).id);
    const Cell rl = Cell::of_lane(transfer_lane(b, a, g).id);
    tc.ledger().place(1, Cell::of(a));
    tc.ledger().place(2, Cell::of(b));
    tc.ledger().place(99, lr);
    const int id = tc.submit(1, a, b, Strategy::FixedArea, 0);
    tc.tick(0);
    CHECK(tc.session(id).request.status == RequestStatus::InProgress);
    CHECK(tc.ledger().cell_of(1) == rl);
    for (int t = 1; t < 5; ++t) tc.tick(t);
    CHECK(tc.ledger().cell_of(1) == rl);

    tc.ledger().remove(99);
    const int ticks = run_until_done(tc, id, 5, 10);
    CHECK(ticks >= 1);
    CHECK(ticks <= 4);
    CHECK(tc.ledger().occupant(Cell::of(a)) == 2);
    CHECK(tc.ledger().occupant(Cell::of(b)) == 1);
}

TEST_CASE("stalled swap aborts and rolls back") {
    const GridSpec g{2, 10.0, 1};
    TransferCoordinator tc(g, TransferConfig{5});
    const ZoneId a{0, 0, 0}, b{0, 1, 0};
    tc.ledger().place(1, Cell::of(a));
    tc.ledger().place(2, Cell::of(b));
    tc.ledger().place(99, Cell::of_lane(transfer_lane(a, b, g).id));
    const int id = tc.submit(1, a, b, Strategy::FixedArea, 0);
    for (int t = 0; t < 20; ++t) tc.tick(t);
    const auto& s = tc.session(id);
    CHECK(s.request.status == RequestStatus::Aborted);
    CHECK_FALSE(s.live());
    CHECK(tc.ledger().occupant(Cell::of(a)) == 1);
    CHECK(tc.ledger().occupant(Cell::of(b)) == 2);
}

TEST_CASE("both lanes held: request stays Pending then aborts at the timeout") {
    const GridSpec g{2, 10.0, 1};
    TransferCoordinator tc(g, TransferConfig{20});
    const ZoneId a{0, 0, 0}, b{0, 1, 0};
    tc.ledger().place(1, Cell::of(a));
    tc.ledger().place(2, Cell::of(b));
    tc.ledger().place(98, Cell::of_lane(transfer_lane(a, b, g).id));
    tc.ledger().place(99, Cell::of_lane(transfer_lane(b, a, g).id));
    const int id = tc.submit(1, a, b, Strategy::FixedArea, 0);
    for (int t = 0; t < 20; ++t) {
        tc.tick(t);
        CHECK(tc.session(id).request.status == RequestStatus::Pending);
    }
    tc.tick(20);
    CHECK(tc.session(id).request.status == RequestStatus::Aborted);
}

TEST_CASE("fixed-area rejects bad requests") {
    const GridSpec g{3, 10.0, 1};
    TransferCoordinator tc(g);
    CHECK_THROWS_AS(tc.submit(1, {0, 0, 0}, {0, 0, 0}, Strategy::FixedArea, 0), Error);
    CHECK_THROWS_AS(tc.submit(1, {0, 0, 0}, {1, 1, 0}, Strategy::FixedArea, 0), Error);
    CHECK_THROWS_AS(tc.submit(1, {0, 0, 0}, {0, 1, 0}, Strategy::MultiLayer, 0), Error);
}

TEST_CASE("move to an empty zone is a single hop") {
    const GridSpec g{3, 10.0, 1};
    TransferCoordinator tc(g);
    tc.ledger().place(1, Cell::of({0, 0, 0}));
    const int id = tc.submit(1, {0, 0, 0}, {1, 0, 0}, Strategy::FixedArea, 0);
    CHECK(run_until_done(tc, id, 0, 5) == 1);
    CHECK(tc.ledger().cell_of(1) == Cell::of({1, 0, 0}));
}

TEST_CASE("two-layer swap of zone-2 and zone-4") {
    const GridSpec g{2, 10.0, 2};
    TransferCoordinator tc(g);
    const ZoneId z2{0, 1, 1}, z4{1, 1, 1};
    tc.ledger().place(2, Cell::of(z2));
    tc.ledger().place(4, Cell::of(z4));
    const int id = tc.submit(2, z2, z4, Strategy::MultiLayer, 0);
    tc.tick(0);
    CHECK(tc.ledger().cell_of(2) == Cell::of({0, 1, 0}));
    CHECK(tc.ledger().cell_of(4) == Cell::of({1, 1, 0}));
    const int ticks = run_until_done(tc, id, 1, 10) + 1;
    CHECK(ticks <= 6);
    CHECK(tc.ledger().occupant(Cell::of(z2)) == 4);
    CHECK(tc.ledger().occupant(Cell::of(z4)) == 2);
}

TEST_CASE("two-layer swap of distant zones") {
    const GridSpec g{5, 10.0, 3};
    TransferCoordinator tc(g);
    const ZoneId a{0, 0, 2}, b{4, 3, 2};
    tc.ledger().place(1, Cell::of(a));
    tc.ledger().place(2, Cell::of(b));
    const int id = tc.submit(1, a, b, Strategy::MultiLayer, 0);
    CHECK(run_until_done(tc, id, 0, 30) > 0);
    CHECK(tc.session(id).request.status == RequestStatus::Done);
    CHECK(tc.ledger().occupant(Cell::of(a)) == 2);
    CHECK(tc.ledger().occupant(Cell::of(b)) == 1);
}

TEST_CASE("two-layer move to empty zone: up, across, down") {
    const GridSpec g{3, 10.0, 2};
    TransferCoordinator tc(g);
    tc.ledger().place(7, Cell::of({1, 1, 1}));
    (void)tc.ledger().drain_journal();
    const int id = tc.submit(7, {1, 1, 1}, {1, 2, 1}, Strategy::MultiLayer, 0);
    run_until_done(tc, id, 0, 10);
    const auto j = tc.ledger().drain_journal();
    REQUIRE(j.size() == 3);
    CHECK(j[0].to == Cell::of({1, 1, 0}));
    CHECK(j[1].to == Cell::of({1, 2, 0}));
    CHECK(j[2].to == Cell::of({1, 2, 1}));
}

TEST_CASE("first requester wins a contested empty zone") {
    const GridSpec g{3, 10.0, 2};
    TransferCoordinator tc(g);
    tc.ledger().place(5, Cell::of({0, 0, 1}));
    tc.ledger().place(3, Cell::of({0, 2, 1}));
    const int later = tc.submit(3, {0, 2, 1}, {0, 1, 1}, Strategy::MultiLayer, 1);
    const int first = tc.submit(5, {0, 0, 1}, {0, 1, 1}, Strategy::MultiLayer, 0);
    tc.tick(1);
    CHECK(tc.session(later).request.status == RequestStatus::Aborted);
    run_until_done(tc, first, 2, 10);
    CHECK(tc.session(first).request.status == RequestStatus::Done);
    CHECK(tc.ledger().occupant(Cell::of({0, 1, 1})) == 5);
}

TEST_CASE("multilayer needs a transfer layer") {
    const GridSpec g{3, 10.0, 2};
    TransferCoordinator tc(g);
    CHECK_THROWS_AS(tc.submit(1, {0, 0, 0}, {0, 1, 0}, Strategy::MultiLayer, 0), Error);
}

TEST_CASE("zigzag route follows the zone values") {
    const GridSpec g{3, 10.0, 1};
    CHECK(zigzag_route({0, 0, 0}, g).next == ZoneId{0, 1, 0});
    const auto at7 = cell_at_zone_value(7, 3);
    CHECK(zigzag_route({at7.first, at7.second, 0}, g).next == ZoneId{2, 2, 0});
    const auto last = zigzag_route({2, 2, 0}, g);
    CHECK(last.exits);
    CHECK(last.next == ZoneId{0, 0, 0});
    const auto single = zigzag_route({0, 0, 0}, GridSpec{1, 10.0, 1});
    CHECK(single.exits);

    for (int n = 1; n <= 12; ++n) {
        const GridSpec gn{n, 1.0, 1};
        std::set<ZoneId> seen;
        ZoneId z{0, 0, 0};
        for (int i = 0; i < n * n; ++i) {
            seen.insert(z);
            const auto hop = zigzag_route(z, gn);
            CHECK(hop.exits == (i == n * n - 1));
            z = hop.next;
        }
        CHECK(seen.size() == static_cast<std::size_t>(n * n));
    }
}

TEST_CASE("parallel sweep step and rotation") {
    const GridSpec g{3, 10.0, 1};
    const std::vector<DroneId> roster{4, 5, 6};
    const auto at1 = parallel_sweep_step(roster, 1, 0, 0, g);
    std::set<int> rows;
    for (const auto& p : at1) {
        CHECK(p.zone.col == 1);
        rows.insert(p.zone.row);
    }
    CHECK(rows.size() == 3);
    const auto rotated = parallel_sweep_step(roster, 0, 1, 0, g);
    CHECK(rotated[0].drone == 5);
    CHECK_THROWS_AS(parallel_sweep_step(std::vector<DroneId>{1, 1}, 0, 0, 0, g), Error);
    CHECK_THROWS_AS(parallel_sweep_step(std::vector<DroneId>{1, 2, 3, 4}, 0, 0, 0, g), Error);

    OccupancyLedger L(g);
    ParallelSweep sweep(roster, 0, g, 5);
    int entries = 0;
    for (int t = 0; t < 40; ++t) {
        const bool was_on = sweep.on_grid();
        REQUIRE(sweep.step(L, t));
        if (!was_on && sweep.on_grid()) ++entries;
        CHECK(L.check_invariants());
        if (sweep.on_grid()) {
            std::set<int> r;
            for (const auto d : roster) {
                const auto c = L.cell_of(d);
                REQUIRE(c.has_value());
                CHECK(c->zone.col == sweep.column());
                r.insert(c->zone.row);
            }
            CHECK(r.size() == roster.size());
        }
    }
    CHECK(entries == 10);
    CHECK(sweep.stagger() != 0);

    const GridSpec one{1, 10.0, 1};
    OccupancyLedger L1(one);
    ParallelSweep fixed(std::vector<DroneId>{0}, 0, one, 5);
    fixed.step(L1, 0);
    for (int t = 1; t < 10; ++t) {
        fixed.step(L1, t);
        CHECK(L1.cell_of(0) == Cell::of({0, 0, 0}));
    }
}

TEST_CASE("hybrid plan") {
    const GridSpec g{4, 10.0, 6};
    const std::vector<HybridLevel> fig12{{"area-1", 0, Strategy::Zigzag},
                                         {"area-2", 2, Strategy::MultiLayer},
                                         {"area-3", 3, Strategy::Parallel},
                                         {"area-4", 5, Strategy::MultiLayer}};
    const auto plan = hybrid_plan(fig12, g);
    CHECK(plan.transfer_layer[1]);
    CHECK(plan.transfer_layer[4]);
    CHECK(plan.layer_strategy[3] == Strategy::Parallel);

    const std::vector<HybridLevel> overlap{{"a", 1, Strategy::Zigzag}, {"b", 1, Strategy::Parallel}};
    try {
        hybrid_plan(overlap, g);
        FAIL("expected LayerOverlap");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::LayerOverlap);
    }
    const std::vector<HybridLevel> top{{"a", 0, Strategy::MultiLayer}};
    try {
        hybrid_plan(top, GridSpec{4, 10.0, 1});
        FAIL("expected MissingTransferLayer");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MissingTransferLayer);
    }
    const std::vector<HybridLevel> stacked{{"a", 0, Strategy::Zigzag}, {"b", 1, Strategy::MultiLayer}};
    CHECK_THROWS_AS(hybrid_plan(stacked, g), Error);
}

TEST_CASE("band signal") {
    const GridSpec g{3, 10.0, 1};
    OccupancyLedger L(g);
    Drone d;
    d.id = 1;
    d.position = {5, 5, 0};
    L.place(1, Cell::of({0, 0, 0}));
    L.place(2, Cell::of({1, 0, 0}));
    CHECK(band_signal(d, g, L).empty());
    d.position = {9.6, 5, 0};
    CHECK(band_signal(d, g, L) == std::vector<DroneId>{2});
    d.position = {0.3, 5, 0};
    CHECK(band_signal(d, g, L).empty());
}

TEST_CASE("randomized coordinator traffic keeps the ledger safe") {
    std::mt19937_64 rng(7);
    long steps = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 9);
        const int layers = 1 + static_cast<int>(rng() % 3);
        const GridSpec g{n, 10.0, layers};
        TransferCoordinator tc(g, TransferConfig{8});
        const int op = layers - 1;
        const int count = 1 + static_cast<int>(rng() % static_cast<unsigned>(n * n));
        std::vector<ZoneId> free;
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) free.push_back({r, c, op});
        std::shuffle(free.begin(), free.end(), rng);
        for (int i = 0; i < count; ++i) tc.ledger().place(i, Cell::of(free[i]));
        for (int t = 0; t < 200; ++t) {
            const DroneId d = static_cast<DroneId>(rng() % static_cast<unsigned>(count));
            const auto at = tc.ledger().cell_of(d);
            if (at && at->kind == Cell::Kind::Zone && at->zone.layer == op && !tc.is_busy(d)) {
                const auto nb = neighbors_of(at->zone, g);
                const ZoneId to = nb[rng() % nb.size()];
                if (to.layer == op) {
                    const bool multi = layers > 1 && (rng() % 2 == 0);
                    tc.submit(d, at->zone, to, multi ? Strategy::MultiLayer : Strategy::FixedArea, t);
                }
            }
            tc.tick(t);
            ++steps;
            REQUIRE(tc.ledger().check_invariants());
            REQUIRE(snapshot_is_safe(tc.ledger()));
            for (const auto& [id, s] : tc.sessions()) {
                if (s.request.status == RequestStatus::Pending) REQUIRE(t - s.request.issued_at < 8);
            }
        }
    }
    CHECK(steps == 8000);
}
