#include <set>

#include "doctest.h"
#include "swarmzones/error.hpp"
#include "swarmzones/zone_grid.hpp"

using namespace swarmzones;

namespace {

// Diagonal walk written independently of the library enumeration.
std::vector<std::pair<int, int>> walk_diagonals(int n) {
    std::vector<std::pair<int, int>> out;
    for (int d = 0; d < 2 * n - 1; ++d) {
        for (int a = std::max(0, d - n + 1); a <= std::min(d, n - 1); ++a) out.emplace_back(a, d - a);
    }
    return out;
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::ParseError;
}

}  // namespace

TEST_CASE("zone_of_position uses half-open squares") {
    const GridSpec g{3, 10.0, 1};
    CHECK(zone_of_position({0, 0, 0}, g) == ZoneId{0, 0, 0});
    CHECK(zone_of_position({10.0, 0, 0}, g) == ZoneId{1, 0, 0});
    CHECK(zone_of_position({25.5, 14.2, 0}, g) == ZoneId{2, 1, 0});
    CHECK(zone_of_position({30.0, 30.0, 0}, g) == ZoneId{2, 2, 0});
    CHECK(code_of([&] { zone_of_position({30.1, 0, 0}, g); }) == ErrorCode::OutOfBounds);
    CHECK(code_of([&] { zone_of_position({1, 1, 1}, g); }) == ErrorCode::OutOfBounds);
}

TEST_CASE("zone centre round-trips") {
    const GridSpec g{7, 3.5, 3};
    for (int l = 0; l < g.layers; ++l)
        for (int r = 0; r < g.n; ++r)
            for (int c = 0; c < g.n; ++c) {
                const ZoneId z{r, c, l};
                CHECK(zone_of_position(zone_center(z, g), g) == z);
            }
}

TEST_CASE("collision band") {
    const GridSpec g{3, 10.0, 1};
    CHECK_FALSE(in_collision_band({5, 5, 0}, g));
    CHECK(in_collision_band({9.6, 5, 0}, g));
    CHECK(in_collision_band({15, 20.9, 0}, g));
    CHECK_FALSE(in_collision_band({0.5, 5, 0}, g));  // outer edge is not interior
    CHECK_FALSE(in_collision_band({5, 5, 0}, GridSpec{1, 10.0, 1}));

    // Reflection symmetry x <-> n*tau - x on a fine lattice.
    for (int i = 0; i <= 300; ++i) {
        const double x = i * 0.1;
        for (double y : {0.0, 4.95, 10.0, 19.2, 30.0}) {
            CHECK(in_collision_band({x, y, 0}, g) == in_collision_band({30.0 - x, y, 0}, g));
        }
    }
}

TEST_CASE("drone_zone_value anchors") {
    CHECK(drone_zone_value(0, 0, 3) == 0);
    CHECK(drone_zone_value(1, 1, 3) == 4);
    CHECK(drone_zone_value(2, 2, 3) == 8);
    CHECK(drone_zone_value(2, 1, 3) == 7);
    CHECK(code_of([] { drone_zone_value(3, 0, 3); }) == ErrorCode::IndexOutOfRange);
    CHECK(code_of([] { drone_zone_value(0, -1, 3); }) == ErrorCode::IndexOutOfRange);
}

TEST_CASE("diagonal oracle anchors") {
    using P = std::vector<std::pair<int, int>>;
    CHECK(diagonal_enumeration_oracle(1) == P{{0, 0}});
    CHECK(diagonal_enumeration_oracle(2) == P{{0, 0}, {0, 1}, {1, 0}, {1, 1}});
    CHECK(diagonal_enumeration_oracle(3)[7] == std::pair{2, 1});
}

TEST_CASE("drone_zone_value is the diagonal bijection for n in [1,40]") {
    for (int n = 1; n <= 40; ++n) {
        const auto expected = walk_diagonals(n);
        REQUIRE(diagonal_enumeration_oracle(n) == expected);
        std::set<std::int64_t> seen;
        for (std::size_t i = 0; i < expected.size(); ++i) {
            const auto [a, b] = expected[i];
            const auto v = drone_zone_value(a, b, n);
            CHECK(v == static_cast<std::int64_t>(i));
            CHECK(cell_at_zone_value(v, n) == expected[i]);
            seen.insert(v);
        }
        CHECK(seen.size() == static_cast<std::size_t>(n * n));
    }
}

TEST_CASE("neighbors_of") {
    const GridSpec flat{3, 1.0, 1};
    CHECK(neighbors_of({0, 0, 0}, flat) == std::vector<ZoneId>{{0, 1, 0}, {1, 0, 0}});
    CHECK(neighbors_of({1, 1, 0}, flat).size() == 4);
    const GridSpec two{3, 1.0, 2};
    const auto nb = neighbors_of({1, 1, 1}, two);
    CHECK(nb.size() == 5);
    CHECK(std::find(nb.begin(), nb.end(), ZoneId{1, 1, 0}) != nb.end());

    const GridSpec g{4, 1.0, 3};
    for (int l = 0; l < 3; ++l)
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) {
                const ZoneId z{r, c, l};
                for (const auto& w : neighbors_of(z, g)) {
                    const auto back = neighbors_of(w, g);
                    CHECK(std::find(back.begin(), back.end(), z) != back.end());
                }
            }
}

TEST_CASE("transfer lanes cover every adjacent pair twice") {
    const GridSpec g{4, 1.0, 2};
    CHECK(transfer_area_count(g) == 2 * 2 * 4 * 3 * 2);
    std::set<int> ids;
    for (int l = 0; l < g.layers; ++l)
        for (int r = 0; r < g.n; ++r)
            for (int c = 0; c < g.n; ++c)
                for (const auto& w : neighbors_of({r, c, l}, g)) {
                    if (w.layer != l) continue;
                    const auto lane = transfer_lane({r, c, l}, w, g);
                    ids.insert(lane.id);
                    const auto decoded = transfer_area(lane.id, g);
                    CHECK(std::min(ZoneId{r, c, l}, w) == decoded.left);
                    CHECK(std::max(ZoneId{r, c, l}, w) == decoded.right);
                    const bool forward = ZoneId{r, c, l} < w;
                    CHECK((decoded.direction == TransferDirection::LeftToRight) == forward);
                }
    CHECK(ids.size() == static_cast<std::size_t>(transfer_area_count(g)));
    CHECK(code_of([&] { transfer_lane({0, 0, 0}, {1, 1, 0}, g); }) == ErrorCode::NotAdjacent);
}

TEST_CASE("grid validation") {
    CHECK(code_of([] { GridSpec{0, 1.0, 1}.validate(); }) == ErrorCode::InvalidGrid);
    CHECK(code_of([] { GridSpec{2, 0.0, 1}.validate(); }) == ErrorCode::InvalidGrid);
    CHECK(code_of([] { GridSpec{2, 1.0, 0}.validate(); }) == ErrorCode::InvalidGrid);
    CHECK(code_of([] { GridSpec{2, 1.0, 1, 0.5}.validate(); }) == ErrorCode::InvalidGrid);
}
