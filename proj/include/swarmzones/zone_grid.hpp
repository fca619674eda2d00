#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace swarmzones {

using DroneId = std::int32_t;

/// Multi-layer n x n lattice of square zones of side `tau` meters.
/// Layer 0 is the topmost layer; an operation layer m uses m-1 as its transfer layer.
struct GridSpec {
    int n = 1;
    double tau = 1.0;
    int layers = 1;
    double band_fraction = 0.1;

    /// Throws Error{InvalidGrid} when an invariant is violated.
    void validate() const;

    double extent() const noexcept { return n * tau; }
    int zones_per_layer() const noexcept { return n * n; }
    int zone_count() const noexcept { return n * n * layers; }
};

struct ZoneId {
    int row = 0;
    int col = 0;
    int layer = 0;

    friend auto operator<=>(const ZoneId&, const ZoneId&) = default;
};

struct Position {
    double x = 0.0;
    double y = 0.0;
    int layer = 0;

    friend bool operator==(const Position&, const Position&) = default;
};

enum class TransferDirection { LeftToRight, RightToLeft };

/// A capacity-1 buffer cell between two in-layer adjacent zones. `left` is the
/// lexicographically smaller zone; LeftToRight lanes carry traffic left -> right.
struct TransferArea {
    int id = 0;
    TransferDirection direction = TransferDirection::LeftToRight;
    ZoneId left;
    ZoneId right;
    std::optional<DroneId> occupant;
};

bool is_valid(const ZoneId& z, const GridSpec& g) noexcept;
bool in_bounds(const Position& p, const GridSpec& g) noexcept;

/// Half-open squares: row = floor(x / tau), col = floor(y / tau). The outer
/// edge x == n*tau (or y) is folded into the last row/column.
ZoneId zone_of_position(const Position& p, const GridSpec& g);

Position zone_center(const ZoneId& z, const GridSpec& g);

/// True iff p lies within band_fraction * tau of an interior zone boundary.
bool in_collision_band(const Position& p, const GridSpec& g);

/// Ordinal of cell (a, b) in diagonal order: diagonals d = a + b ascending,
/// cells within a diagonal by ascending a. Bijective onto [0, n^2).
std::int64_t drone_zone_value(int a, int b, int n);

/// Inverse of drone_zone_value.
std::pair<int, int> cell_at_zone_value(std::int64_t ordinal, int n);

/// Independent enumeration used to check drone_zone_value.
std::vector<std::pair<int, int>> diagonal_enumeration_oracle(int n);

/// Global ordinal: layer * n^2 + drone_zone_value(row, col).
std::int64_t zone_ordinal(const ZoneId& z, const GridSpec& g);

/// In-layer 4-neighbourhood plus the vertically adjacent zones; sorted.
std::vector<ZoneId> neighbors_of(const ZoneId& z, const GridSpec& g);

bool are_layer_adjacent(const ZoneId& a, const ZoneId& b) noexcept;
bool are_vertically_adjacent(const ZoneId& a, const ZoneId& b) noexcept;

// Transfer areas exist for every in-layer adjacent pair, two lanes per pair.
int transfer_area_count(const GridSpec& g) noexcept;
TransferArea transfer_area(int id, const GridSpec& g);
/// Lane used when travelling from `from` to the in-layer neighbour `to`.
TransferArea transfer_lane(const ZoneId& from, const ZoneId& to, const GridSpec& g);
/// Point inside the lane, offset from the shared boundary midpoint.
Position transfer_area_position(const TransferArea& area, const GridSpec& g);

}  // namespace swarmzones
