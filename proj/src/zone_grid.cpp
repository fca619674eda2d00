#include "swarmzones/zone_grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "swarmzones/error.hpp"

namespace swarmzones {

void GridSpec::validate() const {
    if (n < 1) throw Error(ErrorCode::InvalidGrid, "n must be >= 1, got " + std::to_string(n));
    if (!(tau > 0.0) || !std::isfinite(tau)) throw Error(ErrorCode::InvalidGrid, "tau must be > 0");
    if (layers < 1) throw Error(ErrorCode::InvalidGrid, "layers must be >= 1");
    if (!(band_fraction > 0.0 && band_fraction < 0.5))
        throw Error(ErrorCode::InvalidGrid, "band_fraction must lie in (0, 0.5)");
}

bool is_valid(const ZoneId& z, const GridSpec& g) noexcept {
    return z.row >= 0 && z.row < g.n && z.col >= 0 && z.col < g.n && z.layer >= 0 && z.layer < g.layers;
}

bool in_bounds(const Position& p, const GridSpec& g) noexcept {
    const double e = g.extent();
    return p.x >= 0.0 && p.x <= e && p.y >= 0.0 && p.y <= e && p.layer >= 0 && p.layer < g.layers;
}

ZoneId zone_of_position(const Position& p, const GridSpec& g) {
    if (!in_bounds(p, g)) {
        throw Error(ErrorCode::OutOfBounds,
                    "position (" + std::to_string(p.x) + ", " + std::to_string(p.y) + ", layer " +
                        std::to_string(p.layer) + ") outside grid");
    }
    auto index = [&](double v) { return std::min(static_cast<int>(std::floor(v / g.tau)), g.n - 1); };
    return ZoneId{index(p.x), index(p.y), p.layer};
}

Position zone_center(const ZoneId& z, const GridSpec& g) {
    if (!is_valid(z, g)) throw Error(ErrorCode::IndexOutOfRange, "zone outside grid");
    return Position{(z.row + 0.5) * g.tau, (z.col + 0.5) * g.tau, z.layer};
}

namespace {

// Distance from v to the nearest interior boundary k*tau, k in [1, n-1].
double interior_boundary_distance(double v, const GridSpec& g) {
    const int k = std::clamp(static_cast<int>(std::lround(v / g.tau)), 1, g.n - 1);
    return std::abs(v - k * g.tau);
}

std::pair<int, int> lower_half_cell(std::int64_t k) {
    auto d = static_cast<std::int64_t>((std::sqrt(8.0 * static_cast<double>(k) + 1.0) - 1.0) / 2.0);
    while (d * (d + 1) / 2 > k) --d;
    while ((d + 1) * (d + 2) / 2 <= k) ++d;
    const auto a = k - d * (d + 1) / 2;
    return {static_cast<int>(a), static_cast<int>(d - a)};
}

}  // namespace

bool in_collision_band(const Position& p, const GridSpec& g) {
    if (!in_bounds(p, g)) throw Error(ErrorCode::OutOfBounds, "position outside grid");
    if (g.n == 1) return false;
    const double band = g.band_fraction * g.tau;
    return interior_boundary_distance(p.x, g) <= band || interior_boundary_distance(p.y, g) <= band;
}

std::int64_t drone_zone_value(int a, int b, int n) {
    if (n < 1 || a < 0 || b < 0 || a >= n || b >= n) {
        throw Error(ErrorCode::IndexOutOfRange,
                    "cell (" + std::to_string(a) + ", " + std::to_string(b) + ") outside " + std::to_string(n) +
                        "x" + std::to_string(n) + " grid");
    }
    const std::int64_t nn = n;
    if (a + b >= n) {
        // Upper half mirrors the lower half through the grid centre.
        return nn * nn - 1 - drone_zone_value(n - 1 - a, n - 1 - b, n);
    }
    const std::int64_t d = a + b;
    const std::int64_t k = d * (d + 1) / 2;
    return d != 0 ? k + a : k + b;
}

std::pair<int, int> cell_at_zone_value(std::int64_t ordinal, int n) {
    const std::int64_t nn = n;
    if (n < 1 || ordinal < 0 || ordinal >= nn * nn) {
        throw Error(ErrorCode::IndexOutOfRange, "ordinal " + std::to_string(ordinal) + " outside grid");
    }
    if (ordinal < nn * (nn + 1) / 2) return lower_half_cell(ordinal);
    auto [a, b] = lower_half_cell(nn * nn - 1 - ordinal);
    return {n - 1 - a, n - 1 - b};
}

std::vector<std::pair<int, int>> diagonal_enumeration_oracle(int n) {
    std::vector<std::pair<int, int>> cells;
    if (n < 1) return cells;
    cells.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    for (int d = 0; d <= 2 * (n - 1); ++d) {
        for (int a = 0; a < n; ++a) {
            const int b = d - a;
            if (b >= 0 && b < n) cells.emplace_back(a, b);
        }
    }
    return cells;
}

std::int64_t zone_ordinal(const ZoneId& z, const GridSpec& g) {
    if (!is_valid(z, g)) throw Error(ErrorCode::IndexOutOfRange, "zone outside grid");
    return static_cast<std::int64_t>(z.layer) * g.n * g.n + drone_zone_value(z.row, z.col, g.n);
}

std::vector<ZoneId> neighbors_of(const ZoneId& z, const GridSpec& g) {
    std::vector<ZoneId> out;
    const ZoneId candidates[] = {
        {z.row - 1, z.col, z.layer}, {z.row + 1, z.col, z.layer}, {z.row, z.col - 1, z.layer},
        {z.row, z.col + 1, z.layer}, {z.row, z.col, z.layer - 1}, {z.row, z.col, z.layer + 1},
    };
    for (const auto& c : candidates) {
        if (is_valid(c, g)) out.push_back(c);
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool are_layer_adjacent(const ZoneId& a, const ZoneId& b) noexcept {
    return a.layer == b.layer && std::abs(a.row - b.row) + std::abs(a.col - b.col) == 1;
}

bool are_vertically_adjacent(const ZoneId& a, const ZoneId& b) noexcept {
    return a.row == b.row && a.col == b.col && std::abs(a.layer - b.layer) == 1;
}

namespace {

int pairs_per_layer(const GridSpec& g) noexcept { return 2 * g.n * (g.n - 1); }

// Index of the in-layer pair {left, right} with left < right.
int pair_index(const ZoneId& left, const ZoneId& right, const GridSpec& g) {
    const int n = g.n;
    const int base = left.layer * pairs_per_layer(g);
    if (left.row == right.row) return base + left.row * (n - 1) + left.col;
    return base + n * (n - 1) + left.row * n + left.col;
}

}  // namespace

int transfer_area_count(const GridSpec& g) noexcept { return 2 * pairs_per_layer(g) * g.layers; }

TransferArea transfer_area(int id, const GridSpec& g) {
    if (id < 0 || id >= transfer_area_count(g)) {
        throw Error(ErrorCode::IndexOutOfRange, "transfer area " + std::to_string(id) + " does not exist");
    }
    const int n = g.n;
    const int pair = id / 2;
    const int layer = pair / pairs_per_layer(g);
    int local = pair % pairs_per_layer(g);
    TransferArea area;
    area.id = id;
    area.direction = (id % 2 == 0) ? TransferDirection::LeftToRight : TransferDirection::RightToLeft;
    if (local < n * (n - 1)) {
        const int row = local / (n - 1);
        const int col = local % (n - 1);
        area.left = {row, col, layer};
        area.right = {row, col + 1, layer};
    } else {
        local -= n * (n - 1);
        const int row = local / n;
        const int col = local % n;
        area.left = {row, col, layer};
        area.right = {row + 1, col, layer};
    }
    return area;
}

TransferArea transfer_lane(const ZoneId& from, const ZoneId& to, const GridSpec& g) {
    if (!is_valid(from, g) || !is_valid(to, g)) throw Error(ErrorCode::IndexOutOfRange, "zone outside grid");
    if (!are_layer_adjacent(from, to)) throw Error(ErrorCode::NotAdjacent, "zones are not in-layer neighbours");
    const bool forward = from < to;
    const ZoneId& left = forward ? from : to;
    const ZoneId& right = forward ? to : from;
    return transfer_area(2 * pair_index(left, right, g) + (forward ? 0 : 1), g);
}

Position transfer_area_position(const TransferArea& area, const GridSpec& g) {
    const double offset = area.direction == TransferDirection::LeftToRight ? 0.25 : 0.75;
    if (area.left.row == area.right.row) {
        return Position{(area.left.row + offset) * g.tau, (area.left.col + 1) * g.tau, area.left.layer};
    }
    return Position{(area.left.row + 1) * g.tau, (area.left.col + offset) * g.tau, area.left.layer};
}

}  // namespace swarmzones
