#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "swarmzones/fleet.hpp"
#include "swarmzones/zone_grid.hpp"

namespace swarmzones {

enum class Strategy { FixedArea, Zigzag, Parallel, MultiLayer, Hybrid };
enum class RequestStatus { Pending, InProgress, Done, Aborted };

std::string_view to_string(Strategy s) noexcept;
std::optional<Strategy> strategy_from_string(std::string_view s) noexcept;
std::string_view to_string(RequestStatus s) noexcept;

/// A ledger cell: either a zone or a transfer lane.
struct Cell {
    enum class Kind { Zone, Lane };
    Kind kind = Kind::Zone;
    ZoneId zone;
    int lane = -1;

    static Cell of(const ZoneId& z) { return Cell{Kind::Zone, z, -1}; }
    static Cell of_lane(int lane_id) { return Cell{Kind::Lane, ZoneId{}, lane_id}; }

    friend bool operator==(const Cell& a, const Cell& b) {
        return a.kind == b.kind && (a.kind == Kind::Zone ? a.zone == b.zone : a.lane == b.lane);
    }
};

std::string describe(const Cell& c);

/// Adjacency used by every protocol move: in-layer neighbours, vertical
/// neighbours, and a zone with the lanes on its boundaries.
bool cells_adjacent(const Cell& a, const Cell& b, const GridSpec& g);

struct LedgerTransition {
    std::int64_t tick = 0;
    DroneId drone = 0;
    std::optional<Cell> from;  // empty: drone entered the area
    std::optional<Cell> to;    // empty: drone left the area
    int request = -1;          // owning request, -1 for sweeps and external traffic
};

/// Capacity-1 occupancy of every zone and lane. Each drone appears in at most
/// one cell; every mutation preserves that and is journaled.
class OccupancyLedger {
public:
    explicit OccupancyLedger(const GridSpec& g);

    const GridSpec& grid() const noexcept { return grid_; }
    int cell_count() const noexcept { return static_cast<int>(cells_.size()); }

    std::optional<DroneId> occupant(const Cell& c) const;
    std::optional<Cell> cell_of(DroneId d) const;
    bool is_free(const Cell& c) const { return !occupant(c).has_value(); }
    std::size_t drone_count() const noexcept { return where_.size(); }

    void place(DroneId d, const Cell& c, int request = -1);
    void remove(DroneId d, int request = -1);
    /// Throws NotAdjacent or CellOccupied; the ledger is unchanged on error.
    void move(DroneId d, const Cell& to, int request = -1);

    // Reservations keep other requests (and external parking) out of cells a
    // protocol will need. They do not block the current occupant.
    std::optional<int> reserved_by(const Cell& c) const;
    bool try_reserve(std::span<const Cell> cells, int request, std::span<const DroneId> participants);
    void release(int request);

    /// Full recomputation of the collision invariant.
    bool check_invariants() const;

    void set_clock(std::int64_t tick) noexcept { clock_ = tick; }
    std::vector<LedgerTransition> drain_journal();
    const std::vector<LedgerTransition>& journal() const noexcept { return journal_; }

    std::vector<std::pair<DroneId, Cell>> snapshot() const;

private:
    int index_of(const Cell& c) const;
    Cell cell_at(int index) const;

    GridSpec grid_;
    std::vector<std::optional<DroneId>> cells_;
    std::vector<int> reservations_;  // -1 when free
    std::map<DroneId, int> where_;
    std::vector<LedgerTransition> journal_;
    std::int64_t clock_ = 0;
};

struct SwapRequest {
    int id = 0;
    DroneId requester = 0;
    ZoneId from;
    ZoneId to;
    Strategy strategy = Strategy::FixedArea;
    RequestStatus status = RequestStatus::Pending;
    std::int64_t issued_at = 0;

    /// Throws Error{InvalidRequest} when from == to.
    static SwapRequest make(int id, DroneId requester, ZoneId from, ZoneId to, Strategy strategy,
                            std::int64_t issued_at);
};

struct ProtocolMove {
    DroneId drone = 0;
    Cell to;
};

struct ProtocolStep {
    std::vector<ProtocolMove> moves;
    std::vector<Cell> wait_until_free;
};

/// Runtime state of one request: the compiled script and its progress.
struct TransferSession {
    SwapRequest request;
    std::optional<DroneId> partner;
    std::vector<ProtocolStep> steps;
    std::size_t next_step = 0;
    std::vector<std::vector<std::pair<DroneId, Cell>>> executed;  // origins, for rollback
    std::int64_t last_progress = 0;
    std::int64_t finished_at = -1;
    int timeout_ticks = 20;
    bool rolling_back = false;
    bool move_to_empty = false;
    std::string abort_reason;

    bool live() const noexcept {
        return request.status == RequestStatus::Pending || request.status == RequestStatus::InProgress ||
               rolling_back;
    }
    std::vector<DroneId> participants() const;
};

/// One tick of the single-layer fixed transfer-area protocol.
RequestStatus fixed_area_swap_step(TransferSession& s, OccupancyLedger& ledger, std::int64_t now);

/// One tick of the two-layer protocol (operation layer m, transfer layer m-1).
RequestStatus multilayer_swap(TransferSession& s, OccupancyLedger& ledger, std::int64_t now);

struct ZigzagHop {
    ZoneId next;
    bool exits = false;  // completed the circuit; `next` is the entry zone
};

/// Next zone on the diagonal route; the entry zone is ordinal 0.
ZigzagHop zigzag_route(const ZoneId& current, const GridSpec& g);

struct SweepPlacement {
    DroneId drone = 0;
    ZoneId zone;
};

/// Row r is served by roster[(r + stagger) mod k], all at column `col`.
std::vector<SweepPlacement> parallel_sweep_step(std::span<const DroneId> roster, int col, int stagger, int layer,
                                                const GridSpec& g);

/// Column-by-column sweep of one layer. Drones enter at column 0 through the
/// entry points, leave after the last column, and re-enter with the stagger
/// advanced once per elapsed rotation interval.
class ParallelSweep {
public:
    ParallelSweep(std::vector<DroneId> roster, int layer, const GridSpec& g, std::int64_t rotation_interval);

    /// Advances the sweep one tick. Returns false when blocked this tick.
    bool step(OccupancyLedger& ledger, std::int64_t now);

    int column() const noexcept { return column_; }
    int stagger() const noexcept { return stagger_; }
    bool on_grid() const noexcept { return on_grid_; }
    const std::vector<DroneId>& roster() const noexcept { return roster_; }
    int layer() const noexcept { return layer_; }

private:
    std::vector<DroneId> roster_;
    int layer_;
    GridSpec grid_;
    std::int64_t rotation_interval_;
    std::int64_t last_rotation_ = 0;
    int column_ = 0;
    int stagger_ = 0;
    bool on_grid_ = false;
};

struct HybridLevel {
    std::string area;
    int layer = 0;
    Strategy strategy = Strategy::FixedArea;
};

struct HybridPlan {
    std::vector<HybridLevel> levels;
    std::vector<std::optional<Strategy>> layer_strategy;  // per layer, empty when unused
    std::vector<bool> transfer_layer;                    // reserved for two-layer crossings
};

/// Throws LayerOverlap, MissingTransferLayer, IndexOutOfRange or InvalidArgument.
HybridPlan hybrid_plan(std::span<const HybridLevel> levels, const GridSpec& g);

/// Occupants of neighbouring zones when `d` is inside a collision band.
std::vector<DroneId> band_signal(const Drone& d, const GridSpec& g, const OccupancyLedger& ledger);

struct TransferConfig {
    int timeout_ticks = 20;
};

/// Owns the ledger and every live request; processes requests in
/// (issued_at, requester, id) order once per tick.
class TransferCoordinator {
public:
    TransferCoordinator(const GridSpec& g, TransferConfig cfg = {});

    OccupancyLedger& ledger() noexcept { return ledger_; }
    const OccupancyLedger& ledger() const noexcept { return ledger_; }

    /// Validates and queues a request; throws InvalidRequest, NotAdjacent or MissingTransferLayer.
    int submit(DroneId requester, const ZoneId& from, const ZoneId& to, Strategy strategy, std::int64_t now);

    void tick(std::int64_t now);

    const TransferSession& session(int id) const { return sessions_.at(id); }
    const std::map<int, TransferSession>& sessions() const noexcept { return sessions_; }
    bool is_busy(DroneId d) const;
    std::size_t live_count() const;

    /// Drops finished sessions older than `before` to bound memory in long runs.
    void prune(std::int64_t before);

private:
    GridSpec grid_;
    TransferConfig cfg_;
    OccupancyLedger ledger_;
    std::map<int, TransferSession> sessions_;
    int next_id_ = 0;
};

}  // namespace swarmzones
