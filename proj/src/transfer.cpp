#include "swarmzones/transfer.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <string>
#include <tuple>

#include "swarmzones/error.hpp"

namespace swarmzones {

namespace {

constexpr std::array<std::pair<Strategy, std::string_view>, 5> kStrategyNames{{
    {Strategy::FixedArea, "FixedArea"},
    {Strategy::Zigzag, "Zigzag"},
    {Strategy::Parallel, "Parallel"},
    {Strategy::MultiLayer, "MultiLayer"},
    {Strategy::Hybrid, "Hybrid"},
}};

std::string zone_text(const ZoneId& z) {
    return "(" + std::to_string(z.row) + "," + std::to_string(z.col) + "," + std::to_string(z.layer) + ")";
}

}  // namespace

std::string_view to_string(Strategy s) noexcept {
    for (const auto& [v, name] : kStrategyNames) {
        if (v == s) return name;
    }
    return "Unknown";
}

std::optional<Strategy> strategy_from_string(std::string_view s) noexcept {
    for (const auto& [v, name] : kStrategyNames) {
        if (name == s) return v;
    }
    return std::nullopt;
}

std::string_view to_string(RequestStatus s) noexcept {
    switch (s) {
        case RequestStatus::Pending: return "Pending";
        case RequestStatus::InProgress: return "InProgress";
        case RequestStatus::Done: return "Done";
        case RequestStatus::Aborted: return "Aborted";
    }
    return "Unknown";
}

std::string describe(const Cell& c) {
    if (c.kind == Cell::Kind::Zone) return "zone" + zone_text(c.zone);
    return "lane" + std::to_string(c.lane);
}

bool cells_adjacent(const Cell& a, const Cell& b, const GridSpec& g) {
    using K = Cell::Kind;
    if (a.kind == K::Zone && b.kind == K::Zone) {
        return are_layer_adjacent(a.zone, b.zone) || are_vertically_adjacent(a.zone, b.zone);
    }
    if (a.kind == K::Lane && b.kind == K::Lane) return false;
    const Cell& zone = a.kind == K::Zone ? a : b;
    const Cell& lane = a.kind == K::Lane ? a : b;
    const TransferArea area = transfer_area(lane.lane, g);
    return area.left == zone.zone || area.right == zone.zone;
}

// ---------------------------------------------------------------------------
// OccupancyLedger

OccupancyLedger::OccupancyLedger(const GridSpec& g) : grid_(g) {
    g.validate();
    const auto total = static_cast<std::size_t>(g.zone_count() + transfer_area_count(g));
    cells_.assign(total, std::nullopt);
    reservations_.assign(total, -1);
}

int OccupancyLedger::index_of(const Cell& c) const {
    if (c.kind == Cell::Kind::Zone) {
        if (!is_valid(c.zone, grid_)) throw Error(ErrorCode::IndexOutOfRange, describe(c) + " outside grid");
        return (c.zone.layer * grid_.n + c.zone.row) * grid_.n + c.zone.col;
    }
    if (c.lane < 0 || c.lane >= transfer_area_count(grid_)) {
        throw Error(ErrorCode::IndexOutOfRange, describe(c) + " does not exist");
    }
    return grid_.zone_count() + c.lane;
}

Cell OccupancyLedger::cell_at(int index) const {
    if (index >= grid_.zone_count()) return Cell::of_lane(index - grid_.zone_count());
    const int per_layer = grid_.n * grid_.n;
    const int layer = index / per_layer;
    const int rem = index % per_layer;
    return Cell::of(ZoneId{rem / grid_.n, rem % grid_.n, layer});
}

std::optional<DroneId> OccupancyLedger::occupant(const Cell& c) const { return cells_[index_of(c)]; }

std::optional<Cell> OccupancyLedger::cell_of(DroneId d) const {
    auto it = where_.find(d);
    if (it == where_.end()) return std::nullopt;
    return cell_at(it->second);
}

void OccupancyLedger::place(DroneId d, const Cell& c, int request) {
    const int idx = index_of(c);
    if (where_.count(d) != 0) {
        throw Error(ErrorCode::InvalidRequest, "drone " + std::to_string(d) + " already in the ledger");
    }
    if (cells_[idx]) throw Error(ErrorCode::CellOccupied, describe(c) + " holds drone " + std::to_string(*cells_[idx]));
    if (reservations_[idx] != -1 && reservations_[idx] != request) {
        throw Error(ErrorCode::CellOccupied, describe(c) + " reserved by request " + std::to_string(reservations_[idx]));
    }
    cells_[idx] = d;
    where_[d] = idx;
    journal_.push_back({clock_, d, std::nullopt, c, request});
}

void OccupancyLedger::remove(DroneId d, int request) {
    auto it = where_.find(d);
    if (it == where_.end()) throw Error(ErrorCode::DroneAbsent, "drone " + std::to_string(d) + " not in the ledger");
    const Cell from = cell_at(it->second);
    cells_[it->second].reset();
    where_.erase(it);
    journal_.push_back({clock_, d, from, std::nullopt, request});
}

void OccupancyLedger::move(DroneId d, const Cell& to, int request) {
    auto it = where_.find(d);
    if (it == where_.end()) throw Error(ErrorCode::DroneAbsent, "drone " + std::to_string(d) + " not in the ledger");
    const int dst = index_of(to);
    const Cell from = cell_at(it->second);
    if (!cells_adjacent(from, to, grid_)) {
        throw Error(ErrorCode::NotAdjacent, describe(from) + " -> " + describe(to));
    }
    if (cells_[dst]) throw Error(ErrorCode::CellOccupied, describe(to) + " holds drone " + std::to_string(*cells_[dst]));
    if (reservations_[dst] != -1 && reservations_[dst] != request) {
        throw Error(ErrorCode::CellOccupied, describe(to) + " reserved by request " + std::to_string(reservations_[dst]));
    }
    cells_[it->second].reset();
    cells_[dst] = d;
    it->second = dst;
    journal_.push_back({clock_, d, from, to, request});
}

std::optional<int> OccupancyLedger::reserved_by(const Cell& c) const {
    const int r = reservations_[index_of(c)];
    if (r == -1) return std::nullopt;
    return r;
}

bool OccupancyLedger::try_reserve(std::span<const Cell> cells, int request, std::span<const DroneId> participants) {
    for (const auto& c : cells) {
        const int idx = index_of(c);
        if (reservations_[idx] != -1 && reservations_[idx] != request) return false;
        if (cells_[idx] && std::find(participants.begin(), participants.end(), *cells_[idx]) == participants.end()) {
            return false;
        }
    }
    for (const auto& c : cells) reservations_[index_of(c)] = request;
    return true;
}

void OccupancyLedger::release(int request) {
    std::replace(reservations_.begin(), reservations_.end(), request, -1);
}

bool OccupancyLedger::check_invariants() const {
    std::size_t occupied = 0;
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        if (!cells_[i]) continue;
        ++occupied;
        auto it = where_.find(*cells_[i]);
        if (it == where_.end() || it->second != static_cast<int>(i)) return false;
    }
    if (occupied != where_.size()) return false;
    for (const auto& [drone, idx] : where_) {
        if (idx < 0 || idx >= static_cast<int>(cells_.size()) || cells_[idx] != drone) return false;
    }
    return true;
}

std::vector<LedgerTransition> OccupancyLedger::drain_journal() {
    std::vector<LedgerTransition> out;
    out.swap(journal_);
    return out;
}

std::vector<std::pair<DroneId, Cell>> OccupancyLedger::snapshot() const {
    std::vector<std::pair<DroneId, Cell>> out;
    out.reserve(where_.size());
    for (const auto& [drone, idx] : where_) out.emplace_back(drone, cell_at(idx));
    return out;
}

// ---------------------------------------------------------------------------
// Requests and sessions

SwapRequest SwapRequest::make(int id, DroneId requester, ZoneId from, ZoneId to, Strategy strategy,
                              std::int64_t issued_at) {
    if (from == to) throw Error(ErrorCode::InvalidRequest, "request " + std::to_string(id) + " has from == to");
    return SwapRequest{id, requester, from, to, strategy, RequestStatus::Pending, issued_at};
}

std::vector<DroneId> TransferSession::participants() const {
    std::vector<DroneId> out{request.requester};
    if (partner) out.push_back(*partner);
    return out;
}

namespace {

// Applies a step atomically: either every guard and move succeeds or nothing changes.
bool apply_step(const ProtocolStep& step, OccupancyLedger& ledger, int request,
                std::vector<std::pair<DroneId, Cell>>* origins) {
    for (const auto& c : step.wait_until_free) {
        if (!ledger.is_free(c)) return false;
    }
    std::vector<std::pair<Cell, std::optional<DroneId>>> overlay;
    auto occupant_now = [&](const Cell& c) -> std::optional<DroneId> {
        for (auto it = overlay.rbegin(); it != overlay.rend(); ++it) {
            if (it->first == c) return it->second;
        }
        return ledger.occupant(c);
    };
    std::vector<std::pair<DroneId, Cell>> where_now;
    auto cell_now = [&](DroneId d) -> std::optional<Cell> {
        for (auto it = where_now.rbegin(); it != where_now.rend(); ++it) {
            if (it->first == d) return it->second;
        }
        return ledger.cell_of(d);
    };
    for (const auto& mv : step.moves) {
        const auto from = cell_now(mv.drone);
        if (!from) return false;
        if (occupant_now(mv.to)) return false;
        const auto res = ledger.reserved_by(mv.to);
        if (res && *res != request) return false;
        if (!cells_adjacent(*from, mv.to, ledger.grid())) return false;
        overlay.emplace_back(*from, std::nullopt);
        overlay.emplace_back(mv.to, mv.drone);
        where_now.emplace_back(mv.drone, mv.to);
    }
    std::vector<std::pair<DroneId, Cell>> done;
    for (const auto& mv : step.moves) {
        done.emplace_back(mv.drone, *ledger.cell_of(mv.drone));
        ledger.move(mv.drone, mv.to, request);
    }
    if (origins) *origins = std::move(done);
    return true;
}

void finish(TransferSession& s, OccupancyLedger& ledger, RequestStatus status, std::int64_t now) {
    s.request.status = status;
    if (status == RequestStatus::Aborted && !s.executed.empty()) {
        s.rolling_back = true;
        return;
    }
    ledger.release(s.request.id);
    s.finished_at = now;
}

void abort_session(TransferSession& s, OccupancyLedger& ledger, std::int64_t now, std::string reason) {
    s.abort_reason = std::move(reason);
    finish(s, ledger, RequestStatus::Aborted, now);
}

// Executes (or rolls back) one step of an already planned session.
RequestStatus advance_session(TransferSession& s, OccupancyLedger& ledger, std::int64_t now) {
    if (s.rolling_back) {
        ProtocolStep undo;
        const auto& last = s.executed.back();
        for (auto it = last.rbegin(); it != last.rend(); ++it) undo.moves.push_back({it->first, it->second});
        if (apply_step(undo, ledger, s.request.id, nullptr)) {
            s.executed.pop_back();
            if (s.executed.empty()) {
                s.rolling_back = false;
                ledger.release(s.request.id);
                s.finished_at = now;
            }
        }
        return s.request.status;
    }
    if (s.request.status != RequestStatus::InProgress) return s.request.status;

    std::vector<std::pair<DroneId, Cell>> origins;
    if (apply_step(s.steps[s.next_step], ledger, s.request.id, &origins)) {
        s.executed.push_back(std::move(origins));
        ++s.next_step;
        s.last_progress = now;
        if (s.next_step == s.steps.size()) finish(s, ledger, RequestStatus::Done, now);
    } else if (now - s.last_progress >= s.timeout_ticks) {
        abort_session(s, ledger, now, "stalled past timeout");
    }
    return s.request.status;
}

bool pending_timed_out(TransferSession& s, OccupancyLedger& ledger, std::int64_t now) {
    if (now - s.request.issued_at >= s.timeout_ticks) {
        abort_session(s, ledger, now, "pending past timeout");
        return true;
    }
    return false;
}

bool start_session(TransferSession& s, OccupancyLedger& ledger, std::vector<ProtocolStep> steps,
                   const std::vector<Cell>& cells, std::int64_t now) {
    const auto people = s.participants();
    if (!ledger.try_reserve(cells, s.request.id, people)) return false;
    s.steps = std::move(steps);
    s.next_step = 0;
    s.request.status = RequestStatus::InProgress;
    s.last_progress = now;
    return true;
}

bool requester_in_place(TransferSession& s, OccupancyLedger& ledger, std::int64_t now) {
    const auto at = ledger.cell_of(s.request.requester);
    if (!at || !(*at == Cell::of(s.request.from))) {
        abort_session(s, ledger, now, "requester not in source zone");
        return false;
    }
    return true;
}

bool lane_available(const OccupancyLedger& ledger, const Cell& lane, int request) {
    const auto res = ledger.reserved_by(lane);
    return ledger.is_free(lane) && (!res || *res == request);
}

bool plan_fixed_area(TransferSession& s, OccupancyLedger& ledger, std::int64_t now) {
    const GridSpec& g = ledger.grid();
    const SwapRequest& req = s.request;
    const auto partner = ledger.occupant(Cell::of(req.to));
    const ZoneId left = std::min(req.from, req.to);
    const ZoneId right = std::max(req.from, req.to);
    const Cell cl = Cell::of(left);
    const Cell cr = Cell::of(right);

    std::vector<ProtocolStep> steps;
    std::vector<Cell> cells{cl, cr};
    s.partner = partner;
    if (!partner) {
        s.move_to_empty = true;
        steps.push_back({{{req.requester, Cell::of(req.to)}}, {}});
        return start_session(s, ledger, std::move(steps), cells, now);
    }
    const DroneId dl = *ledger.occupant(cl);
    const DroneId dr = *ledger.occupant(cr);
    const Cell lr = Cell::of_lane(transfer_lane(left, right, g).id);
    const Cell rl = Cell::of_lane(transfer_lane(right, left, g).id);
    const bool lr_free = lane_available(ledger, lr, req.id);
    const bool rl_free = lane_available(ledger, rl, req.id);

    if (lr_free && rl_free) {
        steps.push_back({{{dl, lr}, {dr, rl}}, {}});
        steps.push_back({{{dl, cr}, {dr, cl}}, {}});
        cells.insert(cells.end(), {lr, rl});
    } else if (!lr_free && rl_free) {
        // Left drone parks in the opposite lane until T_LR clears.
        steps.push_back({{{dl, rl}}, {}});
        steps.push_back({{{dr, cl}}, {lr}});
        steps.push_back({{{dl, cr}}, {}});
        cells.push_back(rl);
    } else if (lr_free && !rl_free) {
        steps.push_back({{{dr, lr}}, {}});
        steps.push_back({{{dl, cr}}, {rl}});
        steps.push_back({{{dr, cl}}, {}});
        cells.push_back(lr);
    } else {
        return false;  // both lanes held; wait for one to clear or time out
    }
    return start_session(s, ledger, std::move(steps), cells, now);
}

std::vector<ZoneId> layer_path(const OccupancyLedger& ledger, const ZoneId& from, const ZoneId& to, int request) {
    const GridSpec& g = ledger.grid();
    auto usable = [&](const ZoneId& z) {
        const Cell c = Cell::of(z);
        const auto res = ledger.reserved_by(c);
        return ledger.is_free(c) && (!res || *res == request);
    };
    if (!usable(from) || !usable(to)) return {};
    const int n = g.n;
    auto key = [n](const ZoneId& z) { return z.row * n + z.col; };
    std::vector<int> parent(static_cast<std::size_t>(n * n), -2);
    std::deque<ZoneId> frontier{from};
    parent[key(from)] = -1;
    while (!frontier.empty()) {
        const ZoneId cur = frontier.front();
        frontier.pop_front();
        if (cur == to) break;
        for (const auto& nb : neighbors_of(cur, g)) {
            if (nb.layer != cur.layer || parent[key(nb)] != -2 || !usable(nb)) continue;
            parent[key(nb)] = key(cur);
            frontier.push_back(nb);
        }
    }
    if (parent[key(to)] == -2) return {};
    std::vector<ZoneId> path;
    for (int k = key(to); k != -1; k = parent[k]) path.push_back(ZoneId{k / n, k % n, from.layer});
    std::reverse(path.begin(), path.end());
    return path;
}

bool plan_multilayer(TransferSession& s, OccupancyLedger& ledger, std::int64_t now) {
    const GridSpec& g = ledger.grid();
    const SwapRequest& req = s.request;
    const int t = req.from.layer - 1;
    const ZoneId from_t{req.from.row, req.from.col, t};
    const ZoneId to_t{req.to.row, req.to.col, t};
    const auto partner = ledger.occupant(Cell::of(req.to));
    s.partner = partner;
    s.move_to_empty = !partner;

    const auto path = layer_path(ledger, from_t, to_t, req.id);
    if (path.empty()) return false;  // transfer layer occupied; retry next tick

    std::vector<Cell> cells{Cell::of(req.from), Cell::of(req.to)};
    for (const auto& z : path) cells.push_back(Cell::of(z));
    std::vector<ProtocolStep> steps;
    const DroneId a = req.requester;

    if (!partner) {
        steps.push_back({{{a, Cell::of(from_t)}}, {}});
        for (std::size_t i = 1; i < path.size(); ++i) steps.push_back({{{a, Cell::of(path[i])}}, {}});
        steps.push_back({{{a, Cell::of(req.to)}}, {}});
        return start_session(s, ledger, std::move(steps), cells, now);
    }

    // Both ascend, walk towards each other, cross through the lane pair where
    // they meet, walk apart, then descend into the exchanged zones.
    const DroneId b = *partner;
    const int last = static_cast<int>(path.size()) - 1;
    int ia = 0;
    int ib = last;
    steps.push_back({{{a, Cell::of(path[0])}, {b, Cell::of(path[last])}}, {}});
    while (ib - ia >= 3) {
        ++ia;
        --ib;
        steps.push_back({{{a, Cell::of(path[ia])}, {b, Cell::of(path[ib])}}, {}});
    }
    if (ib - ia == 2) {
        ++ia;
        steps.push_back({{{a, Cell::of(path[ia])}}, {}});
    }
    const Cell lane_ab = Cell::of_lane(transfer_lane(path[ia], path[ib], g).id);
    const Cell lane_ba = Cell::of_lane(transfer_lane(path[ib], path[ia], g).id);
    if (!lane_available(ledger, lane_ab, req.id) || !lane_available(ledger, lane_ba, req.id)) return false;
    cells.insert(cells.end(), {lane_ab, lane_ba});
    steps.push_back({{{a, lane_ab}, {b, lane_ba}}, {}});
    steps.push_back({{{a, Cell::of(path[ib])}, {b, Cell::of(path[ia])}}, {}});
    std::swap(ia, ib);
    while (ia < last || ib > 0) {
        ProtocolStep step;
        if (ia < last) step.moves.push_back({a, Cell::of(path[++ia])});
        if (ib > 0) step.moves.push_back({b, Cell::of(path[--ib])});
        steps.push_back(std::move(step));
    }
    steps.push_back({{{a, Cell::of(req.to)}, {b, Cell::of(req.from)}}, {}});
    return start_session(s, ledger, std::move(steps), cells, now);
}

}  // namespace

RequestStatus fixed_area_swap_step(TransferSession& s, OccupancyLedger& ledger, std::int64_t now) {
    if (s.request.status == RequestStatus::Pending) {
        if (!are_layer_adjacent(s.request.from, s.request.to)) {
            throw Error(ErrorCode::NotAdjacent, zone_text(s.request.from) + " and " + zone_text(s.request.to));
        }
        if (!requester_in_place(s, ledger, now)) return s.request.status;
        if (!plan_fixed_area(s, ledger, now)) {
            pending_timed_out(s, ledger, now);
            return s.request.status;
        }
    }
    return advance_session(s, ledger, now);
}

RequestStatus multilayer_swap(TransferSession& s, OccupancyLedger& ledger, std::int64_t now) {
    if (s.request.status == RequestStatus::Pending) {
        if (s.request.from.layer < 1 || s.request.from.layer != s.request.to.layer) {
            throw Error(ErrorCode::MissingTransferLayer, "no transfer layer above " + zone_text(s.request.from));
        }
        if (!requester_in_place(s, ledger, now)) return s.request.status;
        if (!plan_multilayer(s, ledger, now)) {
            pending_timed_out(s, ledger, now);
            return s.request.status;
        }
    }
    return advance_session(s, ledger, now);
}

// ---------------------------------------------------------------------------
// Zigzag and parallel sweeps

ZigzagHop zigzag_route(const ZoneId& current, const GridSpec& g) {
    if (!is_valid(current, g)) throw Error(ErrorCode::IndexOutOfRange, "zone outside grid");
    const std::int64_t ordinal = drone_zone_value(current.row, current.col, g.n);
    const std::int64_t last = static_cast<std::int64_t>(g.n) * g.n - 1;
    const bool exits = ordinal == last;
    const auto [row, col] = cell_at_zone_value(exits ? 0 : ordinal + 1, g.n);
    return ZigzagHop{ZoneId{row, col, current.layer}, exits};
}

std::vector<SweepPlacement> parallel_sweep_step(std::span<const DroneId> roster, int col, int stagger, int layer,
                                                const GridSpec& g) {
    if (col < 0 || col >= g.n || layer < 0 || layer >= g.layers) {
        throw Error(ErrorCode::IndexOutOfRange, "sweep column or layer outside grid");
    }
    if (roster.empty() || static_cast<int>(roster.size()) > g.n) {
        throw Error(ErrorCode::RowConflict, "sweep needs between 1 and n drones, got " + std::to_string(roster.size()));
    }
    std::vector<DroneId> sorted(roster.begin(), roster.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw Error(ErrorCode::RowConflict, "a drone is assigned to more than one row");
    }
    const int k = static_cast<int>(roster.size());
    const int shift = ((stagger % k) + k) % k;
    std::vector<SweepPlacement> out;
    out.reserve(roster.size());
    for (int r = 0; r < k; ++r) out.push_back({roster[static_cast<std::size_t>((r + shift) % k)], ZoneId{r, col, layer}});
    return out;
}

ParallelSweep::ParallelSweep(std::vector<DroneId> roster, int layer, const GridSpec& g, std::int64_t rotation_interval)
    : roster_(std::move(roster)), layer_(layer), grid_(g), rotation_interval_(rotation_interval) {
    (void)parallel_sweep_step(roster_, 0, 0, layer_, grid_);  // validates roster and layer
}

bool ParallelSweep::step(OccupancyLedger& ledger, std::int64_t now) {
    ledger.set_clock(now);
    if (!on_grid_) {
        if (rotation_interval_ > 0 && now - last_rotation_ >= rotation_interval_) {
            const std::int64_t spent = (now - last_rotation_) / rotation_interval_;
            stagger_ = static_cast<int>((stagger_ + spent) % static_cast<std::int64_t>(roster_.size()));
            last_rotation_ += spent * rotation_interval_;
        }
        const auto placements = parallel_sweep_step(roster_, 0, stagger_, layer_, grid_);
        for (const auto& p : placements) {
            const Cell c = Cell::of(p.zone);
            if (!ledger.is_free(c) || ledger.reserved_by(c)) return false;
        }
        for (const auto& p : placements) ledger.place(p.drone, Cell::of(p.zone));
        on_grid_ = true;
        column_ = 0;
        return true;
    }
    if (grid_.n == 1) return true;  // single column: the sweep is a fixed point
    if (column_ == grid_.n - 1) {
        for (const auto d : roster_) ledger.remove(d);
        on_grid_ = false;
        return true;
    }
    const auto placements = parallel_sweep_step(roster_, column_ + 1, stagger_, layer_, grid_);
    for (const auto& p : placements) {
        const Cell c = Cell::of(p.zone);
        if (!ledger.is_free(c) || ledger.reserved_by(c)) return false;
    }
    for (const auto& p : placements) ledger.move(p.drone, Cell::of(p.zone));
    ++column_;
    return true;
}

// ---------------------------------------------------------------------------
// Hybrid plans and band signalling

HybridPlan hybrid_plan(std::span<const HybridLevel> levels, const GridSpec& g) {
    HybridPlan plan;
    plan.levels.assign(levels.begin(), levels.end());
    plan.layer_strategy.assign(static_cast<std::size_t>(g.layers), std::nullopt);
    plan.transfer_layer.assign(static_cast<std::size_t>(g.layers), false);
    for (const auto& lv : levels) {
        if (lv.strategy == Strategy::Hybrid) {
            throw Error(ErrorCode::InvalidArgument, "level '" + lv.area + "' cannot itself be Hybrid");
        }
        if (lv.layer < 0 || lv.layer >= g.layers) {
            throw Error(ErrorCode::IndexOutOfRange, "level '" + lv.area + "' on layer " + std::to_string(lv.layer) +
                                                        " outside " + std::to_string(g.layers) + " layers");
        }
        auto& slot = plan.layer_strategy[static_cast<std::size_t>(lv.layer)];
        if (slot) throw Error(ErrorCode::LayerOverlap, "layer " + std::to_string(lv.layer) + " assigned twice");
        slot = lv.strategy;
    }
    for (const auto& lv : levels) {
        if (lv.strategy != Strategy::MultiLayer) continue;
        const int above = lv.layer - 1;
        if (above < 0 || plan.layer_strategy[static_cast<std::size_t>(above)] ||
            plan.transfer_layer[static_cast<std::size_t>(above)]) {
            throw Error(ErrorCode::MissingTransferLayer, "level '" + lv.area + "' has no free transfer layer above");
        }
        plan.transfer_layer[static_cast<std::size_t>(above)] = true;
    }
    return plan;
}

std::vector<DroneId> band_signal(const Drone& d, const GridSpec& g, const OccupancyLedger& ledger) {
    std::vector<DroneId> out;
    if (!in_collision_band(d.position, g)) return out;
    const ZoneId here = zone_of_position(d.position, g);
    for (const auto& nb : neighbors_of(here, g)) {
        if (const auto occ = ledger.occupant(Cell::of(nb)); occ && *occ != d.id) out.push_back(*occ);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// TransferCoordinator

TransferCoordinator::TransferCoordinator(const GridSpec& g, TransferConfig cfg)
    : grid_(g), cfg_(cfg), ledger_(g) {}

int TransferCoordinator::submit(DroneId requester, const ZoneId& from, const ZoneId& to, Strategy strategy,
                                std::int64_t now) {
    if (!is_valid(from, grid_) || !is_valid(to, grid_)) {
        throw Error(ErrorCode::IndexOutOfRange, "request zones outside grid");
    }
    const int id = next_id_;
    auto req = SwapRequest::make(id, requester, from, to, strategy, now);
    switch (strategy) {
        case Strategy::FixedArea:
            if (!are_layer_adjacent(from, to)) {
                throw Error(ErrorCode::NotAdjacent, zone_text(from) + " and " + zone_text(to) + " share no transfer area");
            }
            break;
        case Strategy::MultiLayer:
            if (from.layer != to.layer || from.layer < 1) {
                throw Error(ErrorCode::MissingTransferLayer, "no transfer layer above " + zone_text(from));
            }
            break;
        default:
            throw Error(ErrorCode::InvalidRequest,
                        std::string(to_string(strategy)) + " routes are not zone-transfer requests");
    }
    ++next_id_;
    TransferSession s;
    s.request = req;
    s.timeout_ticks = cfg_.timeout_ticks;
    s.last_progress = now;
    sessions_.emplace(id, std::move(s));
    return id;
}

void TransferCoordinator::tick(std::int64_t now) {
    ledger_.set_clock(now);
    std::vector<TransferSession*> order;
    for (auto& [id, s] : sessions_) {
        if (s.live()) order.push_back(&s);
    }
    std::sort(order.begin(), order.end(), [](const TransferSession* a, const TransferSession* b) {
        return std::tie(a->request.issued_at, a->request.requester, a->request.id) <
               std::tie(b->request.issued_at, b->request.requester, b->request.id);
    });

    // First requester wins an empty target zone; later rivals are aborted.
    std::vector<ZoneId> claimed;
    for (auto* s : order) {
        if (s->request.strategy != Strategy::MultiLayer) continue;
        const Cell target = Cell::of(s->request.to);
        if (s->request.status != RequestStatus::Pending) {
            if (s->move_to_empty && s->request.status == RequestStatus::InProgress) claimed.push_back(s->request.to);
            continue;
        }
        if (!ledger_.is_free(target)) continue;
        if (std::find(claimed.begin(), claimed.end(), s->request.to) != claimed.end()) {
            abort_session(*s, ledger_, now, "target zone claimed by an earlier request");
            continue;
        }
        claimed.push_back(s->request.to);
    }

    for (auto* s : order) {
        if (!s->live()) continue;
        if (s->request.strategy == Strategy::FixedArea) {
            fixed_area_swap_step(*s, ledger_, now);
        } else {
            multilayer_swap(*s, ledger_, now);
        }
    }
}

bool TransferCoordinator::is_busy(DroneId d) const {
    for (const auto& [id, s] : sessions_) {
        if (!s.live()) continue;
        if (s.request.requester == d || (s.partner && *s.partner == d)) return true;
    }
    return false;
}

std::size_t TransferCoordinator::live_count() const {
    return static_cast<std::size_t>(
        std::count_if(sessions_.begin(), sessions_.end(), [](const auto& kv) { return kv.second.live(); }));
}

void TransferCoordinator::prune(std::int64_t before) {
    for (auto it = sessions_.begin(); it != sessions_.end();) {
        if (!it->second.live() && it->second.finished_at >= 0 && it->second.finished_at < before) {
            it = sessions_.erase(it);
        } else {
            ++it;
        }
    }
}

}  // namespace swarmzones
