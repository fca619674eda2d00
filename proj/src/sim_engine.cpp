#include "swarmzones/sim_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "swarmzones/error.hpp"

namespace swarmzones {

namespace {

// ---------------------------------------------------------------------------
// Operation levels

struct Level {
    int layer = 0;
    Strategy strategy = Strategy::FixedArea;
};

std::vector<Level> operation_levels(const Scenario& s) {
    if (s.strategy.kind == Strategy::Hybrid) {
        std::vector<Level> out;
        for (const auto& lv : s.strategy.levels) out.push_back({lv.layer, lv.strategy});
        return out;
    }
    return {Level{s.grid.layers - 1, s.strategy.kind}};
}

// ---------------------------------------------------------------------------
// Stations: how drones behave once they reach their operation layer


Position cell_position(const Cell& c, const GridSpec& g) {
    if (c.kind == Cell::Kind::Zone) return zone_center(c.zone, g);
    return transfer_area_position(transfer_area(c.lane, g), g);
}

bool usable(const OccupancyLedger& ledger, const Cell& c) { return ledger.is_free(c) && !ledger.reserved_by(c); }

using WantsHome = std::function<bool(DroneId)>;

class Station {
public:
    Station(TransferCoordinator& coord, const GridSpec& g, int layer)
        : coord_(coord), ledger_(coord.ledger()), grid_(g), layer_(layer) {}
    virtual ~Station() = default;

    int layer() const noexcept { return layer_; }
    Position depot() const noexcept { return Position{0.0, 0.0, layer_}; }

    virtual bool accepting() const = 0;
    /// Registers a dispatched drone and returns the point it should fly to.
    virtual Position dispatch(DroneId d, const std::vector<ZoneId>& priority) = 0;
    /// True once the drone is part of the station.
    virtual bool admit(DroneId d) = 0;
    virtual bool can_leave(DroneId d) const = 0;
    virtual void leave(DroneId d) = 0;
    virtual void protocol_tick(std::int64_t pt, bool swap_due, Rng& rng, const WantsHome& wants_home) = 0;

    /// Ledger cell if the drone holds one, otherwise its holding point.
    virtual Position target(DroneId d) const {
        if (auto c = ledger_.cell_of(d)) return cell_position(*c, grid_);
        return depot();
    }

protected:
    TransferCoordinator& coord_;
    OccupancyLedger& ledger_;
    GridSpec grid_;
    int layer_;
};

// FixedArea and MultiLayer: one drone per zone, periodic swaps through the
// transfer protocol.
class ZoneKeeper final : public Station {
public:
    ZoneKeeper(TransferCoordinator& coord, const GridSpec& g, int layer, Strategy strategy)
        : Station(coord, g, layer), strategy_(strategy), owner_(static_cast<std::size_t>(g.n * g.n), -1) {}

    bool accepting() const override {
        return std::find(owner_.begin(), owner_.end(), -1) != owner_.end();
    }

    Position dispatch(DroneId d, const std::vector<ZoneId>& priority) override {
        std::optional<ZoneId> pick;
        for (const auto& z : priority) {
            const ZoneId zl{z.row, z.col, layer_};
            if (owner_[slot(zl)] == -1) {
                pick = zl;
                break;
            }
        }
        if (!pick) {
            for (int i = 0; i < grid_.n * grid_.n; ++i) {
                const auto [r, c] = cell_at_zone_value(i, grid_.n);
                const ZoneId z{r, c, layer_};
                if (owner_[slot(z)] == -1) {
                    pick = z;
                    break;
                }
            }
        }
        if (!pick) throw Error(ErrorCode::TooManyDrones, "no free zone on layer " + std::to_string(layer_));
        owner_[slot(*pick)] = d;
        assigned_[d] = *pick;
        return zone_center(*pick, grid_);
    }

    bool admit(DroneId d) override {
        const Cell c = Cell::of(assigned_.at(d));
        if (!usable(ledger_, c)) return false;
        ledger_.place(d, c);
        placed_.insert(d);
        return true;
    }

    bool can_leave(DroneId d) const override { return !coord_.is_busy(d); }

    void leave(DroneId d) override {
        if (placed_.erase(d)) ledger_.remove(d);
        if (auto it = assigned_.find(d); it != assigned_.end()) {
            owner_[slot(it->second)] = -1;
            assigned_.erase(it);
        }
    }

    void protocol_tick(std::int64_t pt, bool swap_due, Rng& rng, const WantsHome& wants_home) override {
        reconcile();
        if (!swap_due) return;
        std::vector<DroneId> ready;
        for (const auto d : placed_) {
            if (!coord_.is_busy(d) && !wants_home(d)) ready.push_back(d);
        }
        if (ready.empty()) return;
        const DroneId d = ready[rng.below(ready.size())];
        const ZoneId from = assigned_.at(d);
        if (ledger_.cell_of(d) != std::optional<Cell>(Cell::of(from))) return;

        std::vector<ZoneId> options;
        if (strategy_ == Strategy::FixedArea) {
            for (const auto& z : neighbors_of(from, grid_)) {
                if (z.layer == layer_) options.push_back(z);
            }
        } else {
            for (int r = 0; r < grid_.n; ++r) {
                for (int c = 0; c < grid_.n; ++c) {
                    if (ZoneId{r, c, layer_} != from) options.push_back(ZoneId{r, c, layer_});
                }
            }
        }
        if (options.empty()) return;
        const ZoneId to = options[rng.below(options.size())];
        const int other = owner_[slot(to)];
        bool claim = false;
        if (other == -1) {
            if (!usable(ledger_, Cell::of(to))) return;
            claim = true;
        } else {
            const DroneId e = other;
            if (!placed_.count(e) || coord_.is_busy(e) || wants_home(e)) return;
            if (ledger_.cell_of(e) != std::optional<Cell>(Cell::of(to))) return;
        }
        try {
            const int id = coord_.submit(d, from, to, strategy_, pt);
            if (claim) owner_[slot(to)] = d;
            pending_[id] = Pending{d, from, to, claim};
        } catch (const Error&) {
            // Requests the protocol refuses are simply not issued.
        }
    }

    /// Applies finished requests to the zone assignments.
    void reconcile() {
        for (auto it = pending_.begin(); it != pending_.end();) {
            const auto& s = coord_.session(it->first);
            if (s.live()) {
                ++it;
                continue;
            }
            const Pending& p = it->second;
            if (s.request.status == RequestStatus::Done) {
                if (p.claim) {
                    owner_[slot(p.from)] = -1;
                    assigned_[p.requester] = p.to;
                } else if (s.partner) {
                    assigned_[p.requester] = p.to;
                    assigned_[*s.partner] = p.from;
                    owner_[slot(p.to)] = p.requester;
                    owner_[slot(p.from)] = *s.partner;
                }
            } else if (p.claim) {
                owner_[slot(p.to)] = -1;
            }
            it = pending_.erase(it);
        }
    }

    Position target(DroneId d) const override {
        if (auto c = ledger_.cell_of(d)) return cell_position(*c, grid_);
        return zone_center(assigned_.at(d), grid_);
    }

private:
    struct Pending {
        DroneId requester;
        ZoneId from;
        ZoneId to;
        bool claim;
    };

    std::size_t slot(const ZoneId& z) const { return static_cast<std::size_t>(z.row * grid_.n + z.col); }

    Strategy strategy_;
    std::vector<int> owner_;
    std::map<DroneId, ZoneId> assigned_;
    std::set<DroneId> placed_;
    std::map<int, Pending> pending_;
};

// Parallel: rosters of up to n drones sweep the layer column by column.
class Sweeper final : public Station {
public:
    Sweeper(TransferCoordinator& coord, const GridSpec& g, int layer, std::int64_t rotation)
        : Station(coord, g, layer), rotation_(rotation) {}

    bool accepting() const override { return true; }
    Position dispatch(DroneId, const std::vector<ZoneId>&) override { return depot(); }
    bool admit(DroneId d) override {
        pool_.push_back(d);
        return true;
    }
    bool can_leave(DroneId d) const override { return std::find(pool_.begin(), pool_.end(), d) != pool_.end(); }
    void leave(DroneId d) override { pool_.erase(std::remove(pool_.begin(), pool_.end(), d), pool_.end()); }

    void protocol_tick(std::int64_t pt, bool, Rng&, const WantsHome& wants_home) override {
        // Front sweeps first so followers find their next column free.
        std::stable_sort(sweeps_.begin(), sweeps_.end(), [](const auto& a, const auto& b) {
            const int ca = a->on_grid() ? a->column() : -1;
            const int cb = b->on_grid() ? b->column() : -1;
            return ca > cb;
        });
        for (auto it = sweeps_.begin(); it != sweeps_.end();) {
            auto& sw = **it;
            if (!sw.on_grid()) {
                const auto& roster = sw.roster();
                if (std::any_of(roster.begin(), roster.end(), wants_home)) {
                    pool_.insert(pool_.end(), roster.begin(), roster.end());
                    it = sweeps_.erase(it);
                    continue;
                }
            }
            sw.step(ledger_, pt);
            ++it;
        }
        while (true) {
            std::vector<DroneId> roster;
            for (const auto d : pool_) {
                if (static_cast<int>(roster.size()) == grid_.n) break;
                if (!wants_home(d)) roster.push_back(d);
            }
            if (roster.empty()) break;
            bool room = true;
            for (int r = 0; r < static_cast<int>(roster.size()); ++r) {
                room = room && usable(ledger_, Cell::of(ZoneId{r, 0, layer_}));
            }
            if (!room) break;
            auto sw = std::make_unique<ParallelSweep>(roster, layer_, grid_, rotation_);
            if (!sw->step(ledger_, pt)) break;
            for (const auto d : roster) pool_.erase(std::find(pool_.begin(), pool_.end(), d));
            sweeps_.push_back(std::move(sw));
        }
    }

private:
    std::int64_t rotation_;
    std::vector<DroneId> pool_;
    std::vector<std::unique_ptr<ParallelSweep>> sweeps_;
};

// Zigzag: a convoy follows the diagonal route and re-enters after the last zone.
class Convoy final : public Station {
public:
    Convoy(TransferCoordinator& coord, const GridSpec& g, int layer) : Station(coord, g, layer) {}

    bool accepting() const override { return true; }
    Position dispatch(DroneId, const std::vector<ZoneId>&) override { return depot(); }
    bool admit(DroneId d) override {
        queue_.push_back(d);
        return true;
    }
    bool can_leave(DroneId) const override { return true; }
    void leave(DroneId d) override {
        if (ledger_.cell_of(d)) ledger_.remove(d);
        queue_.erase(std::remove(queue_.begin(), queue_.end(), d), queue_.end());
    }

    void protocol_tick(std::int64_t, bool, Rng&, const WantsHome&) override {
        std::vector<std::pair<std::int64_t, DroneId>> on_grid;
        for (const auto& [d, c] : ledger_.snapshot()) {
            if (c.kind == Cell::Kind::Zone && c.zone.layer == layer_ && !in_queue(d)) {
                on_grid.emplace_back(zone_ordinal(c.zone, grid_), d);
            }
        }
        std::sort(on_grid.rbegin(), on_grid.rend());
        for (const auto& [ord, d] : on_grid) {
            const ZoneId here = ledger_.cell_of(d)->zone;
            const auto hop = zigzag_route(here, grid_);
            if (hop.exits) {
                ledger_.remove(d);
                queue_.push_back(d);
            } else if (usable(ledger_, Cell::of(hop.next))) {
                ledger_.remove(d);
                ledger_.place(d, Cell::of(hop.next));
            }
        }
        const auto [r, c] = cell_at_zone_value(0, grid_.n);
        const Cell entry = Cell::of(ZoneId{r, c, layer_});
        if (!queue_.empty() && usable(ledger_, entry)) {
            ledger_.place(queue_.front(), entry);
            queue_.erase(queue_.begin());
        }
    }

private:
    bool in_queue(DroneId d) const { return std::find(queue_.begin(), queue_.end(), d) != queue_.end(); }

    std::vector<DroneId> queue_;
};

// ---------------------------------------------------------------------------
// Run loop

enum class Phase { Depot, Outbound, OnStation, Inbound };
enum class DepotStage { Ready, Refill, Rest, Recharge };

struct Unit {
    Drone d;
    int level = 0;
    Phase phase = Phase::Depot;
    DepotStage stage = DepotStage::Ready;
    std::int64_t stage_until = 0;
    std::int64_t sanitize_until = -1;
    ScanClock clock;
    bool leaving = false;
    bool recalled = false;
    bool in_band = false;
    DroneState logged = DroneState::Idle;
};

Payload zone_fields(const ZoneId& z) {
    return {{"row", std::to_string(z.row)}, {"col", std::to_string(z.col)}, {"layer", std::to_string(z.layer)}};
}

Payload with(Payload p, std::initializer_list<std::pair<std::string, std::string>> extra) {
    p.insert(p.end(), extra.begin(), extra.end());
    return p;
}

std::string describe_cell(const std::optional<Cell>& c) { return c ? describe(*c) : std::string("-"); }

struct WindowAcc {
    int in_use_min = 0;
    int in_use_max = 0;
    double in_use_sum = 0.0;
    std::int64_t ticks = 0;
    double tp_sum = 0.0;
    std::int64_t tp_n = 0;
    double sig_sum = 0.0;
    std::int64_t sig_n = 0;
    PedFlowCounters ped;
};

class Engine {
public:
    explicit Engine(const Scenario& s)
        : s_(s),
          g_(s.grid),
          rng_(s.seed),
          r_persons_(rng_.substream("persons")),
          r_ped_(rng_.substream("ped_flow")),
          r_link_(rng_.substream("link")),
          r_swap_(rng_.substream("swaps")),
          r_fleet_(rng_.substream("fleet")),
          coord_(s.grid, TransferConfig{s.strategy.timeout_ticks}) {
        for (const auto& lv : operation_levels(s)) {
            op_layers_.insert(lv.layer);
            switch (lv.strategy) {
                case Strategy::Parallel:
                    stations_.push_back(std::make_unique<Sweeper>(coord_, g_, lv.layer, s.strategy.rotation_interval));
                    break;
                case Strategy::Zigzag:
                    stations_.push_back(std::make_unique<Convoy>(coord_, g_, lv.layer));
                    break;
                default:
                    stations_.push_back(std::make_unique<ZoneKeeper>(coord_, g_, lv.layer, lv.strategy));
                    break;
            }
        }
        // A protocol step never asks for more than a diagonal zone hop.
        period_ = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(g_.tau * std::sqrt(2.0) /
                                                                                 s.fleet.speed_mps)));
        for (int i = 0; i < s.drones; ++i) {
            Unit u;
            u.d.id = i;
            u.d.speed = s.fleet.speed_mps;
            u.level = i % static_cast<int>(stations_.size());
            u.d.position = stations_[static_cast<std::size_t>(u.level)]->depot();
            replenish(u.d, s.fleet);
            u.clock.interval = s.ops.scan_interval_s;
            units_.push_back(u);
        }
        init_persons();
        if (s.ped.enabled) ped_spec_ = effective_ped_spec(s);
        const std::int64_t windows = (s.duration + s.metrics_window_s - 1) / s.metrics_window_s;
        acc_.assign(static_cast<std::size_t>(windows), WindowAcc{});
    }

    RunResult run() {
        RunResult out;
        out.scenario_hash = scenario_hash(s_);
        out.seed = s_.seed;
        log_.append(0, EntityKind::System, 0, "start",
                    {{"scenario", s_.name}, {"hash", out.scenario_hash}, {"seed", std::to_string(s_.seed)}});
        for (std::int64_t t = 0; t < s_.duration; ++t) tick(t);
        log_.append(s_.duration, EntityKind::System, 0, "stop", {{"ticks", std::to_string(s_.duration)}});
        finish(out);
        return out;
    }

private:
    Station& station(const Unit& u) { return *stations_[static_cast<std::size_t>(u.level)]; }

    void init_persons() {
        const double ext = g_.extent();
        for (int i = 0; i < s_.persons.hotspots; ++i) {
            hotspots_.push_back({r_persons_.uniform(0.0, ext), r_persons_.uniform(0.0, ext)});
        }
        for (int i = 0; i < s_.persons.count; ++i) {
            Person p;
            p.id = i;
            p.x = r_persons_.uniform(0.0, ext);
            p.y = r_persons_.uniform(0.0, ext);
            const bool febrile = r_persons_.bernoulli(s_.persons.fever_fraction);
            p.temperature = febrile ? 37.2 : r_persons_.uniform(36.3, 37.1);
            febrile_.push_back(febrile);
            persons_.push_back(p);
        }
    }

    void move_persons(std::int64_t t) {
        if (persons_.empty()) return;
        const double ext = g_.extent();
        const double step = s_.persons.step_m;
        auto reflect = [ext](double v) {
            if (v < 0.0) v = -v;
            if (v >= ext) v = 2.0 * ext - v - 1e-9;
            return std::clamp(v, 0.0, std::nextafter(ext, 0.0));
        };
        for (std::size_t i = 0; i < persons_.size(); ++i) {
            auto& p = persons_[i];
            double angle = r_persons_.uniform(0.0, 2.0 * M_PI);
            if (!hotspots_.empty() && r_persons_.bernoulli(s_.persons.hotspot_pull)) {
                const auto near = std::min_element(hotspots_.begin(), hotspots_.end(), [&](const auto& a, const auto& b) {
                    return std::hypot(a.first - p.x, a.second - p.y) < std::hypot(b.first - p.x, b.second - p.y);
                });
                angle = std::atan2(near->second - p.y, near->first - p.x);
            }
            p.x = reflect(p.x + step * std::cos(angle));
            p.y = reflect(p.y + step * std::sin(angle));
            if (febrile_[i]) p.temperature = std::min(40.5, p.temperature + s_.persons.fever_rise_per_min / 60.0);
        }
        if (t % s_.persons.sample_interval_s == 0) {
            const int layer = stations_.front()->layer();
            for (const auto& p : persons_) {
                const ZoneId z = zone_of_position(Position{p.x, p.y, layer}, g_);
                presence_.push_back({t, z});
                log_.append(t, EntityKind::Person, p.id, "presence", zone_fields(z));
            }
        }
    }

    std::vector<ZoneId> priority(std::int64_t t) const {
        const int layer = stations_.front()->layer();
        const std::int64_t span = s_.ops.sanitize_interval_s;
        const auto dm = density_map(presence_, Window{std::max<std::int64_t>(0, t - span), t + 1}, g_, layer);
        return sanitization_priority(dm);
    }

    int in_use() const {
        return static_cast<int>(std::count_if(units_.begin(), units_.end(), [](const Unit& u) { return is_in_use(u.d.state); }));
    }

    // Full rounds run every control interval; in between, only top up the
    // fleet towards target_in_use.
    void control_room(std::int64_t t, bool full) {
        if (units_.empty()) return;
        if (!full && (s_.mission.target_in_use < 0 || in_use() >= s_.mission.target_in_use)) return;
        std::vector<UtilizationReading> readings;
        for (const auto& u : units_) {
            const bool ready = u.phase == Phase::Depot && u.stage == DepotStage::Ready;
            const bool working = full && u.phase == Phase::OnStation && !u.leaving;
            if (ready || working) {
                readings.push_back({u.d.id, measure_utilization(u.d, static_cast<double>(s_.metrics_window_s))});
            }
        }
        if (readings.empty()) return;
        const auto report =
            control_room_notification(readings, s_.mission.utilization_lower, s_.mission.utilization_upper, {});
        std::vector<std::pair<double, DroneId>> starts;
        for (std::size_t i = 0; i < report.directives.size(); ++i) {
            const auto [id, dir] = report.directives[i];
            Unit& u = units_[static_cast<std::size_t>(id)];
            if (dir == Directive::Recall && u.phase == Phase::OnStation) {
                u.leaving = true;
                u.recalled = true;
                log_.append(t, EntityKind::Drone, id, "directive", {{"directive", "Recall"}});
            } else if (dir == Directive::StartOps && u.phase == Phase::Depot) {
                starts.emplace_back(readings[i].utilization, id);
            }
        }
        std::sort(starts.begin(), starts.end());
        int busy = in_use();
        std::vector<ZoneId> prio;
        if (!starts.empty() && !persons_.empty()) prio = priority(t);
        for (const auto& [util, id] : starts) {
            if (s_.mission.target_in_use >= 0 && busy >= s_.mission.target_in_use) break;
            Unit& u = units_[static_cast<std::size_t>(id)];
            Station& st = station(u);
            if (!st.accepting()) continue;
            u.d.waypoint = st.dispatch(id, prio);
            if (t == 0 && s_.mission.warm_start) {
                u.d.battery = r_fleet_.uniform(s_.fleet.battery_floor + s_.mission.return_margin + 0.1, 1.0);
                u.d.flight_budget = u.d.battery * s_.fleet.scan_flight_time_s;
            }
            u.d.state = DroneState::Transferring;
            u.phase = Phase::Outbound;
            ++busy;
            log_.append(t, EntityKind::Drone, id, "directive", {{"directive", "StartOps"}});
        }
    }

    void protocol(std::int64_t t) {
        const std::int64_t pt = t / period_;
        const bool swap_due = s_.strategy.swap_interval_s > 0 && t - last_swap_ >= s_.strategy.swap_interval_s;
        if (swap_due) last_swap_ = t;
        const WantsHome wants_home = [this](DroneId d) {
            const Unit& u = units_[static_cast<std::size_t>(d)];
            return u.leaving || u.d.state == DroneState::Refilling;
        };
        coord_.tick(pt);
        for (auto& st : stations_) st->protocol_tick(pt, swap_due, r_swap_, wants_home);
        for (const auto& [id, sess] : coord_.sessions()) {
            if (!sess.live() && sess.finished_at >= 0 && !reported_.count(id)) {
                reported_.insert(id);
                const bool done = sess.request.status == RequestStatus::Done;
                done ? ++transfers_done_ : ++transfers_aborted_;
                Payload p{{"request", std::to_string(id)},
                          {"status", std::string(to_string(sess.request.status))},
                          {"strategy", std::string(to_string(sess.request.strategy))}};
                if (!sess.abort_reason.empty()) p.emplace_back("reason", sess.abort_reason);
                log_.append(t, EntityKind::Drone, sess.request.requester, "transfer", std::move(p));
            }
        }
        if (pt % 64 == 0) coord_.prune(pt - 64);
        moved_.clear();
        for (const auto& tr : coord_.ledger().drain_journal()) {
            moved_.insert(tr.drone);
            log_.append(t, EntityKind::Drone, tr.drone, "ledger",
                        {{"from", describe_cell(tr.from)}, {"to", describe_cell(tr.to)},
                         {"request", std::to_string(tr.request)}});
            if (tr.to && tr.to->kind == Cell::Kind::Zone && op_layers_.count(tr.to->zone.layer)) {
                log_.append(t, EntityKind::Zone, zone_ordinal(tr.to->zone, g_), "visit",
                            with(zone_fields(tr.to->zone), {{"drone", std::to_string(tr.drone)}}));
            }
        }
        ++ledger_checks_;
        if (!coord_.ledger().check_invariants()) ++ledger_violations_;
    }

    void sanitize_round(std::int64_t t) {
        if (persons_.empty() || s_.ops.sanitize_top_zones == 0) return;
        const auto prio = priority(t);
        int left = s_.ops.sanitize_top_zones;
        for (const auto& z : prio) {
            if (left == 0) break;
            for (auto& u : units_) {
                if (u.phase != Phase::OnStation || u.leaving || u.d.state != DroneState::Scanning) continue;
                const auto c = coord_.ledger().cell_of(u.d.id);
                if (!c || c->kind != Cell::Kind::Zone || c->zone.row != z.row || c->zone.col != z.col) continue;
                if (u.d.tank < s_.mission.tank_reserve_l) continue;
                u.sanitize_until = t + s_.ops.sanitize_duration_s;
                log_.append(t, EntityKind::Zone, zone_ordinal(c->zone, g_), "sanitize",
                            with(zone_fields(c->zone), {{"drone", std::to_string(u.d.id)}, {"reason", "density"}}));
                --left;
                break;
            }
        }
    }

    void scan(std::int64_t t, Unit& u, const ZoneId& zone) {
        if (!in_bounds(u.d.position, g_) || zone_of_position(u.d.position, g_) != zone) return;
        if (u.clock.tick < t) u.clock.tick = t;
        if (u.clock.tick > t) return;
        const auto res = scan_cycle(zone, u.d, persons_, g_, u.clock, s_.ops.scan);
        const std::int64_t zid = zone_ordinal(zone, g_);
        for (const auto& o : res.observations) {
            log_.append(t, EntityKind::Person, o.person, "observe",
                        with(zone_fields(zone), {{"drone", std::to_string(u.d.id)},
                                                 {"temperature", fmt_double(o.temperature)}}));
        }
        for (const auto& a : res.actions) {
            const std::string who = std::to_string(a.person);
            switch (a.kind) {
                case ActionKind::FeverAlarm:
                    log_.append(t, EntityKind::Zone, zid, "fever_alarm", with(zone_fields(zone), {{"person", who}}));
                    break;
                case ActionKind::Medicate:
                    log_.append(t, EntityKind::Zone, zid, "medicate", with(zone_fields(zone), {{"person", who}}));
                    break;
                case ActionKind::Sanitize:
                    if (u.sanitize_until <= t && u.d.tank >= s_.mission.tank_reserve_l) {
                        u.sanitize_until = t + s_.ops.sanitize_duration_s;
                        log_.append(t, EntityKind::Zone, zid, "sanitize",
                                    with(zone_fields(zone), {{"drone", std::to_string(u.d.id)}, {"reason", "fever"}}));
                    }
                    break;
            }
        }
    }

    bool arrived(const Drone& d) const {
        return d.waypoint && d.position.x == d.waypoint->x && d.position.y == d.waypoint->y &&
               d.position.layer == d.waypoint->layer;
    }

    void update_unit(std::int64_t t, Unit& u) {
        Station& st = station(u);
        auto& d = u.d;
        switch (u.phase) {
            case Phase::Depot:
                if (u.stage != DepotStage::Ready && t >= u.stage_until) {
                    if (u.stage == DepotStage::Refill && u.recalled) {
                        u.stage = DepotStage::Rest;
                        u.stage_until = t + s_.mission.recall_rest_s;
                        d.state = DroneState::Recalled;
                    } else if (u.stage == DepotStage::Refill || u.stage == DepotStage::Rest) {
                        u.recalled = false;
                        u.stage = DepotStage::Recharge;
                        u.stage_until = t + static_cast<std::int64_t>(std::llround(s_.fleet.recharge_time_s));
                        d.state = DroneState::Idle;
                    } else {
                        replenish(d, s_.fleet);
                        u.stage = DepotStage::Ready;
                    }
                }
                break;
            case Phase::Outbound:
                if (arrived(d) && st.admit(d.id)) {
                    u.phase = Phase::OnStation;
                    u.clock.tick = t;
                }
                break;
            case Phase::Inbound:
                if (arrived(d)) {
                    u.phase = Phase::Depot;
                    u.stage = DepotStage::Refill;
                    u.stage_until = t + static_cast<std::int64_t>(std::llround(s_.fleet.refill_time_s));
                    d.state = DroneState::Refilling;
                    d.waypoint.reset();
                }
                break;
            case Phase::OnStation:
                break;
        }
        if (u.phase == Phase::OnStation) {
            if (d.battery <= s_.fleet.battery_floor + s_.mission.return_margin) u.leaving = true;
            if (u.leaving || d.state == DroneState::Refilling) {
                if (st.can_leave(d.id)) {
                    st.leave(d.id);
                    u.phase = Phase::Inbound;
                    u.leaving = false;
                    u.sanitize_until = -1;
                    u.in_band = false;
                    d.state = DroneState::Refilling;
                    d.waypoint = st.depot();
                } else {
                    d.waypoint = st.target(d.id);
                }
            } else {
                const auto cell = coord_.ledger().cell_of(d.id);
                const Position target = st.target(d.id);
                if (coord_.is_busy(d.id)) {
                    const bool parked = cell && cell->kind == Cell::Kind::Lane && !moved_.count(d.id) &&
                                        d.position.x == target.x && d.position.y == target.y;
                    d.state = parked ? DroneState::WaitingInTransferArea : DroneState::Transferring;
                } else if (cell && cell->kind == Cell::Kind::Zone) {
                    d.state = u.sanitize_until > t ? DroneState::Sanitizing : DroneState::Scanning;
                } else {
                    d.state = DroneState::Transferring;
                }
                d.waypoint = target;
                if (d.state == DroneState::Scanning) scan(t, u, cell->zone);
            }
        }

        FleetDefaults fd = s_.fleet;
        fd.depot = st.depot();
        d = advance_drone(d, 1.0, fd);

        if (d.state != u.logged) {
            log_.append(t, EntityKind::Drone, d.id, "state", {{"state", std::string(to_string(d.state))}});
            if (!is_in_use(u.logged) && is_in_use(d.state)) ++dispatches_;
            u.logged = d.state;
        }
        const auto cell = coord_.ledger().cell_of(d.id);
        const bool band = u.phase == Phase::OnStation && cell && in_bounds(d.position, g_) &&
                          in_collision_band(d.position, g_);
        if (band && !u.in_band) {
            std::string notified;
            for (const auto n : band_signal(d, g_, coord_.ledger())) {
                notified += (notified.empty() ? "" : "|") + std::to_string(n);
            }
            log_.append(t, EntityKind::Drone, d.id, "band_signal", {{"notified", notified}});
        }
        u.in_band = band;
    }

    void link(std::int64_t t, WindowAcc& acc) {
        if (!s_.link.enabled || t % s_.link.interval_s != 0) return;
        const auto& l = s_.link;
        int active = 0;
        for (const auto& u : units_) active += is_active(u.d.state) ? 1 : 0;
        for (const auto& u : units_) {
            if (u.phase != Phase::OnStation || !is_active(u.d.state) || !in_bounds(u.d.position, g_)) continue;
            const ZoneId z = zone_of_position(u.d.position, g_);
            const double dist = std::hypot(u.d.position.x, u.d.position.y);
            const double phy = l.peak_mbps * 1e6 * std::exp(-dist / l.decay_m) / (1.0 + active / l.contention_drones);
            const double offered = std::floor(phy * l.transmission_time_s / (kPacketBytes * 8.0));
            LinkSample ls;
            ls.packets_success = std::floor(offered * r_link_.uniform(l.success_min, l.success_max));
            ls.ber = r_link_.uniform(0.0, l.ber_max);
            ls.transmission_time = l.transmission_time_s;
            const double bps = throughput(ls);
            const double sig = sample_signal_time(l.signal, r_link_);
            log_.append(t, EntityKind::Drone, u.d.id, "link",
                        with(zone_fields(z), {{"bps", fmt_double(bps)},
                                              {"packets", fmt_double(ls.packets_success)},
                                              {"ber", fmt_double(ls.ber)}}));
            log_.append(t, EntityKind::Drone, u.d.id, "signal", with(zone_fields(z), {{"seconds", fmt_double(sig)}}));
            acc.tp_sum += bps;
            ++acc.tp_n;
            acc.sig_sum += sig;
            ++acc.sig_n;
        }
    }

    void tick(std::int64_t t) {
        WindowAcc& acc = acc_[static_cast<std::size_t>(t / s_.metrics_window_s)];
        if (s_.ped.enabled) {
            ped_.tick = t;
            ped_flow_step(ped_spec_, ped_, r_ped_, &log_);
            const auto& c = ped_.counters;
            if (c.arrivals != ped_.in_system() + c.sunk) ped_conserved_ = false;
        }
        move_persons(t);
        control_room(t, t % s_.mission.control_interval_s == 0);
        if (t % period_ == 0) protocol(t);
        if (t > 0 && t % s_.ops.sanitize_interval_s == 0) sanitize_round(t);
        for (auto& u : units_) update_unit(t, u);
        link(t, acc);

        const int busy = in_use();
        if (acc.ticks == 0) {
            acc.in_use_min = acc.in_use_max = busy;
        } else {
            acc.in_use_min = std::min(acc.in_use_min, busy);
            acc.in_use_max = std::max(acc.in_use_max, busy);
        }
        acc.in_use_sum += busy;
        ++acc.ticks;
        acc.ped = ped_.counters;
        if (t >= 1) {
            in_use_min_ = seen_ ? std::min(in_use_min_, busy) : busy;
            in_use_max_ = seen_ ? std::max(in_use_max_, busy) : busy;
            in_use_sum_ += busy;
            seen_ = true;
        }
        if ((t + 1) % s_.metrics_window_s == 0) {
            for (auto& u : units_) reset_utilization_window(u.d);
        }
    }

    void finish(RunResult& out) {
        const int layer = stations_.front()->layer();
        const auto changes = state_changes(log_);
        out.utilization = utilization_series(changes, s_.metrics_window_s, s_.duration, std::max(1, s_.drones));
        out.density = density_map(presence_, Window{0, s_.duration + 1}, g_, layer);

        auto& sum = out.summary;
        double tp = 0.0, sig = 0.0;
        for (std::size_t i = 0; i < acc_.size(); ++i) {
            const auto& a = acc_[i];
            WindowMetrics w;
            w.start = static_cast<std::int64_t>(i) * s_.metrics_window_s;
            w.end = std::min(s_.duration, w.start + s_.metrics_window_s);
            w.in_use_min = a.in_use_min;
            w.in_use_max = a.in_use_max;
            w.in_use_mean = a.ticks ? a.in_use_sum / static_cast<double>(a.ticks) : 0.0;
            if (i < out.utilization.size()) {
                w.utilization_mean = out.utilization[i].mean_utilization;
                w.utilization_max = out.utilization[i].max_utilization;
                w.cumulative_dispatches = out.utilization[i].cumulative_dispatches;
                sum.utilization_max = std::max(sum.utilization_max, w.utilization_max);
            }
            w.throughput_mean_bps = a.tp_n ? a.tp_sum / static_cast<double>(a.tp_n) : 0.0;
            w.signal_mean_s = a.sig_n ? a.sig_sum / static_cast<double>(a.sig_n) : 0.0;
            w.persons_checked = a.ped.checked;
            w.persons_served = a.ped.served;
            out.windows.push_back(w);
            tp += a.tp_sum;
            sig += a.sig_sum;
            sum.throughput_samples += a.tp_n;
            sum.signal_samples += a.sig_n;
        }
        sum.throughput_mean_bps = sum.throughput_samples ? tp / static_cast<double>(sum.throughput_samples) : 0.0;
        sum.signal_mean_s = sum.signal_samples ? sig / static_cast<double>(sum.signal_samples) : 0.0;
        sum.in_use_min = in_use_min_;
        sum.in_use_max = in_use_max_;
        sum.in_use_mean = s_.duration > 1 ? in_use_sum_ / static_cast<double>(s_.duration - 1) : 0.0;
        sum.dispatches = dispatches_;
        sum.transfers_done = transfers_done_;
        sum.transfers_aborted = transfers_aborted_;
        sum.ledger_checks = ledger_checks_;
        sum.ledger_violations = ledger_violations_;
        sum.ped = ped_.counters;
        sum.ped_conserved = ped_conserved_;
        sum.violations_detected = ped_.counters.requeued;

        zone_stats(out);
        out.log = std::move(log_);
    }

    void zone_stats(RunResult& out) const {
        std::vector<OpsRecord> records;
        auto zone_of = [](const SimEvent& e) {
            return ZoneId{std::stoi(std::string(e.field("row"))), std::stoi(std::string(e.field("col"))),
                          std::stoi(std::string(e.field("layer")))};
        };
        for (const auto& e : log_.events()) {
            OpsKind kind;
            double value = 0.0;
            if (e.kind == "observe") {
                kind = OpsKind::Scan;
            } else if (e.kind == "fever_alarm") {
                kind = OpsKind::FeverAlarm;
            } else if (e.kind == "sanitize") {
                kind = OpsKind::Sanitize;
            } else if (e.kind == "medicate") {
                kind = OpsKind::Medicate;
            } else if (e.kind == "visit") {
                kind = OpsKind::Visit;
            } else if (e.kind == "signal") {
                kind = OpsKind::SignalTime;
                value = std::stod(std::string(e.field("seconds")));
            } else if (e.kind == "link") {
                kind = OpsKind::Throughput;
                value = std::stod(std::string(e.field("bps")));
            } else {
                continue;
            }
            records.push_back({e.tick, zone_of(e), kind, value});
        }
        for (std::int64_t start = 0; start < s_.duration; start += s_.metrics_window_s) {
            const Window w{start, std::min(s_.duration, start + s_.metrics_window_s)};
            std::vector<OpsRecord> visits;
            std::map<std::int64_t, std::vector<OpsRecord>> by_zone;
            for (const auto& r : records) {
                if (!w.contains(r.tick)) continue;
                if (r.kind == OpsKind::Visit) {
                    visits.push_back(r);
                } else {
                    by_zone[zone_ordinal(r.zone, g_)].push_back(r);
                }
            }
            std::map<int, std::vector<ZoneStats>> nets;
            for (const auto& st : stations_) {
                for (int i = 0; i < g_.n * g_.n; ++i) {
                    const auto [row, col] = cell_at_zone_value(i, g_.n);
                    const ZoneId z{row, col, st->layer()};
                    auto recs = visits;
                    if (auto it = by_zone.find(zone_ordinal(z, g_)); it != by_zone.end()) {
                        recs.insert(recs.end(), it->second.begin(), it->second.end());
                    }
                    const int net = i % s_.ops.networks;
                    auto zs = compute_zone_stats(z, net, w, recs, g_);
                    nets[net].push_back(zs);
                    out.zone_stats.push_back(std::move(zs));
                }
            }
            for (const auto& [net, list] : nets) out.networks.push_back(edge_aggregate(list));
        }
    }

    const Scenario& s_;
    GridSpec g_;
    Rng rng_;
    Rng r_persons_;
    Rng r_ped_;
    Rng r_link_;
    Rng r_swap_;
    Rng r_fleet_;
    TransferCoordinator coord_;
    std::vector<std::unique_ptr<Station>> stations_;
    std::set<int> op_layers_;
    std::vector<Unit> units_;
    std::vector<Person> persons_;
    std::vector<bool> febrile_;
    std::vector<std::pair<double, double>> hotspots_;
    std::vector<PresenceSample> presence_;
    PedFlowSpec ped_spec_;
    PedFlowState ped_;
    bool ped_conserved_ = true;
    EventLog log_;
    std::vector<WindowAcc> acc_;
    std::int64_t period_ = 1;
    std::int64_t last_swap_ = 0;
    std::set<int> reported_;
    std::set<DroneId> moved_;
    std::int64_t transfers_done_ = 0;
    std::int64_t transfers_aborted_ = 0;
    std::int64_t ledger_checks_ = 0;
    std::int64_t ledger_violations_ = 0;
    std::int64_t dispatches_ = 0;
    int in_use_min_ = 0;
    int in_use_max_ = 0;
    double in_use_sum_ = 0.0;
    bool seen_ = false;
};

}  // namespace

RunResult run(const Scenario& s) {
    const auto errs = validate(s);
    if (!errs.empty()) {
        std::string msg;
        for (const auto& e : errs) msg += "\n  " + e.path + ": " + e.message;
        throw Error(ErrorCode::ValidationError, "scenario has " + std::to_string(errs.size()) + " problem(s):" + msg);
    }
    Engine engine(s);
    return engine.run();
}

std::vector<StateChange> state_changes(const EventLog& log) {
    std::vector<StateChange> out;
    for (const auto& e : log.events()) {
        if (e.kind != "state" || e.entity_kind != EntityKind::Drone) continue;
        if (auto st = drone_state_from_string(e.field("state"))) {
            out.push_back({e.tick, static_cast<DroneId>(e.entity), *st});
        }
    }
    return out;
}

}  // namespace swarmzones
