#include "swarmzones/verify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "swarmzones/error.hpp"
#include "swarmzones/rng.hpp"
#include "swarmzones/transfer.hpp"

namespace swarmzones {

namespace {

GeoPoint random_geo(Rng& rng) {
    GeoPoint p;
    p.lat = rng.uniform(-89.0, 89.0);
    p.lon = 180.0 - rng.uniform(0.0, 360.0);
    if (p.lon <= -180.0) p.lon += 360.0;
    return p;
}

GeoPoint nearby(const GeoPoint& p, Rng& rng, double max_deg) {
    GeoPoint q;
    q.lat = std::clamp(p.lat + rng.uniform(-max_deg, max_deg), -89.9, 89.9);
    q.lon = p.lon + rng.uniform(-max_deg, max_deg);
    if (q.lon > 180.0) q.lon -= 360.0;
    if (q.lon <= -180.0) q.lon += 360.0;
    return q;
}

// Chord from the central angle, computed with the spherical law of cosines
// in its numerically stable atan2 form.
double chord_oracle(const GeoPoint& a, const GeoPoint& b, double radius_km) {
    const double rad = M_PI / 180.0;
    const double p1 = a.lat * rad, p2 = b.lat * rad, dl = (b.lon - a.lon) * rad;
    const double x = std::cos(p2) * std::sin(dl);
    const double y = std::cos(p1) * std::sin(p2) - std::sin(p1) * std::cos(p2) * std::cos(dl);
    const double z = std::sin(p1) * std::sin(p2) + std::cos(p1) * std::cos(p2) * std::cos(dl);
    const double sigma = std::atan2(std::hypot(x, y), z);
    return 2.0 * radius_km * std::sin(sigma / 2.0);
}

std::string geo_text(const GeoPoint& p) {
    std::ostringstream os;
    os.precision(17);
    os << "(" << p.lat << ", " << p.lon << ")";
    return os.str();
}

bool fail(SuiteResult& r, const std::string& what) {
    if (r.passed) r.counterexample = what;
    r.passed = false;
    return false;
}

// Independent recount of the ledger snapshot.
bool recount_safe(const OccupancyLedger& ledger, std::string& why) {
    std::set<DroneId> drones;
    std::set<std::tuple<int, int, int>> zones;
    std::set<int> lanes;
    for (const auto& [d, c] : ledger.snapshot()) {
        if (!drones.insert(d).second) {
            why = "drone " + std::to_string(d) + " in two cells";
            return false;
        }
        const bool fresh = c.kind == Cell::Kind::Zone ? zones.emplace(c.zone.row, c.zone.col, c.zone.layer).second
                                                      : lanes.insert(c.lane).second;
        if (!fresh) {
            why = "two drones in " + describe(c);
            return false;
        }
    }
    return true;
}

}  // namespace

SuiteResult verify_bijection(int max_n, const ZoneValueFn& f) {
    SuiteResult r;
    r.name = "bijection";
    for (int n = 1; n <= max_n && r.passed; ++n) {
        const auto cells = diagonal_enumeration_oracle(n);
        std::vector<int> seen(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), -1);
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const auto [a, b] = cells[i];
            ++r.cases;
            const std::int64_t v = f(a, b, n);
            const std::string cell = "n=" + std::to_string(n) + " cell (" + std::to_string(a) + ", " + std::to_string(b) + ")";
            if (v < 0 || v >= static_cast<std::int64_t>(seen.size())) {
                fail(r, cell + " -> " + std::to_string(v) + " outside [0, n^2)");
                break;
            }
            if (seen[static_cast<std::size_t>(v)] >= 0) {
                const auto [pa, pb] = cells[static_cast<std::size_t>(seen[static_cast<std::size_t>(v)])];
                fail(r, "duplicate ordinal " + std::to_string(v) + ": " + cell + " and (" + std::to_string(pa) + ", " +
                            std::to_string(pb) + ")");
                break;
            }
            seen[static_cast<std::size_t>(v)] = static_cast<int>(i);
            if (v != static_cast<std::int64_t>(i)) {
                fail(r, cell + " -> " + std::to_string(v) + ", enumeration gives " + std::to_string(i));
                break;
            }
        }
    }
    return r;
}

SuiteResult verify_distances(int pairs, std::uint64_t seed, const PixelRatioFn& pixel) {
    SuiteResult r;
    r.name = "distances";
    Rng rng(seed);
    for (int i = 0; i < pairs && r.passed; ++i) {
        const GeoPoint a = random_geo(rng);
        const GeoPoint b = random_geo(rng);
        ++r.cases;
        const double t = tunnel_distance(a, b);
        const double o = chord_oracle(a, b, kEarthRadiusKm);
        if (std::abs(t - o) > 1e-12 * std::max(o, 1e-300) && std::abs(t - o) > 1e-15) {
            fail(r, "chord mismatch for " + geo_text(a) + " " + geo_text(b));
        }
    }
    for (int i = 0; i < pairs && r.passed; ++i) {
        const GeoPoint a = random_geo(rng);
        const GeoPoint b = nearby(a, rng, 4.0);
        const double h = haversine_distance(a, b);
        if (h > 1000.0) continue;
        ++r.cases;
        const double t = tunnel_distance(a, b);
        if (std::abs(h - t) > 1.25 * tunnel_error_bound(t) + 1e-9) {
            fail(r, "haversine gap above bound for " + geo_text(a) + " " + geo_text(b));
        }
    }
    const CameraModel cam;
    for (int i = 0; i < pairs && r.passed; ++i) {
        QueuePerson p, q;
        p.id = 0;
        q.id = 1;
        p.apparent_length = rng.uniform(0.001, 0.2);
        q.apparent_length = rng.uniform(0.001, 0.2);
        ++r.cases;
        const double pq = pixel(p, q, cam);
        const double qp = pixel(q, p, cam);
        if (pq != qp || pq < 0.0) {
            std::ostringstream os;
            os.precision(17);
            os << "pixel ratio asymmetric: d(P,Q)=" << pq << " d(Q,P)=" << qp;
            fail(r, os.str());
        }
    }
    return r;
}

SuiteResult verify_violations(int configs, std::uint64_t seed) {
    SuiteResult r;
    r.name = "violations";
    Rng rng(seed);
    for (int c = 0; c < configs && r.passed; ++c) {
        const int count = static_cast<int>(rng.below(201));
        const double side = rng.uniform(2.0, 40.0);
        const double threshold = rng.uniform(0.3, 2.5);
        std::vector<QueuePerson> people(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) {
            people[static_cast<std::size_t>(i)].id = i;
            people[static_cast<std::size_t>(i)].position = Position{rng.uniform(0.0, side), rng.uniform(0.0, side), 0};
        }
        ++r.cases;
        std::set<std::pair<std::size_t, std::size_t>> brute;
        for (std::size_t i = 0; i < people.size(); ++i) {
            for (std::size_t j = i + 1; j < people.size(); ++j) {
                const double dx = people[i].position->x - people[j].position->x;
                const double dy = people[i].position->y - people[j].position->y;
                if (std::sqrt(dx * dx + dy * dy) < threshold) brute.emplace(i, j);
            }
        }
        std::set<std::pair<std::size_t, std::size_t>> scatter;
        for (const auto& v : detect_violations(people, DistanceMethod::Planar, threshold, CrowdMode::Scatter)) {
            scatter.emplace(v.first, v.second);
        }
        if (scatter != brute) {
            fail(r, "config " + std::to_string(c) + ": scatter found " + std::to_string(scatter.size()) +
                        " pairs, brute force " + std::to_string(brute.size()));
            break;
        }
        for (const auto& v : detect_violations(people, DistanceMethod::Planar, threshold, CrowdMode::Queue)) {
            if (!scatter.count({v.first, v.second})) {
                fail(r, "config " + std::to_string(c) + ": queue pair (" + std::to_string(v.first) + ", " +
                            std::to_string(v.second) + ") not in scatter result");
                break;
            }
        }
    }
    return r;
}

SuiteResult verify_collisions(std::int64_t steps, std::uint64_t seed) {
    SuiteResult r;
    r.name = "collisions";
    Rng rng(seed);
    constexpr int kTimeout = 8;
    while (r.cases < steps && r.passed) {
        const int n = 2 + static_cast<int>(rng.below(9));
        const int layers = 1 + static_cast<int>(rng.below(3));
        const GridSpec g{n, 10.0, layers};
        TransferCoordinator tc(g, TransferConfig{kTimeout});
        auto& ledger = tc.ledger();
        const int op = layers - 1;
        const bool sweep_trial = rng.bernoulli(0.3);

        std::vector<ZoneId> cells;
        for (int row = 0; row < n; ++row) {
            for (int col = 0; col < n; ++col) cells.push_back({row, col, op});
        }
        for (std::size_t i = cells.size(); i > 1; --i) std::swap(cells[i - 1], cells[rng.below(i)]);

        DroneId next = 0;
        std::vector<DroneId> swappers;
        std::vector<DroneId> obstacles;
        std::vector<std::unique_ptr<ParallelSweep>> sweeps;
        int sweep_layer = -1;
        if (sweep_trial) {
            sweep_layer = op;
        } else if (layers == 3) {
            sweep_layer = 0;  // free of the op layer and its transfer layer
        }
        if (!sweep_trial) {
            const int count = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n * n)));
            for (int i = 0; i < count; ++i) {
                ledger.place(next, Cell::of(cells[static_cast<std::size_t>(i)]));
                swappers.push_back(next++);
            }
        } else {
            // Parked obstacles the sweeps must wait for.
            const int parked = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
            for (int i = 0; i < parked; ++i) {
                ledger.place(next, Cell::of(cells[static_cast<std::size_t>(i)]));
                obstacles.push_back(next++);
            }
        }
        if (sweep_layer >= 0) {
            const int rosters = 1 + static_cast<int>(rng.below(3));
            for (int k = 0; k < rosters; ++k) {
                const int size = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
                std::vector<DroneId> roster;
                for (int i = 0; i < size; ++i) roster.push_back(next++);
                sweeps.push_back(std::make_unique<ParallelSweep>(roster, sweep_layer, g,
                                                                 static_cast<std::int64_t>(1 + rng.below(5))));
            }
        }

        for (std::int64_t t = 0; t < 400 && r.cases < steps; ++t) {
            if (!swappers.empty()) {
                const DroneId d = swappers[rng.below(swappers.size())];
                const auto at = ledger.cell_of(d);
                if (at && at->kind == Cell::Kind::Zone && at->zone.layer == op && !tc.is_busy(d)) {
                    const bool multi = layers > 1 && rng.bernoulli(0.5);
                    ZoneId to = at->zone;
                    if (multi) {
                        to = ZoneId{static_cast<int>(rng.below(static_cast<std::uint64_t>(n))),
                                    static_cast<int>(rng.below(static_cast<std::uint64_t>(n))), op};
                    } else {
                        std::vector<ZoneId> nb;
                        for (const auto& z : neighbors_of(at->zone, g)) {
                            if (z.layer == op) nb.push_back(z);
                        }
                        if (!nb.empty()) to = nb[rng.below(nb.size())];
                    }
                    if (to != at->zone) tc.submit(d, at->zone, to, multi ? Strategy::MultiLayer : Strategy::FixedArea, t);
                }
            }
            if (!obstacles.empty() && rng.bernoulli(0.05)) {
                // An obstacle lifts off and lands again on a random free zone.
                const DroneId d = obstacles[rng.below(obstacles.size())];
                const ZoneId z{static_cast<int>(rng.below(static_cast<std::uint64_t>(n))),
                               static_cast<int>(rng.below(static_cast<std::uint64_t>(n))), op};
                if (ledger.cell_of(d)) {
                    ledger.remove(d);
                } else if (ledger.is_free(Cell::of(z)) && !ledger.reserved_by(Cell::of(z))) {
                    ledger.place(d, Cell::of(z));
                }
            }
            tc.tick(t);
            std::stable_sort(sweeps.begin(), sweeps.end(), [](const auto& a, const auto& b) {
                return (a->on_grid() ? a->column() : -1) > (b->on_grid() ? b->column() : -1);
            });
            for (auto& sw : sweeps) sw->step(ledger, t);
            ++r.cases;

            std::string why;
            if (!ledger.check_invariants()) {
                fail(r, "ledger invariant broken at tick " + std::to_string(t) + " on n=" + std::to_string(n));
            } else if (!recount_safe(ledger, why)) {
                fail(r, why + " at tick " + std::to_string(t) + " on n=" + std::to_string(n));
            }
            for (const auto& [id, s] : tc.sessions()) {
                if (s.request.status == RequestStatus::Pending && t - s.request.issued_at >= kTimeout) {
                    fail(r, "request " + std::to_string(id) + " pending past the timeout");
                }
            }
            if (!r.passed) break;
        }
    }
    return r;
}

std::vector<SuiteResult> verify_all() {
    return {verify_bijection(), verify_distances(), verify_violations(), verify_collisions()};
}

}  // namespace swarmzones
