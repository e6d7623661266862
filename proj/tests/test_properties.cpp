#include "doctest.h"

#include <algorithm>
#include <map>
#include <set>

#include "macsim/engine.hpp"
#include "macsim/metrics.hpp"
#include "macsim/rng.hpp"
#include "macsim/scenario.hpp"

using namespace macsim;

namespace {

constexpr time_us MS = kUsPerMs;

ScenarioState random_scene(Rng& rng, int n_vehicles) {
    ScenarioState s;
    s.road_length = 2000.0;
    s.lane_width = 3.5;
    s.mmwave_los_range = 80.0;
    s.sub6_range = 300.0;
    std::vector<std::vector<double>> lanes(4);
    for (int i = 0; i < n_vehicles; ++i) {
        VehicleState v;
        v.id = i;
        for (;;) {
            v.lane = static_cast<int>(rng.next_below(4));
            v.longitudinal_pos = 950.0 + rng.next_double() * 100.0;
            bool ok = true;
            for (double other : lanes[v.lane])
                ok = ok && std::abs(v.longitudinal_pos - other) >= 10.0;
            if (ok) break;
        }
        lanes[v.lane].push_back(v.longitudinal_pos);
        v.length = 5.0;
        v.width = 2.0;
        s.vehicles.push_back(v);
    }
    return s;
}

}  // namespace

TEST_CASE("property: LOS symmetry on 1000 random scenes") {
    Rng rng(2024);
    for (int iter = 0; iter < 1000; ++iter) {
        const auto s = random_scene(rng, 2 + static_cast<int>(rng.next_below(7)));
        for (std::size_t a = 0; a < s.vehicles.size(); ++a)
            for (std::size_t b = a + 1; b < s.vehicles.size(); ++b)
                REQUIRE(los(s, static_cast<vehicle_id>(a), static_cast<vehicle_id>(b)) ==
                        los(s, static_cast<vehicle_id>(b), static_cast<vehicle_id>(a)));
    }
}

TEST_CASE("property: adding a blocker never turns LOS false->true") {
    Rng rng(77);
    for (int iter = 0; iter < 1000; ++iter) {
        auto s = random_scene(rng, 2 + static_cast<int>(rng.next_below(6)));
        const bool before = los(s, 0, 1);
        VehicleState w;
        w.id = static_cast<vehicle_id>(s.vehicles.size());
        for (;;) {
            w.lane = static_cast<int>(rng.next_below(4));
            w.longitudinal_pos = 940.0 + rng.next_double() * 120.0;
            bool ok = true;
            for (const auto& v : s.vehicles)
                ok = ok && !(v.lane == w.lane && std::abs(v.longitudinal_pos - w.longitudinal_pos) < 10.0);
            if (ok) break;
        }
        w.length = 5.0;
        w.width = 2.0;
        s.vehicles.push_back(w);
        const bool after = los(s, 0, 1);
        if (!before) REQUIRE_FALSE(after);
    }
}

TEST_CASE("property: earliest_start matches a brute-force scan, 1000 cases") {
    Rng rng(4242);
    for (int iter = 0; iter < 1000; ++iter) {
        const int n_vehicles = 3 + static_cast<int>(rng.next_below(4));
        ReservationBook book(0);
        const int attempts = 2 + static_cast<int>(rng.next_below(10));
        for (int i = 0; i < attempts; ++i) {
            Reservation r;
            r.tx = static_cast<vehicle_id>(rng.next_below(n_vehicles));
            do {
                r.rx = static_cast<vehicle_id>(rng.next_below(n_vehicles));
            } while (r.rx == r.tx);
            r.start = static_cast<time_us>(rng.next_below(400));
            r.end = r.start + 1 + static_cast<time_us>(rng.next_below(60));
            book.insert(r);  // conflicting draws are simply skipped
        }
        const auto tx = static_cast<vehicle_id>(rng.next_below(n_vehicles));
        vehicle_id rx;
        do {
            rx = static_cast<vehicle_id>(rng.next_below(n_vehicles));
        } while (rx == tx);
        const time_us ref = static_cast<time_us>(rng.next_below(300));
        const time_us dur = 1 + static_cast<time_us>(rng.next_below(60));

        const time_us got = earliest_start(tx, rx, ref, dur, book);

        // Brute force: scan every unit instant from ref upward.
        const auto feasible = [&](time_us s) {
            for (const auto& r : book.known()) {
                if (!(r.involves(tx) || r.involves(rx))) continue;
                if (s < r.end && r.start < s + dur) return false;
            }
            return true;
        };
        time_us expected = ref;
        while (!feasible(expected)) ++expected;
        REQUIRE(got == expected);
        REQUIRE(feasible(got));
    }
}

namespace {

/// Independent replay oracle for the assisted scheduler on tiny static
/// scenes: processes beacon instants chronologically and recomputes each
/// grant with an exhaustive millisecond scan.
struct OracleResult {
    std::vector<Reservation> committed;
};

OracleResult replay_oracle(const ScenarioState& scene,
                           const std::vector<PinnedActivation>& activations, time_us horizon,
                           time_us dur) {
    struct Pending {
        vehicle_id tx;
        time_us dur;
        time_us received_at;
    };
    const int n = static_cast<int>(scene.vehicles.size());
    std::vector<std::vector<Reservation>> books(n);
    std::vector<std::vector<Pending>> pending(n);
    std::vector<std::map<vehicle_id, std::map<vehicle_id, time_us>>> caches(n);
    std::map<vehicle_id, std::pair<time_us, std::vector<vehicle_id>>> intents;  // v -> (act, targets)
    std::set<vehicle_id> announced;
    OracleResult out;

    const auto in_range = [&](vehicle_id a, vehicle_id b) {
        return in_sub6_range(scene, a, b, 0);
    };
    const auto conflicts = [&](const std::vector<Reservation>& book, vehicle_id tx, vehicle_id rx,
                               time_us s, time_us d) {
        for (const auto& r : book) {
            if (!(r.involves(tx) || r.involves(rx))) continue;
            if (s < r.end && r.start < s + d) return true;
        }
        return false;
    };

    for (time_us t = 0; t < horizon; t += MS) {
        // Activations first at an instant, then beacons (engine rank order).
        for (const auto& pa : activations) {
            if (pa.time != t) continue;
            auto targets = pa.targets ? *pa.targets : los_neighbors(scene, pa.vehicle, t);
            intents[pa.vehicle] = {t, targets};
        }
        for (const auto& v : scene.vehicles) {
            if ((t - v.beacon_phase) % (100 * MS) != 0 || t < v.beacon_phase) continue;
            const vehicle_id b = v.id;
            const bool has_unannounced =
                intents.count(b) > 0 && announced.count(b) == 0 && !intents[b].second.empty();
            if (has_unannounced) {
                // RTS beacon.
                announced.insert(b);
                for (const auto& u : scene.vehicles) {
                    if (u.id == b || !in_range(b, u.id)) continue;
                    for (vehicle_id target : intents[b].second) {
                        caches[u.id][b][target] = dur;
                        if (target == u.id) pending[u.id].push_back({b, dur, t});
                    }
                }
                continue;
            }
            if (pending[b].empty()) continue;
            // CTS beacon: answer all pending, oldest first, ties by id.
            std::sort(pending[b].begin(), pending[b].end(), [](const Pending& x, const Pending& y) {
                if (x.received_at != y.received_at) return x.received_at < y.received_at;
                return x.tx < y.tx;
            });
            std::vector<std::pair<vehicle_id, time_us>> entries;  // (tx, start)
            for (const auto& p : pending[b]) {
                time_us s = t;
                while (conflicts(books[b], p.tx, b, s, p.dur)) s += MS;
                books[b].push_back({p.tx, b, s, s + p.dur});
                entries.emplace_back(p.tx, s);
            }
            pending[b].clear();
            for (const auto& [tx, s] : entries) {
                out.committed.push_back({tx, b, s, s + dur});  // transmitter-side commit
                books[tx].push_back({tx, b, s, s + dur});
                for (const auto& u : scene.vehicles) {  // overhearers
                    if (u.id == b || u.id == tx || !in_range(b, u.id)) continue;
                    books[u.id].push_back({tx, b, s, s + dur});
                }
            }
        }
    }
    return out;
}

}  // namespace

TEST_CASE("property: engine schedule equals the replay oracle on <=6 vehicles") {
    Rng rng(999);
    for (int iter = 0; iter < 120; ++iter) {
        const int n = 3 + static_cast<int>(rng.next_below(4));
        ScenarioState scene = random_scene(rng, n);
        // Distinct whole-millisecond phases.
        std::set<time_us> phases;
        for (auto& v : scene.vehicles) {
            time_us p;
            do {
                p = static_cast<time_us>(rng.next_below(100)) * MS;
            } while (!phases.insert(p).second);
            v.beacon_phase = p;
        }
        const int n_tx = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
        std::vector<PinnedActivation> activations;
        for (int i = 0; i < n_tx; ++i) {
            scene.vehicles[i].is_mmwave_tx = true;
            activations.push_back(
                {static_cast<vehicle_id>(i),
                 static_cast<time_us>(rng.next_below(200)) * MS, std::nullopt});
        }

        RunConfig cfg;
        cfg.mac = MacKind::Assisted;
        cfg.sim_duration = 1500 * MS;
        cfg.replications = 1;
        cfg.min_replications = 1;
        cfg.scenario.mmwave_los_range = scene.mmwave_los_range;
        cfg.scenario.sub6_range = scene.sub6_range;
        cfg.pinned_scenario = scene;
        cfg.pinned_activations = activations;

        Engine engine(cfg);
        const auto artifacts = engine.run_one(1);
        std::vector<Reservation> got;
        for (const auto& lr : artifacts.ledger.reservations()) got.push_back(lr.res);

        auto want = replay_oracle(scene, activations, cfg.sim_duration, cfg.assisted.tx_dur);

        std::sort(got.begin(), got.end());
        std::sort(want.committed.begin(), want.committed.end());
        REQUIRE_MESSAGE(got == want.committed, "iteration " << iter);
    }
}

TEST_CASE("property: half-duplex conflict freedom on random engine runs") {
    for (int iter = 0; iter < 20; ++iter) {
        for (MacKind mac : {MacKind::Assisted, MacKind::RefAd}) {
            RunConfig cfg;
            cfg.scenario.road_length = 800.0;
            cfg.mac = mac;
            cfg.r_tx = 0.3;
            cfg.sim_duration = 3000 * MS;
            cfg.replications = 1;
            cfg.min_replications = 1;
            Engine engine(cfg);
            const auto artifacts = engine.run_one(derive_seed(50, iter));
            std::map<vehicle_id, std::vector<Interval>> per_vehicle;
            for (const auto& lr : artifacts.ledger.reservations()) {
                per_vehicle[lr.res.tx].push_back({lr.res.start, lr.res.end});
                per_vehicle[lr.res.rx].push_back({lr.res.start, lr.res.end});
            }
            for (auto& [v, ivs] : per_vehicle) {
                std::sort(ivs.begin(), ivs.end(),
                          [](const Interval& x, const Interval& y) { return x.start < y.start; });
                for (std::size_t i = 1; i < ivs.size(); ++i)
                    REQUIRE(ivs[i - 1].end <= ivs[i].start);
            }
        }
    }
}

TEST_CASE("property: sharing histogram conserves time exactly") {
    Rng rng(31337);
    for (int iter = 0; iter < 1000; ++iter) {
        std::vector<LedgerReservation> rs;
        const int k = static_cast<int>(rng.next_below(12));
        for (int i = 0; i < k; ++i) {
            LedgerReservation lr;
            lr.res.tx = static_cast<vehicle_id>(2 * i);
            lr.res.rx = static_cast<vehicle_id>(2 * i + 1);
            lr.res.start = static_cast<time_us>(rng.next_below(1000));
            lr.res.end = lr.res.start + 1 + static_cast<time_us>(rng.next_below(300));
            rs.push_back(lr);
        }
        const time_us w0 = static_cast<time_us>(rng.next_below(500));
        const Interval window{w0, w0 + 1 + static_cast<time_us>(rng.next_below(800))};
        const auto times = sharing_times(rs, window);
        time_us total = 0;
        for (time_us x : times) total += x;
        REQUIRE(total == window.length());
    }
}

TEST_CASE("property: seed-repeat ledger equality on random instances") {
    for (int iter = 0; iter < 10; ++iter) {
        RunConfig cfg;
        cfg.scenario.road_length = 800.0;
        cfg.mac = iter % 2 == 0 ? MacKind::Assisted : MacKind::RefAd;
        cfg.r_tx = 0.25;
        cfg.sim_duration = 2000 * MS;
        cfg.replications = 1;
        cfg.min_replications = 1;
        const std::uint64_t seed = derive_seed(7, iter);
        Engine e1(cfg), e2(cfg);
        const auto a = e1.run_one(seed);
        const auto b = e2.run_one(seed);
        REQUIRE(a.ledger.reservations().size() == b.ledger.reservations().size());
        for (std::size_t i = 0; i < a.ledger.reservations().size(); ++i) {
            REQUIRE(a.ledger.reservations()[i].res == b.ledger.reservations()[i].res);
            REQUIRE(a.ledger.reservations()[i].cts_time == b.ledger.reservations()[i].cts_time);
        }
        REQUIRE(a.ledger.beacons().size() == b.ledger.beacons().size());
    }
}
