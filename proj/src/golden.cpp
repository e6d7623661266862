#include "macsim/golden.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace macsim {

using namespace golden_ids;

namespace {

const char* letter(vehicle_id v) {
    static const char* names[] = {"A", "B", "D", "E", "F"};
    return (v >= 0 && v < 5) ? names[v] : "?";
}

VehicleState make_vehicle(vehicle_id id, int lane, double pos, time_us phase_ms) {
    VehicleState v;
    v.id = id;
    v.lane = lane;
    v.longitudinal_pos = pos;
    v.speed = 0.0;  // static scene: the replay must be LOS-stable
    v.length = 5.0;
    v.width = 2.0;
    v.beacon_phase = phase_ms * kUsPerMs;
    return v;
}

std::string format_reservation(const Reservation& r) {
    std::ostringstream os;
    os << letter(r.tx) << "->" << letter(r.rx) << " [" << us_to_ms(r.start) << ", "
       << us_to_ms(r.end) << ") ms";
    return os.str();
}

std::string format_set(const std::vector<vehicle_id>& ids) {
    std::ostringstream os;
    os << "{";
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) os << ",";
        os << letter(ids[i]);
    }
    os << "}";
    return os.str();
}

}  // namespace

ScenarioState golden_scenario() {
    ScenarioState s;
    s.road_length = 4000.0;
    s.lane_width = 3.5;
    s.mmwave_los_range = 60.0;
    s.sub6_range = 300.0;
    s.time = 0;
    // Distances give A the discovery order (B,F,E) and D the order (E,F);
    // every pair among {A,B,D,E,F} that the replays rely on is LOS.
    s.vehicles.push_back(make_vehicle(A, 0, 2000.0, 10));
    s.vehicles.push_back(make_vehicle(B, 0, 2010.0, 20));
    s.vehicles.push_back(make_vehicle(D, 3, 2004.0, 50));
    s.vehicles.push_back(make_vehicle(E, 2, 2012.0, 40));
    s.vehicles.push_back(make_vehicle(F, 1, 1989.0, 70));
    s.vehicles[A].is_mmwave_tx = true;
    s.vehicles[D].is_mmwave_tx = true;
    s.check_invariants();
    return s;
}

namespace {

RunConfig golden_base_config() {
    RunConfig cfg;
    cfg.scenario.mmwave_los_range = 60.0;
    cfg.scenario.sub6_range = 300.0;
    cfg.sim_duration = 2000 * kUsPerMs;
    cfg.replications = 1;
    cfg.min_replications = 1;
    cfg.pinned_scenario = golden_scenario();
    return cfg;
}

}  // namespace

RunConfig golden_fig2_config() {
    RunConfig cfg = golden_base_config();
    cfg.mac = MacKind::Assisted;
    cfg.pinned_activations.push_back({A, 0, std::nullopt});
    cfg.pinned_activations.push_back({D, 45 * kUsPerMs, std::vector<vehicle_id>{F}});
    return cfg;
}

RunConfig golden_fig3_config() {
    RunConfig cfg = golden_base_config();
    cfg.mac = MacKind::RefAd;
    cfg.pinned_activations.push_back({A, 0, std::nullopt});
    cfg.pinned_activations.push_back({D, 20 * kUsPerMs, std::nullopt});
    return cfg;
}

std::vector<Reservation> golden_fig2_expected() {
    return {
        {A, B, 20 * kUsPerMs, 70 * kUsPerMs},
        {A, E, 70 * kUsPerMs, 120 * kUsPerMs},
        {D, F, 70 * kUsPerMs, 120 * kUsPerMs},
        {A, F, 120 * kUsPerMs, 170 * kUsPerMs},
        {A, D, 170 * kUsPerMs, 220 * kUsPerMs},
    };
}

GoldenOutcome run_golden_fig2() {
    Engine engine(golden_fig2_config());
    const RunArtifacts artifacts = engine.run_one(1);

    std::vector<Reservation> got;
    for (const auto& lr : artifacts.ledger.reservations()) got.push_back(lr.res);
    std::sort(got.begin(), got.end());
    std::vector<Reservation> want = golden_fig2_expected();
    std::sort(want.begin(), want.end());

    GoldenOutcome out;
    out.pass = got == want;
    if (!out.pass) {
        std::ostringstream os;
        os << "reservation ledger mismatch\n";
        for (const auto& r : want) {
            const bool present = std::find(got.begin(), got.end(), r) != got.end();
            if (!present) os << "- " << format_reservation(r) << "\n";
        }
        for (const auto& r : got) {
            const bool expected = std::find(want.begin(), want.end(), r) != want.end();
            if (!expected) os << "+ " << format_reservation(r) << "\n";
        }
        out.diff = os.str();
    }
    return out;
}

GoldenOutcome run_golden_fig3() {
    Engine engine(golden_fig3_config());
    const RunArtifacts artifacts = engine.run_one(1);

    GoldenOutcome out;
    std::ostringstream os;

    const auto discovered_in_first_cycle = [&](vehicle_id v) -> std::vector<vehicle_id> {
        for (const auto& d : engine.ad_discoveries())
            if (d.vehicle == v && d.cycle_index == 0) return d.discovered;
        return {};
    };

    const std::vector<vehicle_id> want_a{B, F, E};
    const std::vector<vehicle_id> want_d{E, F};
    const auto got_a = discovered_in_first_cycle(A);
    const auto got_d = discovered_in_first_cycle(D);

    bool pass = true;
    if (got_a != want_a) {
        pass = false;
        os << "A's first-cycle discovery: expected " << format_set(want_a) << ", got "
           << format_set(got_a) << "\n";
    }
    if (got_d != want_d) {
        pass = false;
        os << "D's first-cycle discovery: expected " << format_set(want_d) << ", got "
           << format_set(got_d) << "\n";
    }

    const auto& conflicts = artifacts.ledger.conflicts();
    if (conflicts.size() != 1) {
        pass = false;
        os << "expected exactly 1 grant conflict, got " << conflicts.size() << "\n";
    } else {
        const auto& c = conflicts.front();
        if (c.rx != F || c.winner_tx != A || c.loser_tx != D) {
            pass = false;
            os << "conflict mismatch: expected F honoring A over D, got rx=" << letter(c.rx)
               << " winner=" << letter(c.winner_tx) << " loser=" << letter(c.loser_tx) << "\n";
        }
    }

    out.pass = pass;
    out.diff = os.str();
    return out;
}

GoldenOutcome run_golden(const std::string& name) {
    if (name == "fig2") return run_golden_fig2();
    if (name == "fig3") return run_golden_fig3();
    throw std::invalid_argument("unknown golden name: " + name + " (expected fig2 or fig3)");
}

}  // namespace macsim
