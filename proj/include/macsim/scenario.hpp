#pragma once

#include <optional>
#include <string>
#include <vector>

#include "macsim/rng.hpp"
#include "macsim/time_types.hpp"

namespace macsim {

struct ScenarioConfig {
    double road_length = 4000.0;        // m, ring road
    int lane_count = 4;
    double lane_width = 3.5;            // m
    double density = 125.0;             // vehicles per km, all lanes combined
    double vehicle_length = 5.0;        // m
    double vehicle_width = 2.0;         // m
    std::vector<double> lane_speeds = {33.0, 30.0, 27.0, 24.0};  // m/s per lane
    double mmwave_los_range = 28.36;    // m, calibrated so mean LOS degree ~= 5.5
    double sub6_range = 300.0;          // m, deterministic disc
    std::uint64_t seed = 1;

    void validate() const;  // throws std::invalid_argument
};

struct VehicleState {
    vehicle_id id = 0;
    int lane = 0;
    double longitudinal_pos = 0.0;      // m, in [0, road_length)
    double speed = 0.0;                 // m/s
    double length = 5.0;
    double width = 2.0;
    bool is_mmwave_tx = false;
    time_us beacon_phase = 0;           // us, in [0, beacon_period)
};

/// Snapshot of the moving geometry. Speeds are constant, so positions at any
/// query time follow in closed form from the snapshot; step_mobility just
/// re-anchors the snapshot.
struct ScenarioState {
    time_us time = 0;
    std::vector<VehicleState> vehicles;      // indexed by id
    double road_length = 4000.0;
    double lane_width = 3.5;
    double mmwave_los_range = 28.36;
    double sub6_range = 300.0;

    double lane_center_y(int lane) const { return lane_width * (0.5 + lane); }
    double position_at(const VehicleState& v, time_us t) const;

    void check_invariants() const;  // throws on id clash / same-lane overlap
};

/// Places floor(density * road_length / 1000) vehicles uniformly at random
/// (rejection sampling, min edge gap = vehicle_length), flags round(r_tx * n)
/// of them as mmWave transmitters and draws distinct beacon phases.
ScenarioState generate_scenario(const ScenarioConfig& cfg, double r_tx,
                                time_us beacon_period, Rng& rng);

/// Advances every vehicle by speed*dt along the ring. dt must be > 0.
ScenarioState step_mobility(const ScenarioState& state, time_us dt);

/// Signed ring offset from a to b in (-L/2, L/2].
double ring_delta(double from, double to, double road_length);

/// Euclidean distance with wrap-around longitudinal component.
double ring_distance(const ScenarioState& state, vehicle_id a, vehicle_id b, time_us t);

/// True iff the center-to-center segment at time t crosses no other vehicle's
/// footprint rectangle. 2-D model, antennas at the geometric center.
bool los(const ScenarioState& state, vehicle_id a, vehicle_id b, time_us t);

inline bool los(const ScenarioState& state, vehicle_id a, vehicle_id b) {
    return los(state, a, b, state.time);
}

/// All u with los(v,u) and ring_distance <= mmwave_los_range, ascending id.
std::vector<vehicle_id> los_neighbors(const ScenarioState& state, vehicle_id v, time_us t);

inline std::vector<vehicle_id> los_neighbors(const ScenarioState& state, vehicle_id v) {
    return los_neighbors(state, v, state.time);
}

bool in_sub6_range(const ScenarioState& state, vehicle_id a, vehicle_id b, time_us t);

/// Test/support primitive: closed-rectangle vs segment intersection.
bool segment_intersects_rect(double x1, double y1, double x2, double y2,
                             double rect_cx, double rect_cy,
                             double half_len, double half_wid);

}  // namespace macsim
