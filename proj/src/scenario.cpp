#include "macsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <unordered_set>

namespace macsim {

void ScenarioConfig::validate() const {
    if (lane_count < 1) throw std::invalid_argument("lane_count must be >= 1");
    if (density <= 0) throw std::invalid_argument("density must be > 0");
    if (road_length <= 0 || lane_width <= 0 || vehicle_length <= 0 || vehicle_width <= 0)
        throw std::invalid_argument("all scenario dimensions must be > 0");
    if (mmwave_los_range <= 0 || sub6_range <= 0)
        throw std::invalid_argument("ranges must be > 0");
    if (mmwave_los_range > sub6_range)
        throw std::invalid_argument("mmwave_los_range must not exceed sub6_range");
    if (static_cast<int>(lane_speeds.size()) < lane_count)
        throw std::invalid_argument("lane_speeds must cover every lane");
    if (vehicle_width > lane_width)
        throw std::invalid_argument("vehicle_width must fit in a lane");
    if (sub6_range >= road_length / 2.0)
        throw std::invalid_argument("sub6_range must be below half the ring length");
}

double ScenarioState::position_at(const VehicleState& v, time_us t) const {
    const double dt_s = us_to_s(t - time);
    double p = std::fmod(v.longitudinal_pos + v.speed * dt_s, road_length);
    if (p < 0) p += road_length;
    return p;
}

void ScenarioState::check_invariants() const {
    std::unordered_set<vehicle_id> ids;
    for (const auto& v : vehicles) {
        if (!ids.insert(v.id).second) throw std::runtime_error("duplicate vehicle id");
        if (v.longitudinal_pos < 0 || v.longitudinal_pos >= road_length)
            throw std::runtime_error("vehicle position outside [0, road_length)");
    }
    // Same-lane footprints must stay disjoint.
    std::vector<std::vector<const VehicleState*>> by_lane;
    for (const auto& v : vehicles) {
        if (v.lane >= static_cast<int>(by_lane.size())) by_lane.resize(v.lane + 1);
        by_lane[v.lane].push_back(&v);
    }
    for (auto& lane : by_lane) {
        std::sort(lane.begin(), lane.end(), [](const VehicleState* a, const VehicleState* b) {
            return a->longitudinal_pos < b->longitudinal_pos;
        });
        for (std::size_t i = 0; i + 1 < lane.size(); ++i) {
            const double gap = lane[i + 1]->longitudinal_pos - lane[i]->longitudinal_pos;
            if (gap < (lane[i]->length + lane[i + 1]->length) / 2.0)
                throw std::runtime_error("same-lane vehicles overlap");
        }
        if (lane.size() >= 2) {
            const double wrap_gap = (lane.front()->longitudinal_pos + road_length) -
                                    lane.back()->longitudinal_pos;
            if (wrap_gap < (lane.front()->length + lane.back()->length) / 2.0)
                throw std::runtime_error("same-lane vehicles overlap across the wrap");
        }
    }
}

ScenarioState generate_scenario(const ScenarioConfig& cfg, double r_tx,
                                time_us beacon_period, Rng& rng) {
    cfg.validate();
    if (r_tx < 0.0 || r_tx > 1.0) throw std::invalid_argument("r_tx must be in [0,1]");

    const int n = static_cast<int>(std::floor(cfg.density * cfg.road_length / 1000.0));
    ScenarioState state;
    state.road_length = cfg.road_length;
    state.lane_width = cfg.lane_width;
    state.mmwave_los_range = cfg.mmwave_los_range;
    state.sub6_range = cfg.sub6_range;
    state.vehicles.reserve(n);

    // Min center-to-center spacing: footprints plus one vehicle-length gap.
    const double min_spacing = 2.0 * cfg.vehicle_length;
    std::vector<std::vector<double>> lane_positions(cfg.lane_count);

    const long max_attempts = 1000L * n + 1000;
    long attempts = 0;
    for (int i = 0; i < n; ++i) {
        bool placed = false;
        while (!placed) {
            if (++attempts > max_attempts)
                throw std::invalid_argument(
                    "vehicle placement failed: density infeasible for the road geometry");
            const int lane = static_cast<int>(rng.next_below(cfg.lane_count));
            const double pos = rng.next_uniform(0.0, cfg.road_length);
            bool ok = true;
            for (double other : lane_positions[lane]) {
                double d = std::abs(pos - other);
                d = std::min(d, cfg.road_length - d);
                if (d < min_spacing) { ok = false; break; }
            }
            if (!ok) continue;
            lane_positions[lane].push_back(pos);
            VehicleState v;
            v.id = i;
            v.lane = lane;
            v.longitudinal_pos = pos;
            v.speed = cfg.lane_speeds[lane];
            v.length = cfg.vehicle_length;
            v.width = cfg.vehicle_width;
            state.vehicles.push_back(v);
            placed = true;
        }
    }

    // Flag round(r_tx * n) transmitters via a seeded partial shuffle.
    const int n_tx = static_cast<int>(std::llround(r_tx * n));
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    for (int i = 0; i < n_tx; ++i) {
        const int j = i + static_cast<int>(rng.next_below(n - i));
        std::swap(order[i], order[j]);
    }
    for (int i = 0; i < n_tx; ++i) state.vehicles[order[i]].is_mmwave_tx = true;

    // Distinct beacon phases: equal phases would let two responders answer the
    // same RTS in the same instant without overhearing each other, which can
    // double-book the transmitter.
    std::set<time_us> used;
    for (auto& v : state.vehicles) {
        time_us phase;
        do {
            phase = static_cast<time_us>(rng.next_below(beacon_period));
        } while (!used.insert(phase).second);
        v.beacon_phase = phase;
    }

    state.check_invariants();
    return state;
}

ScenarioState step_mobility(const ScenarioState& state, time_us dt) {
    if (dt <= 0) throw std::invalid_argument("step_mobility requires dt > 0");
    ScenarioState next = state;
    next.time = state.time + dt;
    for (auto& v : next.vehicles) v.longitudinal_pos = state.position_at(v, next.time);
    return next;
}

double ring_delta(double from, double to, double road_length) {
    double d = std::fmod(to - from, road_length);
    if (d <= -road_length / 2.0) d += road_length;
    if (d > road_length / 2.0) d -= road_length;
    return d;
}

double ring_distance(const ScenarioState& state, vehicle_id a, vehicle_id b, time_us t) {
    const auto& va = state.vehicles[a];
    const auto& vb = state.vehicles[b];
    const double dx = ring_delta(state.position_at(va, t), state.position_at(vb, t),
                                 state.road_length);
    const double dy = state.lane_center_y(vb.lane) - state.lane_center_y(va.lane);
    return std::hypot(dx, dy);
}

bool segment_intersects_rect(double x1, double y1, double x2, double y2,
                             double rect_cx, double rect_cy,
                             double half_len, double half_wid) {
    const double rx1 = rect_cx - half_len, rx2 = rect_cx + half_len;
    const double ry1 = rect_cy - half_wid, ry2 = rect_cy + half_wid;

    // Clip the segment's parameter range against each slab (Liang-Barsky).
    const double dx = x2 - x1, dy = y2 - y1;
    double t0 = 0.0, t1 = 1.0;
    const double p[4] = {-dx, dx, -dy, dy};
    const double q[4] = {x1 - rx1, rx2 - x1, y1 - ry1, ry2 - y1};
    for (int i = 0; i < 4; ++i) {
        if (p[i] == 0.0) {
            if (q[i] < 0.0) return false;  // parallel and outside the slab
        } else {
            const double r = q[i] / p[i];
            if (p[i] < 0.0) {
                if (r > t1) return false;
                if (r > t0) t0 = r;
            } else {
                if (r < t0) return false;
                if (r < t1) t1 = r;
            }
        }
    }
    return t0 <= t1;
}

bool los(const ScenarioState& state, vehicle_id a, vehicle_id b, time_us t) {
    if (a == b) throw std::invalid_argument("los requires distinct vehicles");
    const auto& va = state.vehicles[a];
    const auto& vb = state.vehicles[b];
    const double ax = state.position_at(va, t);
    const double ay = state.lane_center_y(va.lane);
    // Unwrap everything relative to a; ranges are far below half the ring.
    const double bx = ax + ring_delta(ax, state.position_at(vb, t), state.road_length);
    const double by = state.lane_center_y(vb.lane);

    for (const auto& w : state.vehicles) {
        if (w.id == a || w.id == b) continue;
        const double wx = ax + ring_delta(ax, state.position_at(w, t), state.road_length);
        const double wy = state.lane_center_y(w.lane);
        if (segment_intersects_rect(ax, ay, bx, by, wx, wy, w.length / 2.0, w.width / 2.0))
            return false;
    }
    return true;
}

std::vector<vehicle_id> los_neighbors(const ScenarioState& state, vehicle_id v, time_us t) {
    std::vector<vehicle_id> out;
    for (const auto& u : state.vehicles) {
        if (u.id == v) continue;
        if (ring_distance(state, v, u.id, t) > state.mmwave_los_range) continue;
        if (los(state, v, u.id, t)) out.push_back(u.id);
    }
    return out;
}

bool in_sub6_range(const ScenarioState& state, vehicle_id a, vehicle_id b, time_us t) {
    if (a == b) throw std::invalid_argument("in_sub6_range requires distinct vehicles");
    return ring_distance(state, a, b, t) <= state.sub6_range;  // closed ball
}

}  // namespace macsim
