#pragma once

#include <functional>
#include <set>
#include <vector>

#include "macsim/scenario.hpp"
#include "macsim/time_types.hpp"

namespace macsim {

struct AdCycleConfig {
    time_us bhi_dur = ms_to_us(35.84);
    time_us dti_dur = 250 * kUsPerMs;
    time_us slot_dur = 50 * kUsPerMs;
    int max_neighbors = 5;
    int control_bytes_per_neighbor = 5800;
    int max_cycles = 20;  // bound on retry cycles per transmitter

    time_us cycle_period() const { return bhi_dur + dti_dur; }
    double control_time_fraction() const {
        return us_to_ms(bhi_dur) / us_to_ms(bhi_dur + dti_dur);
    }
    void validate() const;
};

/// Cyclic-interval state of one 802.11ad transmitter. Cycles run back-to-back
/// anchored at the become-transmitter instant; different transmitters are
/// mutually unsynchronized.
struct AdTransmitterState {
    vehicle_id owner = 0;
    time_us activation = 0;
    time_us cycle_start = 0;
    int cycle_index = 0;
    std::vector<vehicle_id> targets;        // LOS neighbors at activation
    std::set<vehicle_id> unserved;          // not yet successfully granted
    std::vector<vehicle_id> last_discovered;
    bool cycling = false;

    Interval bhi(const AdCycleConfig& cfg) const {
        return {cycle_start, cycle_start + cfg.bhi_dur};
    }
    Interval slot_window(const AdCycleConfig& cfg, int k) const {
        const time_us s = cycle_start + cfg.bhi_dur + k * cfg.slot_dur;
        return {s, s + cfg.slot_dur};
    }
};

AdTransmitterState start_cycle(vehicle_id v, time_us t, std::vector<vehicle_id> targets);

/// A candidate u is discovered iff (i) it stays a LOS neighbor of v at every
/// sample time of the BHI, (ii) it has no active mmWave link overlapping the
/// BHI, and (iii) its own BHI (if it is a cycling transmitter) does not
/// overlap v's. Result sorted by ascending ring distance at the BHI end,
/// truncated to max_neighbors.
std::vector<vehicle_id> discover(const ScenarioState& scenario, vehicle_id v, Interval bhi,
                                 const std::vector<vehicle_id>& candidates,
                                 const std::function<bool(vehicle_id)>& busy_during_bhi,
                                 const std::function<bool(vehicle_id)>& bhi_overlaps,
                                 const std::vector<time_us>& los_sample_times,
                                 int max_neighbors);

struct SlotGrant {
    vehicle_id tx = 0;
    vehicle_id rx = 0;
    Interval window;
    int slot_index = 0;
    int cycle_index = 0;
    Interval bhi;  // the allocating control interval
};

/// Assigns the discovered targets to consecutive slots of the current DTI.
std::vector<SlotGrant> allocate_slots(const AdTransmitterState& st, const AdCycleConfig& cfg);

}  // namespace macsim
