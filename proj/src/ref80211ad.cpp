#include "macsim/ref80211ad.hpp"

#include <algorithm>
#include <stdexcept>

namespace macsim {

void AdCycleConfig::validate() const {
    if (bhi_dur <= 0 || dti_dur <= 0 || slot_dur <= 0)
        throw std::invalid_argument("802.11ad intervals must be > 0");
    if (max_neighbors < 1) throw std::invalid_argument("max_neighbors must be >= 1");
    if (static_cast<time_us>(max_neighbors) * slot_dur > dti_dur)
        throw std::invalid_argument("max_neighbors * slot_dur must fit in dti_dur");
    if (max_cycles < 1) throw std::invalid_argument("max_cycles must be >= 1");
}

AdTransmitterState start_cycle(vehicle_id v, time_us t, std::vector<vehicle_id> targets) {
    AdTransmitterState st;
    st.owner = v;
    st.activation = t;
    st.cycle_start = t;
    st.cycle_index = 0;
    st.targets = std::move(targets);
    st.unserved.insert(st.targets.begin(), st.targets.end());
    st.cycling = !st.unserved.empty();
    return st;
}

std::vector<vehicle_id> discover(const ScenarioState& scenario, vehicle_id v, Interval bhi,
                                 const std::vector<vehicle_id>& candidates,
                                 const std::function<bool(vehicle_id)>& busy_during_bhi,
                                 const std::function<bool(vehicle_id)>& bhi_overlaps,
                                 const std::vector<time_us>& los_sample_times,
                                 int max_neighbors) {
    std::vector<vehicle_id> found;
    for (vehicle_id u : candidates) {
        bool visible = true;
        for (time_us t : los_sample_times) {
            if (ring_distance(scenario, v, u, t) > scenario.mmwave_los_range ||
                !los(scenario, v, u, t)) {
                visible = false;
                break;
            }
        }
        if (!visible) continue;            // (i)
        if (busy_during_bhi(u)) continue;  // (ii)
        if (bhi_overlaps(u)) continue;     // (iii)
        found.push_back(u);
    }
    std::sort(found.begin(), found.end(), [&](vehicle_id a, vehicle_id b) {
        const double da = ring_distance(scenario, v, a, bhi.end);
        const double db = ring_distance(scenario, v, b, bhi.end);
        if (da != db) return da < db;
        return a < b;
    });
    if (static_cast<int>(found.size()) > max_neighbors) found.resize(max_neighbors);
    return found;
}

std::vector<SlotGrant> allocate_slots(const AdTransmitterState& st, const AdCycleConfig& cfg) {
    std::vector<SlotGrant> grants;
    int k = 0;
    for (vehicle_id target : st.last_discovered) {
        if (k >= cfg.max_neighbors) break;
        SlotGrant g;
        g.tx = st.owner;
        g.rx = target;
        g.window = st.slot_window(cfg, k);
        g.slot_index = k;
        g.cycle_index = st.cycle_index;
        g.bhi = st.bhi(cfg);
        grants.push_back(g);
        ++k;
    }
    return grants;
}

}  // namespace macsim
