#include "macsim/sub6.hpp"

#include <algorithm>
#include <stdexcept>

namespace macsim {

void Sub6Config::validate() const {
    if (beacon_period <= 0) throw std::invalid_argument("beacon_period must be > 0");
    if (data_rate_mbps <= 0) throw std::invalid_argument("data_rate must be > 0");
    if (base_beacon_bytes <= 0) throw std::invalid_argument("base_beacon_bytes must be > 0");
}

int Beacon::entry_count() const {
    if (const auto* rts = std::get_if<RtsExtension>(&extension))
        return static_cast<int>(rts->entries.size());
    if (const auto* cts = std::get_if<CtsExtension>(&extension))
        return static_cast<int>(cts->entries.size());
    return 0;
}

time_us next_beacon_time(time_us beacon_phase, time_us beacon_period, time_us now) {
    time_us r = (now - beacon_phase) % beacon_period;
    if (r < 0) r += beacon_period;
    return r == 0 ? now : now + (beacon_period - r);
}

int beacon_bytes(const Beacon& b, const Sub6Config& cfg) {
    return cfg.base_beacon_bytes + kBytesPerExtensionEntry * b.entry_count();
}

double airtime_us(int bytes, const Sub6Config& cfg) {
    return static_cast<double>(bytes) * 8.0 / cfg.data_rate_mbps;  // Mbps -> bits/us
}

std::vector<vehicle_id> deliver_beacon(const Beacon& b, const ScenarioState& state) {
    if (b.sender < 0 || b.sender >= static_cast<vehicle_id>(state.vehicles.size()))
        throw std::invalid_argument("deliver_beacon: unknown sender");
    std::vector<vehicle_id> out;
    for (const auto& u : state.vehicles) {
        if (u.id == b.sender) continue;
        if (in_sub6_range(state, b.sender, u.id, b.tx_time)) out.push_back(u.id);
    }
    return out;
}

double cbr(vehicle_id v, time_us window_start, time_us window_end,
           const std::vector<BeaconRecord>& log, const ScenarioState& state,
           const Sub6Config& cfg, bool use_base_bytes) {
    if (window_end <= window_start) throw std::invalid_argument("cbr: empty window");

    // Collect audible busy intervals in us (double: airtime is fractional).
    std::vector<std::pair<double, double>> busy;
    for (const auto& rec : log) {
        if (rec.time >= window_end) break;  // log is time-ordered
        const int bytes = use_base_bytes ? rec.base_bytes : rec.bytes;
        const double end = static_cast<double>(rec.time) + airtime_us(bytes, cfg);
        if (end <= static_cast<double>(window_start)) continue;
        if (rec.sender != v && !in_sub6_range(state, v, rec.sender, rec.time)) continue;
        busy.emplace_back(std::max<double>(rec.time, window_start),
                          std::min<double>(end, window_end));
    }
    std::sort(busy.begin(), busy.end());
    double total = 0.0, cur_start = 0.0, cur_end = -1.0;
    for (const auto& [s, e] : busy) {
        if (e <= s) continue;
        if (cur_end < s) {
            if (cur_end > cur_start) total += cur_end - cur_start;
            cur_start = s;
            cur_end = e;
        } else {
            cur_end = std::max(cur_end, e);
        }
    }
    if (cur_end > cur_start) total += cur_end - cur_start;
    return total / static_cast<double>(window_end - window_start);
}

}  // namespace macsim
