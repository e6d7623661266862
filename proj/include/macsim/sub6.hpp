#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "macsim/scenario.hpp"
#include "macsim/time_types.hpp"

namespace macsim {

struct Sub6Config {
    time_us beacon_period = 100 * kUsPerMs;
    double data_rate_mbps = 6.0;
    int base_beacon_bytes = 300;
    double tx_power_dbm = 15.0;  // informational only

    void validate() const;
};

/// Per footnote field sizes: 6-byte MAC address + 2-byte duration/delay.
constexpr int kBytesPerExtensionEntry = 8;

struct RtsEntry {
    vehicle_id neighbor = 0;
    time_us tx_dur = 0;
};

struct RtsExtension {
    std::vector<RtsEntry> entries;  // nonempty, distinct neighbor ids
};

struct CtsEntry {
    vehicle_id transmitter = 0;
    time_us delay = 0;  // relative to the CTS beacon instant
};

struct CtsExtension {
    std::vector<CtsEntry> entries;  // nonempty, distinct transmitter ids
};

/// A beacon carries at most one extension kind (RTS-priority rule).
using BeaconExtension = std::variant<std::monostate, RtsExtension, CtsExtension>;

struct Beacon {
    vehicle_id sender = 0;
    time_us tx_time = 0;
    double position = 0.0;  // kinematics snapshot: longitudinal pos at tx_time
    double speed = 0.0;
    int lane = 0;
    BeaconExtension extension;

    bool has_rts() const { return std::holds_alternative<RtsExtension>(extension); }
    bool has_cts() const { return std::holds_alternative<CtsExtension>(extension); }
    int entry_count() const;
};

/// Smallest t >= now with t congruent to the vehicle's phase mod period.
time_us next_beacon_time(time_us beacon_phase, time_us beacon_period, time_us now);

int beacon_bytes(const Beacon& b, const Sub6Config& cfg);

double airtime_us(int bytes, const Sub6Config& cfg);

std::vector<vehicle_id> deliver_beacon(const Beacon& b, const ScenarioState& state);

/// Append-only beacon record for CBR accounting and CSV export.
struct BeaconRecord {
    time_us time = 0;
    vehicle_id sender = 0;
    int bytes = 0;           // full beacon size including extension
    int base_bytes = 0;      // size with the extension stripped
    int entry_count = 0;
    char extension_kind = '-';  // '-', 'R', 'C'
    int recipients = 0;
};

/// Busy-union channel-busy-ratio at vehicle v over [window_start, window_end):
/// fraction of the window covered by airtime of beacons audible at v (sender
/// within sub6 range at tx time, or v itself). Overlaps counted once.
/// `use_base_bytes` recomputes airtime with extensions stripped, which equals
/// an extension-free run because extensions never shift beacon timing.
double cbr(vehicle_id v, time_us window_start, time_us window_end,
           const std::vector<BeaconRecord>& log, const ScenarioState& state,
           const Sub6Config& cfg, bool use_base_bytes);

}  // namespace macsim
