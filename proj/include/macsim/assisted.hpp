#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "macsim/sub6.hpp"
#include "macsim/time_types.hpp"

namespace macsim {

struct AssistedConfig {
    time_us tx_dur = 50 * kUsPerMs;          // duration announced per RTS target
    time_us default_tx_dur = 50 * kUsPerMs;  // fallback for CTS overheard without RTS
    int rts_retry_periods = 2;               // re-announce after this many beacon periods
    int intent_expiry_periods = 10;          // drop unanswered targets after this many
    time_us beacon_period = 100 * kUsPerMs;  // mirrors Sub6Config for retry timing
};

/// A committed mmWave transmission interval, half-open [start, end) in us.
struct Reservation {
    vehicle_id tx = 0;
    vehicle_id rx = 0;
    time_us start = 0;
    time_us end = 0;

    bool involves(vehicle_id v) const { return tx == v || rx == v; }
    bool overlaps(const Reservation& o) const { return start < o.end && o.start < end; }
    bool conflicts_with(const Reservation& o) const {
        return overlaps(o) && (involves(o.tx) || involves(o.rx));
    }
    friend bool operator==(const Reservation& a, const Reservation& b) {
        return a.tx == b.tx && a.rx == b.rx && a.start == b.start && a.end == b.end;
    }
    friend bool operator<(const Reservation& a, const Reservation& b) {
        if (a.start != b.start) return a.start < b.start;
        if (a.tx != b.tx) return a.tx < b.tx;
        if (a.rx != b.rx) return a.rx < b.rx;
        return a.end < b.end;
    }
};

/// Per-vehicle view of reservations learned by overhearing plus own
/// commitments. Kept conflict-free: inserts that would overlap an existing
/// entry sharing a vehicle are rejected.
class ReservationBook {
  public:
    explicit ReservationBook(vehicle_id owner = -1) : owner_(owner) {}

    vehicle_id owner() const { return owner_; }
    const std::vector<Reservation>& known() const { return known_; }

    bool insert(const Reservation& r);
    bool would_conflict(const Reservation& r) const;
    void prune(time_us now);

  private:
    vehicle_id owner_;
    std::vector<Reservation> known_;
};

/// Smallest s >= ref_time such that [s, s+dur) overlaps no reservation in the
/// book involving tx or rx in either role. delay = s - ref_time.
time_us earliest_start(vehicle_id tx, vehicle_id rx, time_us ref_time, time_us dur,
                       const ReservationBook& book);

struct PendingRts {
    vehicle_id transmitter = 0;
    time_us tx_dur = 0;
    time_us received_at = 0;
};

struct IntentTarget {
    vehicle_id neighbor = 0;
    time_us tx_dur = 0;
    time_us announced_at = -1;  // last RTS instant carrying this entry, -1 = never
    bool answered = false;
};

struct TxIntent {
    vehicle_id owner = 0;
    time_us activation_time = 0;
    int round = 0;  // activation round index (for per-round metrics)
    // The target set is snapshotted at the RTS beacon instant (that is the
    // information actually broadcast), so it stays empty until then.
    bool targets_pending = true;
    std::optional<std::vector<vehicle_id>> target_override;  // replay harness hook
    std::vector<IntentTarget> targets;

    bool all_answered() const;  // false while the snapshot is still pending
    IntentTarget* find(vehicle_id neighbor);
};

struct AssistedCounters {
    long stale_cts = 0;
    long default_dur_overhears = 0;
    long dropped_conflicting_overhears = 0;
    long empty_intents = 0;
    long expired_targets = 0;
    long reannounced_entries = 0;
    long deferred_cts = 0;
};

/// Per-vehicle MAC state; owned by the single-threaded engine loop.
struct AssistedVehicleState {
    ReservationBook book;
    std::vector<PendingRts> pending;                       // unanswered RTSs
    std::optional<TxIntent> intent;
    std::map<vehicle_id, std::map<vehicle_id, time_us>> rts_dur_cache;  // tx -> rx -> dur

    AssistedVehicleState() : book(-1) {}
    explicit AssistedVehicleState(vehicle_id v) : book(v) {}
};

/// Result of composing a beacon extension at a beacon instant.
struct ComposedExtension {
    BeaconExtension extension;  // monostate, RTS or CTS
    // Reservations implied by an emitted CTS, in entry order (already inserted
    // into the responder's book).
    std::vector<Reservation> implied;
};

/// Builds the extension for v's beacon at beacon_time: a queued RTS takes
/// priority and defers CTS replies to the next beacon; otherwise all pending
/// RTSs are answered oldest-first.
ComposedExtension compose_beacon_extension(AssistedVehicleState& st, vehicle_id v,
                                           time_us beacon_time, const AssistedConfig& cfg,
                                           AssistedCounters& counters);

/// Processes a received or overheard beacon extension. Returns reservations
/// newly committed by v as transmitter (entries addressed to v's intent).
std::vector<Reservation> on_receive_extension(AssistedVehicleState& st, vehicle_id v,
                                              const Beacon& beacon, const AssistedConfig& cfg,
                                              AssistedCounters& counters);

}  // namespace macsim
