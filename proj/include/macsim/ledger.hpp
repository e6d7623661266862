#pragma once

#include <map>
#include <string>
#include <vector>

#include "macsim/assisted.hpp"
#include "macsim/sub6.hpp"
#include "macsim/time_types.hpp"

namespace macsim {

enum class MacKind { Assisted, RefAd };

std::string to_string(MacKind mac);
MacKind mac_from_string(const std::string& s);

/// Canonical committed mmWave engagement plus MAC-specific annotations.
struct LedgerReservation {
    Reservation res;
    int round = 0;                 // activation round of the transmitter
    time_us activation = -1;       // become-transmitter instant of that round
    // assisted annotations
    time_us rts_time = -1;
    time_us cts_time = -1;
    time_us delay = -1;
    // ref 802.11ad annotations
    int cycle_index = -1;
    int slot_index = -1;
    Interval bhi{-1, -1};
    bool mobility_failed = false;  // LOS gone when the transmission started
};

struct GrantConflict {
    vehicle_id rx = 0;
    vehicle_id winner_tx = 0;
    vehicle_id loser_tx = 0;
    Interval window{0, 0};   // the rejected window
    time_us at = 0;          // commit instant of the losing grant
};

struct ActivationRecord {
    vehicle_id vehicle = 0;
    time_us time = 0;
    int round = 0;
    std::vector<vehicle_id> targets;  // LOS neighbors at activation (or pinned)
};

/// Per-round control-byte accounting for the assisted MAC: bytes of RTS
/// entries emitted by the transmitter plus CTS entries addressed to it.
struct RoundOverhead {
    int rts_entry_bytes = 0;
    int cts_entry_bytes = 0;
    int total() const { return rts_entry_bytes + cts_entry_bytes; }
};

/// Global run ledger: the single source of truth the invariant checks and all
/// metrics read from. Owned by one engine event loop; never shared mutable.
class GlobalLedger {
  public:
    /// Inserts after checking the half-duplex invariant; throws with a
    /// diagnostic if the reservation overlaps an engagement of tx or rx.
    void commit_checked(const LedgerReservation& lr);

    /// 802.11ad grant path: inserts only if tx and rx are both free for the
    /// window (earliest committed engagement wins). Returns false and records
    /// the blocking transmitter otherwise.
    bool try_accept(const LedgerReservation& lr, vehicle_id* blocking_tx);

    /// Non-reservation unavailability: control-interval sweeps and failed
    /// slot transmissions keep a vehicle occupied without forming a link.
    /// Blocks grant acceptance but never the half-duplex assertion.
    void add_busy_block(vehicle_id v, Interval w);

    bool vehicle_busy_overlapping(vehicle_id v, Interval window) const;

    const std::vector<LedgerReservation>& reservations() const { return reservations_; }
    std::vector<LedgerReservation>& reservations() { return reservations_; }
    const std::vector<GrantConflict>& conflicts() const { return conflicts_; }
    const std::vector<ActivationRecord>& activations() const { return activations_; }
    const std::vector<BeaconRecord>& beacons() const { return beacons_; }

    void record_conflict(const GrantConflict& c) { conflicts_.push_back(c); }
    std::size_t record_activation(ActivationRecord a) {
        activations_.push_back(std::move(a));
        return activations_.size() - 1;
    }
    // The assisted MAC snapshots its target set at the RTS beacon, after the
    // activation record was opened.
    void set_activation_targets(std::size_t index, std::vector<vehicle_id> targets) {
        activations_.at(index).targets = std::move(targets);
    }
    void record_beacon(const BeaconRecord& b) { beacons_.push_back(b); }

    RoundOverhead& overhead(vehicle_id tx, int round) { return overhead_[{tx, round}]; }
    const std::map<std::pair<vehicle_id, int>, RoundOverhead>& overheads() const {
        return overhead_;
    }

    AssistedCounters counters;

  private:
    struct Engagement {
        Interval window;
        vehicle_id other_tx;  // transmitter of the engagement (for conflict reports)
    };

    void insert_engagement(vehicle_id v, Interval w, vehicle_id tx);
    const Engagement* find_overlap(vehicle_id v, Interval w) const;
    bool busy_block_overlap(vehicle_id v, Interval w) const;

    std::vector<LedgerReservation> reservations_;
    std::vector<GrantConflict> conflicts_;
    std::vector<ActivationRecord> activations_;
    std::vector<BeaconRecord> beacons_;
    std::map<std::pair<vehicle_id, int>, RoundOverhead> overhead_;
    std::map<vehicle_id, std::vector<Engagement>> timelines_;  // sorted by start
    std::map<vehicle_id, std::vector<Interval>> busy_blocks_;  // may overlap each other
};

}  // namespace macsim
