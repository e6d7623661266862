#include "macsim/assisted.hpp"

#include <algorithm>

namespace macsim {

bool ReservationBook::would_conflict(const Reservation& r) const {
    for (const auto& k : known_)
        if (k.conflicts_with(r)) return true;
    return false;
}

bool ReservationBook::insert(const Reservation& r) {
    for (const auto& k : known_)
        if (k == r) return true;  // idempotent
    if (would_conflict(r)) return false;
    known_.push_back(r);
    return true;
}

void ReservationBook::prune(time_us now) {
    known_.erase(std::remove_if(known_.begin(), known_.end(),
                                [now](const Reservation& r) { return r.end <= now; }),
                 known_.end());
}

time_us earliest_start(vehicle_id tx, vehicle_id rx, time_us ref_time, time_us dur,
                       const ReservationBook& book) {
    std::vector<Interval> blocking;
    for (const auto& r : book.known()) {
        if (r.involves(tx) || r.involves(rx)) blocking.push_back({r.start, r.end});
    }
    std::sort(blocking.begin(), blocking.end(),
              [](const Interval& a, const Interval& b) { return a.start < b.start; });
    time_us s = ref_time;
    for (const auto& iv : blocking) {
        if (iv.start < s + dur && iv.end > s) s = iv.end;
    }
    return s;
}

bool TxIntent::all_answered() const {
    if (targets_pending) return false;
    for (const auto& t : targets)
        if (!t.answered) return false;
    return true;
}

IntentTarget* TxIntent::find(vehicle_id neighbor) {
    for (auto& t : targets)
        if (t.neighbor == neighbor) return &t;
    return nullptr;
}

namespace {

std::optional<RtsExtension> build_rts(TxIntent& intent, time_us beacon_time,
                                      const AssistedConfig& cfg, AssistedCounters& counters) {
    RtsExtension rts;
    const time_us retry_after = cfg.rts_retry_periods * cfg.beacon_period;
    for (auto& t : intent.targets) {
        if (t.answered) continue;
        if (t.announced_at < 0) {
            rts.entries.push_back({t.neighbor, t.tx_dur});
            t.announced_at = beacon_time;
        } else if (beacon_time - t.announced_at > retry_after) {
            rts.entries.push_back({t.neighbor, t.tx_dur});
            t.announced_at = beacon_time;
            ++counters.reannounced_entries;
        }
    }
    if (rts.entries.empty()) return std::nullopt;
    return rts;
}

}  // namespace

ComposedExtension compose_beacon_extension(AssistedVehicleState& st, vehicle_id v,
                                           time_us beacon_time, const AssistedConfig& cfg,
                                           AssistedCounters& counters) {
    ComposedExtension out;
    st.book.prune(beacon_time);

    if (st.intent) {
        // Expire long-unanswered targets so a departed neighbor cannot pin the
        // intent open forever.
        const time_us expiry = cfg.intent_expiry_periods * cfg.beacon_period;
        for (auto& t : st.intent->targets) {
            if (!t.answered && t.announced_at >= 0 &&
                beacon_time - st.intent->activation_time > expiry) {
                t.answered = true;  // give up on this target
                ++counters.expired_targets;
            }
        }
        if (auto rts = build_rts(*st.intent, beacon_time, cfg, counters)) {
            out.extension = std::move(*rts);
            if (!st.pending.empty()) ++counters.deferred_cts;
            return out;  // RTS priority: CTS replies wait for the next beacon
        }
    }

    if (st.pending.empty()) return out;

    std::sort(st.pending.begin(), st.pending.end(), [](const PendingRts& a, const PendingRts& b) {
        if (a.received_at != b.received_at) return a.received_at < b.received_at;
        return a.transmitter < b.transmitter;
    });
    CtsExtension cts;
    for (const auto& p : st.pending) {
        const time_us s = earliest_start(p.transmitter, v, beacon_time, p.tx_dur, st.book);
        cts.entries.push_back({p.transmitter, s - beacon_time});
        const Reservation r{p.transmitter, v, s, s + p.tx_dur};
        st.book.insert(r);  // constrains the next entry in this same beacon
        out.implied.push_back(r);
    }
    st.pending.clear();
    out.extension = std::move(cts);
    return out;
}

std::vector<Reservation> on_receive_extension(AssistedVehicleState& st, vehicle_id v,
                                              const Beacon& beacon, const AssistedConfig& cfg,
                                              AssistedCounters& counters) {
    std::vector<Reservation> committed;
    st.book.prune(beacon.tx_time);

    if (const auto* rts = std::get_if<RtsExtension>(&beacon.extension)) {
        auto& cache = st.rts_dur_cache[beacon.sender];
        for (const auto& e : rts->entries) {
            cache[e.neighbor] = e.tx_dur;
            if (e.neighbor != v) continue;
            // Addressed to us: keep one pending entry per transmitter, the
            // oldest receipt time wins so answer order stays stable.
            bool found = false;
            for (auto& p : st.pending) {
                if (p.transmitter == beacon.sender) {
                    p.tx_dur = e.tx_dur;
                    found = true;
                    break;
                }
            }
            if (!found) st.pending.push_back({beacon.sender, e.tx_dur, beacon.tx_time});
        }
        return committed;
    }

    const auto* cts = std::get_if<CtsExtension>(&beacon.extension);
    if (cts == nullptr) return committed;

    for (const auto& e : cts->entries) {
        if (e.transmitter == v) {
            // CTS addressed to our intent.
            IntentTarget* target = st.intent ? st.intent->find(beacon.sender) : nullptr;
            if (target == nullptr || target->answered) {
                ++counters.stale_cts;
                continue;
            }
            const time_us start = beacon.tx_time + e.delay;
            const Reservation r{v, beacon.sender, start, start + target->tx_dur};
            st.book.insert(r);
            target->answered = true;
            committed.push_back(r);
        } else {
            // Overheard grant: pair the delay with the duration announced in
            // the corresponding RTS, or fall back to the default.
            time_us dur = cfg.default_tx_dur;
            auto by_tx = st.rts_dur_cache.find(e.transmitter);
            if (by_tx != st.rts_dur_cache.end()) {
                auto by_rx = by_tx->second.find(beacon.sender);
                if (by_rx != by_tx->second.end()) {
                    dur = by_rx->second;
                } else {
                    ++counters.default_dur_overhears;
                }
            } else {
                ++counters.default_dur_overhears;
            }
            const time_us start = beacon.tx_time + e.delay;
            if (!st.book.insert({e.transmitter, beacon.sender, start, start + dur}))
                ++counters.dropped_conflicting_overhears;
        }
    }
    return committed;
}

}  // namespace macsim
