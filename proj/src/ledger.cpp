#include "macsim/ledger.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace macsim {

std::string to_string(MacKind mac) {
    return mac == MacKind::Assisted ? "assisted" : "ref-ad";
}

MacKind mac_from_string(const std::string& s) {
    if (s == "assisted") return MacKind::Assisted;
    if (s == "ref-ad" || s == "ref_ad" || s == "80211ad") return MacKind::RefAd;
    throw std::invalid_argument("unknown mac kind: " + s);
}

void GlobalLedger::insert_engagement(vehicle_id v, Interval w, vehicle_id tx) {
    auto& tl = timelines_[v];
    auto it = std::lower_bound(tl.begin(), tl.end(), w.start,
                               [](const Engagement& e, time_us s) { return e.window.start < s; });
    tl.insert(it, Engagement{w, tx});
}

const GlobalLedger::Engagement* GlobalLedger::find_overlap(vehicle_id v, Interval w) const {
    auto tl_it = timelines_.find(v);
    if (tl_it == timelines_.end()) return nullptr;
    const auto& tl = tl_it->second;
    // First engagement starting at or after w.end cannot overlap; walk back.
    auto it = std::lower_bound(tl.begin(), tl.end(), w.end,
                               [](const Engagement& e, time_us s) { return e.window.start < s; });
    while (it != tl.begin()) {
        --it;
        if (it->window.end > w.start) return &*it;
        // Engagements of one vehicle are disjoint and sorted, so the first
        // non-overlap ends the search.
        break;
    }
    return nullptr;
}

void GlobalLedger::add_busy_block(vehicle_id v, Interval w) {
    busy_blocks_[v].push_back(w);
}

bool GlobalLedger::busy_block_overlap(vehicle_id v, Interval w) const {
    auto it = busy_blocks_.find(v);
    if (it == busy_blocks_.end()) return false;
    for (const auto& b : it->second)
        if (b.overlaps(w)) return true;
    return false;
}

bool GlobalLedger::vehicle_busy_overlapping(vehicle_id v, Interval window) const {
    return find_overlap(v, window) != nullptr;
}

void GlobalLedger::commit_checked(const LedgerReservation& lr) {
    const Interval w{lr.res.start, lr.res.end};
    for (vehicle_id v : {lr.res.tx, lr.res.rx}) {
        if (const Engagement* e = find_overlap(v, w)) {
            std::ostringstream msg;
            msg << "half-duplex violation: vehicle " << v << " double-booked; new "
                << lr.res.tx << "->" << lr.res.rx << " [" << lr.res.start << ","
                << lr.res.end << ") vs existing [" << e->window.start << ","
                << e->window.end << ") from tx " << e->other_tx;
            throw std::runtime_error(msg.str());
        }
    }
    insert_engagement(lr.res.tx, w, lr.res.tx);
    insert_engagement(lr.res.rx, w, lr.res.tx);
    reservations_.push_back(lr);
}

bool GlobalLedger::try_accept(const LedgerReservation& lr, vehicle_id* blocking_tx) {
    const Interval w{lr.res.start, lr.res.end};
    for (vehicle_id v : {lr.res.tx, lr.res.rx}) {
        if (const Engagement* e = find_overlap(v, w)) {
            if (blocking_tx != nullptr) *blocking_tx = e->other_tx;
            return false;
        }
        if (busy_block_overlap(v, w)) {
            // The vehicle is sweeping its own control interval or wasting a
            // conflicted slot during the window.
            if (blocking_tx != nullptr) *blocking_tx = v;
            return false;
        }
    }
    insert_engagement(lr.res.tx, w, lr.res.tx);
    insert_engagement(lr.res.rx, w, lr.res.tx);
    reservations_.push_back(lr);
    return true;
}

}  // namespace macsim
