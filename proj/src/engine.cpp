#include "macsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "macsim/stats.hpp"

namespace macsim {

std::string to_string(ActivationPolicy p) {
    switch (p) {
        case ActivationPolicy::UniformOnce: return "uniform";
        case ActivationPolicy::AllAtZero: return "all-at-zero";
        case ActivationPolicy::Poisson: return "poisson";
    }
    return "uniform";
}

ActivationPolicy activation_policy_from_string(const std::string& s) {
    if (s == "uniform") return ActivationPolicy::UniformOnce;
    if (s == "all-at-zero" || s == "all_at_zero") return ActivationPolicy::AllAtZero;
    if (s == "poisson") return ActivationPolicy::Poisson;
    throw std::invalid_argument("unknown activation policy: " + s);
}

std::string to_string(EventKind k) {
    switch (k) {
        case EventKind::MobilityStep: return "mobility-step";
        case EventKind::ReservationEnd: return "reservation-end";
        case EventKind::BecomeTransmitter: return "become-transmitter";
        case EventKind::BeaconTx: return "beacon-tx";
        case EventKind::AdCycleCommit: return "cycle-boundary";
        case EventKind::ReservationStart: return "reservation-start";
    }
    return "?";
}

void RunConfig::validate() const {
    scenario.validate();
    sub6.validate();
    ad.validate();
    if (r_tx < 0.0 || r_tx > 1.0) throw std::invalid_argument("r_tx must be in [0,1]");
    if (sim_duration <= 0) throw std::invalid_argument("sim_duration must be > 0");
    if (replications < 1) throw std::invalid_argument("replications must be >= 1");
    if (mobility_step <= 0) throw std::invalid_argument("mobility_step must be > 0");
    // Any two responders of one transmitter sit within twice the mmWave range
    // of each other; the grant protocol relies on them overhearing each other.
    if (mac == MacKind::Assisted && 2.0 * scenario.mmwave_los_range > scenario.sub6_range)
        throw std::invalid_argument(
            "assisted MAC requires sub6_range >= 2 * mmwave_los_range");
}

struct Engine::QueuedEvent {
    Event ev;
    bool operator>(const QueuedEvent& o) const {
        if (ev.time != o.ev.time) return ev.time > o.ev.time;
        if (ev.kind != o.ev.kind) return static_cast<int>(ev.kind) > static_cast<int>(o.ev.kind);
        if (ev.subject != o.ev.subject) return ev.subject > o.ev.subject;
        return ev.aux > o.ev.aux;
    }
};

class Engine::EventQueue {
  public:
    void push(const Event& ev) { q_.push(QueuedEvent{ev}); }
    bool empty() const { return q_.empty(); }
    Event pop() {
        Event ev = q_.top().ev;
        q_.pop();
        return ev;
    }

  private:
    std::priority_queue<QueuedEvent, std::vector<QueuedEvent>, std::greater<QueuedEvent>> q_;
};

Engine::Engine(RunConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

Engine::~Engine() = default;

std::vector<vehicle_id> Engine::activation_targets(
    vehicle_id v, time_us t, const std::optional<std::vector<vehicle_id>>& pinned) {
    if (pinned) return *pinned;
    auto ids = los_neighbors(scenario_, v, t);
    // Stable, information-bearing order: nearest first.
    std::sort(ids.begin(), ids.end(), [&](vehicle_id a, vehicle_id b) {
        const double da = ring_distance(scenario_, v, a, t);
        const double db = ring_distance(scenario_, v, b, t);
        if (da != db) return da < db;
        return a < b;
    });
    return ids;
}

void Engine::schedule_activations(Rng& rng) {
    if (cfg_.pinned_scenario) {
        for (const auto& pa : cfg_.pinned_activations) {
            queue_->push({pa.time, EventKind::BecomeTransmitter, pa.vehicle, 0});
        }
        return;
    }
    for (const auto& v : scenario_.vehicles) {
        if (!v.is_mmwave_tx) continue;
        switch (cfg_.activation) {
            case ActivationPolicy::AllAtZero:
                queue_->push({0, EventKind::BecomeTransmitter, v.id, 0});
                break;
            case ActivationPolicy::UniformOnce:
                queue_->push({static_cast<time_us>(rng.next_below(cfg_.sub6.beacon_period)),
                              EventKind::BecomeTransmitter, v.id, 0});
                break;
            case ActivationPolicy::Poisson: {
                time_us t = 0;
                int round = 0;
                while (true) {
                    const double gap =
                        -static_cast<double>(cfg_.poisson_mean_gap) * std::log(1.0 - rng.next_double());
                    t += static_cast<time_us>(gap) + 1;
                    if (t >= cfg_.sim_duration) break;
                    queue_->push({t, EventKind::BecomeTransmitter, v.id, round++});
                }
                break;
            }
        }
    }
}

void Engine::handle_become_transmitter(const Event& ev) {
    const vehicle_id v = ev.subject;

    // An arrival while the previous round is still open is skipped, and must
    // not leave a phantom activation record behind.
    if (cfg_.mac == MacKind::Assisted) {
        if (mac_[v].intent && !mac_[v].intent->all_answered()) return;
    } else {
        if (ad_[v].cycling) return;
    }

    std::optional<std::vector<vehicle_id>> pinned;
    if (cfg_.pinned_scenario) {
        for (const auto& pa : cfg_.pinned_activations) {
            if (pa.vehicle == v && pa.time == ev.time) pinned = pa.targets;
        }
    }
    const int round = rounds_[v]++;

    if (cfg_.mac == MacKind::Assisted) {
        // The target list is not fixed yet: it is snapshotted at the next own
        // beacon, the instant the request is actually broadcast.
        activation_record_[v] = ledger_.record_activation({v, ev.time, round, {}});
        TxIntent intent;
        intent.owner = v;
        intent.activation_time = ev.time;
        intent.round = round;
        intent.target_override = pinned;
        mac_[v].intent = intent;
        return;
    }

    const auto targets = activation_targets(v, ev.time, pinned);
    ledger_.record_activation({v, ev.time, round, targets});
    if (targets.empty()) {
        ++ledger_.counters.empty_intents;
        return;  // no-op round: nothing to cycle for
    }
    auto& st = ad_[v];
    st = start_cycle(v, ev.time, targets);
    ad_round_[v] = round;
    if (st.cycling) {
        ledger_.add_busy_block(v, st.bhi(cfg_.ad));  // the sweep occupies the channel
        queue_->push({ev.time + cfg_.ad.bhi_dur, EventKind::AdCycleCommit, v, st.cycle_index});
    }
}

void Engine::handle_beacon(const Event& ev) {
    const vehicle_id v = ev.subject;
    const auto& vs = scenario_.vehicles[v];

    Beacon beacon;
    beacon.sender = v;
    beacon.tx_time = ev.time;
    beacon.position = scenario_.position_at(vs, ev.time);
    beacon.speed = vs.speed;
    beacon.lane = vs.lane;

    std::vector<Reservation> implied;
    if (cfg_.mac == MacKind::Assisted) {
        if (mac_[v].intent && mac_[v].intent->targets_pending) {
            auto& intent = *mac_[v].intent;
            const auto targets = activation_targets(v, ev.time, intent.target_override);
            for (vehicle_id u : targets)
                intent.targets.push_back({u, cfg_.assisted.tx_dur, -1, false});
            intent.targets_pending = false;
            ledger_.set_activation_targets(activation_record_[v], targets);
            if (targets.empty()) ++ledger_.counters.empty_intents;
        }
        auto composed = compose_beacon_extension(mac_[v], v, ev.time, cfg_.assisted,
                                                 ledger_.counters);
        beacon.extension = std::move(composed.extension);
        implied = std::move(composed.implied);
    }

    BeaconRecord rec;
    rec.time = ev.time;
    rec.sender = v;
    rec.base_bytes = cfg_.sub6.base_beacon_bytes;
    rec.bytes = beacon_bytes(beacon, cfg_.sub6);
    rec.entry_count = beacon.entry_count();
    rec.extension_kind = beacon.has_rts() ? 'R' : (beacon.has_cts() ? 'C' : '-');
    rec.recipients = -1;  // derived on export; audibility is a pure geometry fact

    if (beacon.has_rts()) {
        const auto& rts = std::get<RtsExtension>(beacon.extension);
        auto& oh = ledger_.overhead(v, mac_[v].intent ? mac_[v].intent->round : 0);
        oh.rts_entry_bytes += kBytesPerExtensionEntry * static_cast<int>(rts.entries.size());
    }

    if (rec.entry_count > 0) {
        const auto recipients = deliver_beacon(beacon, scenario_);
        rec.recipients = static_cast<int>(recipients.size());
        for (vehicle_id u : recipients) {
            auto committed = on_receive_extension(mac_[u], u, beacon, cfg_.assisted,
                                                  ledger_.counters);
            for (const auto& r : committed) {
                // u is the transmitter of r; annotate from its intent target.
                const auto& intent = *mac_[u].intent;
                const IntentTarget* tgt = nullptr;
                for (const auto& t : intent.targets)
                    if (t.neighbor == r.rx) tgt = &t;
                LedgerReservation lr;
                lr.res = r;
                lr.round = intent.round;
                lr.activation = intent.activation_time;
                lr.rts_time = tgt != nullptr ? tgt->announced_at : -1;
                lr.cts_time = ev.time;
                lr.delay = r.start - ev.time;
                ledger_.commit_checked(lr);
                ledger_.overhead(u, intent.round).cts_entry_bytes += kBytesPerExtensionEntry;
                const std::int64_t idx = static_cast<std::int64_t>(ledger_.reservations().size()) - 1;
                queue_->push({r.start, EventKind::ReservationStart, r.tx, idx});
                queue_->push({r.end, EventKind::ReservationEnd, r.tx, idx});
            }
        }
    }

    ledger_.record_beacon(rec);
    (void)implied;  // responder-side bookkeeping already lives in its book

    const time_us next = ev.time + cfg_.sub6.beacon_period;
    if (next < cfg_.sim_duration) queue_->push({next, EventKind::BeaconTx, v, 0});
}

void Engine::handle_ad_cycle_commit(const Event& ev) {
    const vehicle_id v = ev.subject;
    auto& st = ad_[v];
    if (!st.cycling || st.cycle_index != ev.aux) return;

    const Interval bhi = st.bhi(cfg_.ad);

    std::vector<time_us> samples{bhi.start};
    for (time_us t = (bhi.start / cfg_.mobility_step + 1) * cfg_.mobility_step; t < bhi.end;
         t += cfg_.mobility_step)
        samples.push_back(t);
    samples.push_back(bhi.end);

    std::vector<vehicle_id> candidates(st.unserved.begin(), st.unserved.end());
    const auto busy = [&](vehicle_id u) { return ledger_.vehicle_busy_overlapping(u, bhi); };
    const auto bhi_clash = [&](vehicle_id u) {
        const auto& other = ad_[u];
        if (!other.cycling) return false;
        for (const time_us cs : {other.cycle_start, other.cycle_start - cfg_.ad.cycle_period()}) {
            if (cs < other.activation) continue;
            const Interval w{cs, cs + cfg_.ad.bhi_dur};
            if (w.overlaps(bhi)) return true;
        }
        return false;
    };

    st.last_discovered = discover(scenario_, v, bhi, candidates, busy, bhi_clash, samples,
                                  cfg_.ad.max_neighbors);
    ad_discoveries_.push_back({v, st.cycle_index, st.last_discovered});

    for (const auto& grant : allocate_slots(st, cfg_.ad)) {
        LedgerReservation lr;
        lr.res = {grant.tx, grant.rx, grant.window.start, grant.window.end};
        lr.round = ad_round_[v];
        lr.activation = st.activation;
        lr.cycle_index = grant.cycle_index;
        lr.slot_index = grant.slot_index;
        lr.bhi = grant.bhi;
        vehicle_id blocking_tx = -1;
        if (ledger_.try_accept(lr, &blocking_tx)) {
            st.unserved.erase(grant.rx);
            const std::int64_t idx = static_cast<std::int64_t>(ledger_.reservations().size()) - 1;
            queue_->push({grant.window.start, EventKind::ReservationStart, grant.tx, idx});
            queue_->push({grant.window.end, EventKind::ReservationEnd, grant.tx, idx});
        } else {
            ledger_.record_conflict({grant.rx, blocking_tx, grant.tx, grant.window, ev.time});
            // The losing transmitter still sweeps its beam through the slot;
            // nothing can be granted to it meanwhile.
            ledger_.add_busy_block(grant.tx, grant.window);
        }
    }

    st.cycle_index += 1;
    st.cycle_start += cfg_.ad.cycle_period();
    if (st.unserved.empty() || st.cycle_index >= cfg_.ad.max_cycles ||
        st.cycle_start >= cfg_.sim_duration) {
        st.cycling = false;
        return;
    }
    ledger_.add_busy_block(v, st.bhi(cfg_.ad));
    queue_->push({st.cycle_start + cfg_.ad.bhi_dur, EventKind::AdCycleCommit, v, st.cycle_index});
}

void Engine::handle_reservation_start(const Event& ev) {
    auto& lr = ledger_.reservations()[ev.aux];
    if (!los(scenario_, lr.res.tx, lr.res.rx, ev.time)) lr.mobility_failed = true;
}

void Engine::handle_mobility(const Event& ev) {
    scenario_ = step_mobility(scenario_, ev.time - scenario_.time);
    const time_us next = ev.time + cfg_.mobility_step;
    if (next < cfg_.sim_duration) queue_->push({next, EventKind::MobilityStep, -1, 0});
}

RunArtifacts Engine::run_one(std::uint64_t seed, const EventSink& sink) {
    Rng rng(seed);
    if (cfg_.pinned_scenario) {
        scenario_ = *cfg_.pinned_scenario;
        scenario_.check_invariants();
    } else {
        scenario_ = generate_scenario(cfg_.scenario, cfg_.r_tx, cfg_.sub6.beacon_period, rng);
    }

    ledger_ = GlobalLedger{};
    ad_discoveries_.clear();
    const auto n = scenario_.vehicles.size();
    mac_.clear();
    mac_.reserve(n);
    ad_.assign(n, AdTransmitterState{});
    ad_round_.assign(n, 0);
    activation_record_.assign(n, 0);
    rounds_.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) mac_.emplace_back(static_cast<vehicle_id>(i));

    queue_ = std::make_unique<EventQueue>();
    for (const auto& v : scenario_.vehicles) {
        queue_->push({next_beacon_time(v.beacon_phase, cfg_.sub6.beacon_period, 0),
                      EventKind::BeaconTx, v.id, 0});
    }
    if (cfg_.mobility_step < cfg_.sim_duration)
        queue_->push({cfg_.mobility_step, EventKind::MobilityStep, -1, 0});
    schedule_activations(rng);

    while (!queue_->empty()) {
        const Event ev = queue_->pop();
        if (ev.time >= cfg_.sim_duration &&
            ev.kind != EventKind::ReservationStart && ev.kind != EventKind::ReservationEnd)
            continue;
        if (sink) sink(ev);
        switch (ev.kind) {
            case EventKind::MobilityStep: handle_mobility(ev); break;
            case EventKind::BecomeTransmitter: handle_become_transmitter(ev); break;
            case EventKind::BeaconTx: handle_beacon(ev); break;
            case EventKind::AdCycleCommit: handle_ad_cycle_commit(ev); break;
            case EventKind::ReservationStart: handle_reservation_start(ev); break;
            case EventKind::ReservationEnd: break;
        }
    }

    RunArtifacts art;
    art.ledger = std::move(ledger_);
    art.initial_scenario = cfg_.pinned_scenario ? *cfg_.pinned_scenario
                                                : ScenarioState{};
    if (!cfg_.pinned_scenario) {
        // Re-derive the t=0 snapshot for post-hoc geometry queries: positions
        // extrapolate in closed form, so rewind the final snapshot.
        art.initial_scenario = scenario_;
        for (auto& v : art.initial_scenario.vehicles)
            v.longitudinal_pos = scenario_.position_at(v, 0);
        art.initial_scenario.time = 0;
    }
    art.config = cfg_;
    return art;
}

}  // namespace macsim
