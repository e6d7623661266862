#include "macsim/runner.hpp"

#include <sstream>

#include <nlohmann/json.hpp>

#include "macsim/stats.hpp"

namespace macsim {

MultiRunResult run_replicated(const RunConfig& cfg, bool keep_first_artifacts,
                              const EventSink& sink) {
    cfg.validate();
    MultiRunResult out;
    std::vector<ReplicationMetrics> reps;
    std::vector<double> delay_means;
    const int min_reps = std::min(cfg.min_replications, cfg.replications);

    for (int rep = 0; rep < cfg.replications; ++rep) {
        Engine engine(cfg);
        const std::uint64_t seed = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(rep));
        RunArtifacts artifacts = engine.run_one(seed, sink);
        delay_means.push_back(mean_first_tx_delay_ms(artifacts));

        ReplicationMetrics m = compute_metrics(artifacts, seed);
        m.replication_index = rep;
        reps.push_back(std::move(m));
        out.replications_run = rep + 1;
        if (rep == 0 && keep_first_artifacts) out.first_artifacts = std::move(artifacts);

        if (rep + 1 >= min_reps && relative_ci_margin(delay_means) <= cfg.target_ci) break;
    }
    out.achieved_ci = relative_ci_margin(delay_means);
    out.report = aggregate_metrics(std::move(reps));
    return out;
}

std::string reservation_ledger_csv(const RunArtifacts& artifacts) {
    std::ostringstream os;
    const bool ad = artifacts.config.mac == MacKind::RefAd;
    os << "tx,rx,start_ms,end_ms,rts_time_ms,cts_time_ms,delay_ms";
    if (ad) os << ",cycle_index,bhi_start_ms,bhi_end_ms";
    os << "\n";
    for (const auto& lr : artifacts.ledger.reservations()) {
        os << lr.res.tx << ',' << lr.res.rx << ',' << us_to_ms(lr.res.start) << ','
           << us_to_ms(lr.res.end) << ',';
        if (lr.rts_time >= 0) os << us_to_ms(lr.rts_time);
        os << ',';
        if (lr.cts_time >= 0) os << us_to_ms(lr.cts_time);
        os << ',';
        if (ad)
            os << us_to_ms(lr.res.start - lr.activation);  // delay from activation
        else if (lr.delay >= 0)
            os << us_to_ms(lr.delay);
        if (ad)
            os << ',' << lr.cycle_index << ',' << us_to_ms(lr.bhi.start) << ','
               << us_to_ms(lr.bhi.end);
        os << "\n";
    }
    return os.str();
}

std::string beacon_log_csv(const RunArtifacts& artifacts) {
    std::ostringstream os;
    os << "time_ms,sender,extension_kind,entry_count,bytes,recipients_count\n";
    for (const auto& rec : artifacts.ledger.beacons()) {
        int recipients = rec.recipients;
        if (recipients < 0) {
            // Plain beacons skip the recipient scan during the run; audibility
            // is a pure function of geometry, so derive it here.
            recipients = 0;
            for (const auto& u : artifacts.initial_scenario.vehicles) {
                if (u.id == rec.sender) continue;
                if (in_sub6_range(artifacts.initial_scenario, rec.sender, u.id, rec.time))
                    ++recipients;
            }
        }
        os << us_to_ms(rec.time) << ',' << rec.sender << ',' << rec.extension_kind << ','
           << rec.entry_count << ',' << rec.bytes << ',' << recipients << "\n";
    }
    return os.str();
}

std::string event_trace_ndjson(const RunConfig& cfg, long max_events) {
    std::ostringstream os;
    long count = 0;
    const EventSink sink = [&](const Event& ev) {
        if (max_events >= 0 && count >= max_events) return;
        ++count;
        nlohmann::json j;
        j["time_us"] = ev.time;
        j["kind"] = to_string(ev.kind);
        j["subject"] = ev.subject;
        j["aux"] = ev.aux;
        os << j.dump() << "\n";
    };
    Engine engine(cfg);
    engine.run_one(derive_seed(cfg.master_seed, 0), sink);
    return os.str();
}

}  // namespace macsim
