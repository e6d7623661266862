#include "macsim/metrics.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace macsim {

std::array<time_us, kSharingBins> sharing_times(const std::vector<LedgerReservation>& rs,
                                                Interval window) {
    std::array<time_us, kSharingBins> acc{};
    if (window.end <= window.start) return acc;
    std::vector<std::pair<time_us, int>> edges;
    edges.reserve(rs.size() * 2);
    for (const auto& lr : rs) {
        edges.emplace_back(lr.res.start, +1);
        edges.emplace_back(lr.res.end, -1);
    }
    std::sort(edges.begin(), edges.end());
    time_us cursor = window.start;
    int level = 0;
    std::size_t i = 0;
    while (i < edges.size() && edges[i].first <= window.start) level += edges[i++].second;
    for (; i < edges.size() && cursor < window.end; ++i) {
        const time_us t = std::min(edges[i].first, window.end);
        if (t > cursor) {
            acc[std::min(level, kSharingBins - 1)] += t - cursor;
            cursor = t;
        }
        if (edges[i].first >= window.end) break;
        level += edges[i].second;
    }
    if (cursor < window.end) acc[std::min(level, kSharingBins - 1)] += window.end - cursor;
    return acc;
}

double mean_first_tx_delay_ms(const RunArtifacts& artifacts) {
    const auto& ledger = artifacts.ledger;
    std::map<std::pair<vehicle_id, int>, time_us> first_start;
    for (const auto& lr : ledger.reservations()) {
        const auto key = std::make_pair(lr.res.tx, lr.round);
        auto it = first_start.find(key);
        if (it == first_start.end() || lr.res.start < it->second) first_start[key] = lr.res.start;
    }
    std::vector<double> delays;
    for (const auto& act : ledger.activations()) {
        auto it = first_start.find({act.vehicle, act.round});
        if (it != first_start.end())
            delays.push_back(us_to_ms(it->second - act.time));
    }
    return mean_of(delays);
}

ReplicationMetrics compute_metrics(const RunArtifacts& artifacts, std::uint64_t seed) {
    const auto& ledger = artifacts.ledger;
    const auto& cfg = artifacts.config;
    ReplicationMetrics m;
    m.mac = to_string(cfg.mac);
    m.r_tx = cfg.r_tx;
    m.seed = seed;
    m.conflicts = static_cast<long>(ledger.conflicts().size());
    m.reservations = static_cast<long>(ledger.reservations().size());

    // Per-(tx, round) served target sets and sorted start times.
    std::map<std::pair<vehicle_id, int>, std::set<vehicle_id>> served;
    std::map<std::pair<vehicle_id, int>, std::vector<time_us>> starts;
    long completed = 0;
    for (const auto& lr : ledger.reservations()) {
        const auto key = std::make_pair(lr.res.tx, lr.round);
        served[key].insert(lr.res.rx);
        starts[key].push_back(lr.res.start);
        if (lr.mobility_failed)
            ++m.mobility_failed;
        else
            ++completed;
    }
    m.data_bytes_delivered = static_cast<double>(completed) * 600.0 * 1600.0;

    // Scheduled ratio: transmitters with zero LOS neighbors are excluded.
    std::vector<double> ratios;
    for (const auto& act : ledger.activations()) {
        if (act.targets.empty()) continue;
        const auto it = served.find({act.vehicle, act.round});
        const double n_served = it == served.end() ? 0.0 : static_cast<double>(it->second.size());
        ratios.push_back(n_served / static_cast<double>(act.targets.size()));
    }
    m.transmitters_with_targets = static_cast<int>(ratios.size());
    m.scheduled_ratio = mean_of(ratios);

    // Delay to the n-th scheduled neighbor, plus consecutive-start spacing.
    for (auto& [key, v] : starts) std::sort(v.begin(), v.end());
    double increment_total = 0.0;
    for (const auto& act : ledger.activations()) {
        const auto it = starts.find({act.vehicle, act.round});
        if (it == starts.end()) continue;
        const auto& v = it->second;
        for (std::size_t n = 0; n < 5 && n < v.size(); ++n)
            m.delay_to_nth[n].samples_ms.push_back(us_to_ms(v[n] - act.time));
        for (std::size_t n = 1; n < v.size(); ++n) {
            increment_total += us_to_ms(v[n] - v[n - 1]);
            ++m.delay_increment_samples;
        }
    }
    for (auto& d : m.delay_to_nth) d.stats = summarize(d.samples_ms);
    m.mean_delay_increment_ms =
        m.delay_increment_samples > 0 ? increment_total / m.delay_increment_samples : 0.0;

    for (const auto& lr : ledger.reservations()) {
        if (cfg.mac == MacKind::Assisted) {
            if (lr.rts_time < 0 || lr.res.start < lr.rts_time) ++m.rts_floor_violations;
        } else {
            if (lr.res.start - lr.activation < cfg.ad.bhi_dur) ++m.bhi_floor_violations;
        }
    }

    // Spatial sharing histogram over [first activation, last reservation end].
    time_us first_act = -1, last_end = -1;
    for (const auto& act : ledger.activations())
        if (first_act < 0 || act.time < first_act) first_act = act.time;
    for (const auto& lr : ledger.reservations()) last_end = std::max(last_end, lr.res.end);
    if (first_act >= 0 && last_end > first_act) {
        const Interval window{first_act, last_end};
        const auto times = sharing_times(ledger.reservations(), window);
        m.sharing_window_us = window.length();
        for (int k = 0; k < kSharingBins; ++k)
            m.sharing_histogram[k] =
                static_cast<double>(times[k]) / static_cast<double>(window.length());
    }

    // Control overhead.
    if (cfg.mac == MacKind::Assisted) {
        std::vector<double> round_bytes;
        long total_bytes = 0;
        long total_served = 0;
        for (const auto& [key, oh] : ledger.overheads()) {
            round_bytes.push_back(static_cast<double>(oh.total()));
            total_bytes += oh.total();
        }
        for (const auto& [key, s] : served) total_served += static_cast<long>(s.size());
        m.mean_round_overhead_bytes = mean_of(round_bytes);
        m.per_neighbor_overhead_bytes =
            total_served > 0 ? static_cast<double>(total_bytes) / static_cast<double>(total_served)
                             : 0.0;
        m.control_time_fraction = 0.0;  // every mmWave microsecond carries data
    } else {
        long total_served = 0;
        for (const auto& [key, s] : served) total_served += static_cast<long>(s.size());
        m.ref_overhead_bytes_per_neighbor = cfg.ad.control_bytes_per_neighbor;
        m.mean_round_overhead_bytes =
            m.transmitters_with_targets > 0
                ? static_cast<double>(cfg.ad.control_bytes_per_neighbor) *
                      static_cast<double>(total_served) / m.transmitters_with_targets
                : 0.0;
        m.control_time_fraction = cfg.ad.control_time_fraction();
    }

    // CBR over the scheduling window (extensions all occur early; the stripped
    // log is byte-exactly an extension-free run).
    if (cfg.mac == MacKind::Assisted) {
        const time_us w_end = std::min(cfg.cbr_window, cfg.sim_duration);
        std::vector<double> with_ext, base;
        for (const auto& v : artifacts.initial_scenario.vehicles) {
            with_ext.push_back(
                cbr(v.id, 0, w_end, ledger.beacons(), artifacts.initial_scenario, cfg.sub6, false));
            base.push_back(
                cbr(v.id, 0, w_end, ledger.beacons(), artifacts.initial_scenario, cfg.sub6, true));
        }
        m.cbr_with_extensions = mean_of(with_ext);
        m.cbr_baseline = mean_of(base);
        m.cbr_delta_relative = m.cbr_baseline > 0.0
                                   ? (m.cbr_with_extensions - m.cbr_baseline) / m.cbr_baseline
                                   : 0.0;
    }

    return m;
}

MetricsReport aggregate_metrics(std::vector<ReplicationMetrics> reps) {
    MetricsReport r;
    if (reps.empty()) return r;
    r.mac = reps.front().mac;
    r.r_tx = reps.front().r_tx;
    r.replications = static_cast<int>(reps.size());

    const auto ci_of = [](const std::vector<double>& xs) {
        CiValue c;
        c.n = static_cast<int>(xs.size());
        c.mean = mean_of(xs);
        if (xs.size() >= 2)
            c.margin = student_t_975(xs.size() - 1) * sample_stddev(xs) /
                       std::sqrt(static_cast<double>(xs.size()));
        return c;
    };

    std::vector<double> ratios, round_bytes, delay1, cbr_deltas;
    for (const auto& m : reps) {
        ratios.push_back(m.scheduled_ratio);
        round_bytes.push_back(m.mean_round_overhead_bytes);
        if (m.delay_to_nth[0].stats.count > 0) delay1.push_back(m.delay_to_nth[0].stats.mean);
        cbr_deltas.push_back(m.cbr_delta_relative);
        r.conflicts += m.conflicts;
    }
    r.scheduled_ratio = ci_of(ratios);
    r.mean_round_overhead_bytes = ci_of(round_bytes);
    r.delay_to_first_ms = ci_of(delay1);
    r.cbr_delta_relative = ci_of(cbr_deltas);
    r.control_time_fraction = reps.front().control_time_fraction;

    double per_neighbor = 0.0;
    for (const auto& m : reps) per_neighbor += m.per_neighbor_overhead_bytes;
    r.per_neighbor_overhead_bytes = per_neighbor / static_cast<double>(reps.size());
    const double ref_bytes = 5800.0;
    r.overhead_reduction_per_round = 1.0 - r.mean_round_overhead_bytes.mean / ref_bytes;
    r.overhead_reduction_per_neighbor = 1.0 - r.per_neighbor_overhead_bytes / ref_bytes;

    for (int n = 0; n < 5; ++n) {
        std::vector<double> pooled;
        for (const auto& m : reps)
            pooled.insert(pooled.end(), m.delay_to_nth[n].samples_ms.begin(),
                          m.delay_to_nth[n].samples_ms.end());
        r.delay_to_nth[n] = summarize(pooled);
    }
    for (int k = 0; k < kSharingBins; ++k) {
        double acc = 0.0;
        for (const auto& m : reps) acc += m.sharing_histogram[k];
        r.sharing_histogram[k] = acc / static_cast<double>(reps.size());
    }
    r.per_replication = std::move(reps);
    return r;
}

std::string metrics_to_json(const MetricsReport& report) {
    nlohmann::json j;
    j["mac"] = report.mac;
    j["r_tx"] = report.r_tx;
    j["replications"] = report.replications;
    j["scheduled_ratio"] = {{"mean", report.scheduled_ratio.mean},
                            {"ci95", report.scheduled_ratio.margin}};
    j["control_overhead"] = {
        {"mean_round_bytes", report.mean_round_overhead_bytes.mean},
        {"mean_round_bytes_ci95", report.mean_round_overhead_bytes.margin},
        {"per_neighbor_bytes", report.per_neighbor_overhead_bytes},
        {"reduction_per_round", report.overhead_reduction_per_round},
        {"reduction_per_neighbor", report.overhead_reduction_per_neighbor}};
    j["control_time_fraction"] = report.control_time_fraction;
    j["delay_to_first_ms"] = {{"mean", report.delay_to_first_ms.mean},
                              {"ci95", report.delay_to_first_ms.margin}};
    for (int n = 0; n < 5; ++n) {
        const auto& s = report.delay_to_nth[n];
        j["delay_to_nth_ms"][std::to_string(n + 1)] = {
            {"mean", s.mean}, {"p10", s.p10}, {"p90", s.p90}, {"count", s.count}};
    }
    const char* bin_names[kSharingBins] = {"0", "1", "2", "3", "4+"};
    for (int k = 0; k < kSharingBins; ++k)
        j["sharing_histogram"][bin_names[k]] = report.sharing_histogram[k];
    j["cbr_delta_relative"] = {{"mean", report.cbr_delta_relative.mean},
                               {"ci95", report.cbr_delta_relative.margin}};
    j["conflicts"] = report.conflicts;
    return j.dump(2);
}

std::string metrics_csv_header() {
    return "mac,r_tx,replication,seed,scheduled_ratio,mean_round_overhead_bytes,"
           "per_neighbor_overhead_bytes,control_time_fraction,delay1_ms,delay2_ms,delay3_ms,"
           "delay4_ms,delay5_ms,share0,share1,share2,share3,share4plus,cbr_delta_relative,"
           "conflicts,reservations,mobility_failed";
}

std::string metrics_csv_row(const ReplicationMetrics& m) {
    std::ostringstream os;
    os << m.mac << ',' << m.r_tx << ',' << m.replication_index << ',' << m.seed << ','
       << m.scheduled_ratio << ','
       << m.mean_round_overhead_bytes << ',' << m.per_neighbor_overhead_bytes << ','
       << m.control_time_fraction;
    for (int n = 0; n < 5; ++n) os << ',' << m.delay_to_nth[n].stats.mean;
    for (int k = 0; k < kSharingBins; ++k) os << ',' << m.sharing_histogram[k];
    os << ',' << m.cbr_delta_relative << ',' << m.conflicts << ',' << m.reservations << ','
       << m.mobility_failed;
    return os.str();
}

}  // namespace macsim
