#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "macsim/engine.hpp"
#include "macsim/stats.hpp"

namespace macsim {

/// Concurrency histogram bins: exactly 0,1,2,3 and ">= 4" simultaneous
/// mmWave transmissions.
constexpr int kSharingBins = 5;

struct DelaySummary {
    SummaryStats stats;        // over transmitters serving >= n neighbors, ms
    std::vector<double> samples_ms;
};

/// All evaluation quantities of one replication.
struct ReplicationMetrics {
    std::string mac;
    double r_tx = 0.0;
    std::uint64_t seed = 0;
    int replication_index = 0;

    double scheduled_ratio = 0.0;
    int transmitters_with_targets = 0;

    double mean_round_overhead_bytes = 0.0;    // assisted scheduling bytes per round
    double per_neighbor_overhead_bytes = 0.0;  // assisted bytes per served neighbor
    double ref_overhead_bytes_per_neighbor = 0.0;
    double control_time_fraction = 0.0;        // mmWave control share

    std::array<DelaySummary, 5> delay_to_nth;  // n = 1..5

    std::array<double, kSharingBins> sharing_histogram{};  // fractions, sum 1
    time_us sharing_window_us = 0;

    double cbr_with_extensions = 0.0;
    double cbr_baseline = 0.0;
    double cbr_delta_relative = 0.0;

    long conflicts = 0;
    long mobility_failed = 0;
    long reservations = 0;
    double data_bytes_delivered = 0.0;  // completed 50 ms exchanges * 600 * 1600 B

    // Hard per-sample invariants, counted over every reservation.
    long rts_floor_violations = 0;   // assisted: start earlier than the RTS
    long bhi_floor_violations = 0;   // ref: first start earlier than activation + bhi
    double mean_delay_increment_ms = 0.0;  // consecutive-start spacing per transmitter
    long delay_increment_samples = 0;
};

ReplicationMetrics compute_metrics(const RunArtifacts& artifacts, std::uint64_t seed);

/// Exact time spent at each concurrency level (0,1,2,3,>=4) over the window;
/// the bins always sum to window.length().
std::array<time_us, kSharingBins> sharing_times(const std::vector<LedgerReservation>& rs,
                                                Interval window);

/// Mean activation-to-first-transmission delay (ms); the CI stop rule metric.
double mean_first_tx_delay_ms(const RunArtifacts& artifacts);

struct CiValue {
    double mean = 0.0;
    double margin = 0.0;  // 95% half-width (absolute)
    int n = 0;
};

/// Aggregate over replications: means of replication means with Student-t CIs.
struct MetricsReport {
    std::string mac;
    double r_tx = 0.0;
    int replications = 0;

    CiValue scheduled_ratio;
    CiValue mean_round_overhead_bytes;
    double per_neighbor_overhead_bytes = 0.0;
    double overhead_reduction_per_round = 0.0;     // 1 - round_bytes/5800
    double overhead_reduction_per_neighbor = 0.0;  // 1 - per_neighbor/5800
    double control_time_fraction = 0.0;

    std::array<SummaryStats, 5> delay_to_nth;  // pooled samples, ms
    CiValue delay_to_first_ms;

    std::array<double, kSharingBins> sharing_histogram{};
    CiValue cbr_delta_relative;

    long conflicts = 0;

    std::vector<ReplicationMetrics> per_replication;
};

MetricsReport aggregate_metrics(std::vector<ReplicationMetrics> reps);

std::string metrics_to_json(const MetricsReport& report);

/// Flat CSV emission: one row per (mac, r_tx, replication).
std::string metrics_csv_header();
std::string metrics_csv_row(const ReplicationMetrics& m);

}  // namespace macsim
