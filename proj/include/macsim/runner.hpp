#pragma once

#include <optional>
#include <string>

#include "macsim/engine.hpp"
#include "macsim/metrics.hpp"

namespace macsim {

struct MultiRunResult {
    MetricsReport report;
    double achieved_ci = 0.0;   // relative 95% margin of mean first-tx delay
    int replications_run = 0;
    // Artifacts of the first replication, kept when exports were requested.
    std::optional<RunArtifacts> first_artifacts;
};

/// Replications use independent seed streams derived from cfg.master_seed.
/// Runs at least cfg.min_replications, then stops as soon as the relative 95%
/// margin of the mean first-transmission delay drops to cfg.target_ci, or
/// when cfg.replications is exhausted.
MultiRunResult run_replicated(const RunConfig& cfg, bool keep_first_artifacts = false,
                              const EventSink& sink = nullptr);

/// CSV exports named in the module interfaces.
std::string reservation_ledger_csv(const RunArtifacts& artifacts);
std::string beacon_log_csv(const RunArtifacts& artifacts);

/// Newline-delimited event trace of a single replication (first seed stream),
/// capped at max_events records.
std::string event_trace_ndjson(const RunConfig& cfg, long max_events);

}  // namespace macsim
