#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "macsim/assisted.hpp"
#include "macsim/ledger.hpp"
#include "macsim/ref80211ad.hpp"
#include "macsim/scenario.hpp"
#include "macsim/sub6.hpp"

namespace macsim {

enum class ActivationPolicy { UniformOnce, AllAtZero, Poisson };

std::string to_string(ActivationPolicy p);
ActivationPolicy activation_policy_from_string(const std::string& s);

/// Pinned activation used by the golden presets: explicit instant and,
/// optionally, an explicit target list instead of the LOS-derived one.
struct PinnedActivation {
    vehicle_id vehicle = 0;
    time_us time = 0;
    std::optional<std::vector<vehicle_id>> targets;
};

struct RunConfig {
    ScenarioConfig scenario;
    Sub6Config sub6;
    AssistedConfig assisted;
    AdCycleConfig ad;
    MacKind mac = MacKind::Assisted;
    double r_tx = 0.15;
    time_us sim_duration = 20'000 * kUsPerMs;
    int replications = 10;
    int min_replications = 10;
    double target_ci = 0.045;  // relative 95% margin for the stop rule
    ActivationPolicy activation = ActivationPolicy::UniformOnce;
    time_us poisson_mean_gap = 500 * kUsPerMs;
    std::uint64_t master_seed = 1;
    time_us mobility_step = 100 * kUsPerMs;
    time_us cbr_window = 1000 * kUsPerMs;

    // Golden replay hooks: a pre-built static scene with pinned activations.
    std::optional<ScenarioState> pinned_scenario;
    std::vector<PinnedActivation> pinned_activations;

    void validate() const;
};

/// Event kinds in tie-break rank order (documented contract: events at equal
/// times are processed by ascending rank, then subject id, then aux).
enum class EventKind : int {
    MobilityStep = 0,
    ReservationEnd = 1,
    BecomeTransmitter = 2,
    BeaconTx = 3,
    AdCycleCommit = 4,
    ReservationStart = 5,
};

std::string to_string(EventKind k);

struct Event {
    time_us time = 0;
    EventKind kind = EventKind::MobilityStep;
    vehicle_id subject = -1;
    std::int64_t aux = 0;  // round index, cycle index or reservation index
};

using EventSink = std::function<void(const Event&)>;

/// Everything one replication produced; metrics are derived from this.
struct RunArtifacts {
    GlobalLedger ledger;
    ScenarioState initial_scenario;  // positions extrapolate in closed form
    RunConfig config;
    std::vector<std::string> ad_discovery_notes;  // per-commit "v:cycle:ids" lines
};

/// Per-transmitter discovery outcome of one 802.11ad control interval,
/// exposed for the fig3 replay assertions.
struct AdDiscoveryRecord {
    vehicle_id vehicle = 0;
    int cycle_index = 0;
    std::vector<vehicle_id> discovered;
};

class Engine {
  public:
    explicit Engine(RunConfig cfg);
    ~Engine();

    /// Runs one replication to completion. Deterministic given (cfg, seed).
    RunArtifacts run_one(std::uint64_t seed, const EventSink& sink = nullptr);

    const std::vector<AdDiscoveryRecord>& ad_discoveries() const { return ad_discoveries_; }

  private:
    struct QueuedEvent;
    class EventQueue;

    void handle_become_transmitter(const Event& ev);
    void handle_beacon(const Event& ev);
    void handle_ad_cycle_commit(const Event& ev);
    void handle_reservation_start(const Event& ev);
    void handle_mobility(const Event& ev);

    void schedule_activations(Rng& rng);
    std::vector<vehicle_id> activation_targets(vehicle_id v, time_us t,
                                               const std::optional<std::vector<vehicle_id>>& pinned);

    RunConfig cfg_;
    ScenarioState scenario_;
    GlobalLedger ledger_;
    std::vector<AssistedVehicleState> mac_;
    std::vector<AdTransmitterState> ad_;
    std::vector<int> ad_round_;  // activation round the current ad cycle serves
    std::vector<std::size_t> activation_record_;  // open activation ledger index
    std::vector<int> rounds_;    // next activation round per vehicle
    std::vector<AdDiscoveryRecord> ad_discoveries_;
    std::unique_ptr<EventQueue> queue_;
    std::optional<std::vector<vehicle_id>> pending_target_override_;
};

}  // namespace macsim
