#pragma once

#include <string>
#include <vector>

#include "macsim/engine.hpp"

namespace macsim {

/// The pinned five-vehicle scene behind both golden replays. Static (all
/// speeds zero) so the expected ledgers are exact. Ids: A=0, B=1, D=2,
/// E=3, F=4.
namespace golden_ids {
constexpr vehicle_id A = 0, B = 1, D = 2, E = 3, F = 4;
}

ScenarioState golden_scenario();

/// Assisted-MAC replay: A activates at 0 targeting its LOS neighbors
/// {B,D,E,F}; D activates at 45 ms targeting F only.
RunConfig golden_fig2_config();

/// Reference-MAC replay: A activates at 0, D at 20 ms, both targeting their
/// LOS neighbors.
RunConfig golden_fig3_config();

std::vector<Reservation> golden_fig2_expected();

struct GoldenOutcome {
    bool pass = false;
    std::string diff;  // human-readable mismatch description, empty on pass
};

GoldenOutcome run_golden_fig2();
GoldenOutcome run_golden_fig3();
GoldenOutcome run_golden(const std::string& name);  // "fig2" | "fig3"

}  // namespace macsim
