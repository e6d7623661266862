#pragma once

#include <string>
#include <vector>

#include "macsim/engine.hpp"

namespace macsim {

/// Built-in preset names: "paper-highway-125", "paper-highway-250".
std::vector<std::string> builtin_preset_names();
RunConfig builtin_preset(const std::string& name);

/// Resolves a preset by name: files take precedence over built-ins. The
/// search path is $MACSIM_PRESET_DIR, then ./presets, then the name itself
/// as a path.
RunConfig load_preset(const std::string& name_or_path);

/// Flat key=value config file with [section] headers. Unknown sections or
/// keys are rejected; values are type-checked.
RunConfig parse_config_text(const std::string& text);
std::string config_to_text(const RunConfig& cfg);

/// Applies one "section.key=value" override.
void apply_override(RunConfig& cfg, const std::string& assignment);

struct CalibrationResult {
    double range_m = 0.0;
    double mean_neighbors = 0.0;
    int iterations = 0;
};

/// Bisects mmwave_los_range until the population mean LOS-neighbor count over
/// `seeds` seeds lands in [5.4, 5.6]. Throws if the bracket does not contain
/// the target.
CalibrationResult calibrate_mmwave_range(RunConfig cfg, int seeds, double target = 5.5,
                                         double tolerance = 0.1);

/// Population mean LOS-neighbor count at t=0, averaged over seeds.
double mean_los_neighbors(const RunConfig& cfg, int seeds);

}  // namespace macsim
