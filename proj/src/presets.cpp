#include "macsim/presets.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "macsim/scenario.hpp"

namespace macsim {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw std::invalid_argument("config key '" + key + "': expected a number, got '" + v + "'");
    }
}

long long parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw std::invalid_argument("config key '" + key + "': expected an integer, got '" + v +
                                    "'");
    }
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
    if (out.empty()) throw std::invalid_argument("config key '" + key + "': empty list");
    return out;
}

std::string list_to_string(const std::vector<double>& xs) {
    std::ostringstream os;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) os << ",";
        os << xs[i];
    }
    return os.str();
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;
using Getter = std::function<std::string(const RunConfig&)>;

struct FieldSpec {
    Setter set;
    Getter get;
};

std::string fmt(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

const std::map<std::string, FieldSpec>& schema() {
    static const std::map<std::string, FieldSpec> s = [] {
        std::map<std::string, FieldSpec> m;
        m["scenario.road_length"] = {
            [](RunConfig& c, const std::string& k, const std::string& v) {
                c.scenario.road_length = parse_double(k, v);
            },
            [](const RunConfig& c) { return fmt(c.scenario.road_length); }};
        m["scenario.lane_count"] = {
            [](RunConfig& c, const std::string& k, const std::string& v) {
                c.scenario.lane_count = static_cast<int>(parse_int(k, v));
            },
            [](const RunConfig& c) { return std::to_string(c.scenario.lane_count); }};
        m["scenario.lane_width"] = {
            [](RunConfig& c, const std::string& k, const std::string& v) {
                c.scenario.lane_width = parse_double(k, v);
            },
            [](const RunConfig& c) { return fmt(c.scenario.lane_width); }};
        m["scenario.density"] = {
            [](RunConfig& c, const std::string& k, const std::string& v) {
                c.scenario.density = parse_double(k, v);
            },
            [](const RunConfig& c) { return fmt(c.scenario.density); }};
        m["scenario.vehicle_length"] = {
            [](RunConfig& c, const std::string& k, const std::string& v) {
                c.scenario.vehicle_length = parse_double(k, v);
            },
            [](const RunConfig& c) { return fmt(c.scenario.vehicle_length); }};
        m["scenario.vehicle_width"] = {
            [](RunConfig& c, const std::string& k, const std::string& v) {
                c.scenario.vehicle_width = parse_double(k, v);
            },
            [](const RunConfig& c) { return fmt(c.scenario.vehicle_width); }};
        m["scenario.lane_speeds"] = {
            [](RunConfig& c, const std::string& k, const std::string& v) {
                c.scenario.lane_speeds = parse_list(k, v);
            },
            [](const RunConfig& c) { return list_to_string(c.scenario.lane_speeds); }};
        m["scenario.mmwave_los_range"] = {
            [](RunConfig& c, const std::string& k, const std::string& v) {
                c.scenario.mmwave_los_range = parse_double(k, v);
            },
            [](const RunConfig& c) { return fmt(c.scenario.mmwave_los_range); }};
        m["scenario.sub6_range"] = {
            [](RunConfig& c, const std::string& k, const std::string& v) {
                c.scenario.sub6_range = parse_double(k, v);
            },
            [](const RunConfig& c) { return fmt(c.scenario.sub6_range); }};
        m["scenario.seed"] = {
            [](RunConfig& c, const std::string& k, const std::string& v) {
                c.scenario.seed = static_cast<std::uint64_t>(parse_int(k, v));
                c.master_seed = c.scenario.seed;
            },
            [](const RunConfig& c) { return std::to_string(c.scenario.seed); }};

        m["sub6.beacon_period"] = {
            [](RunConfig& c, const std::string& k, const std::string& v) {
                c.sub6.beacon_period = ms_to_us(parse_double(k, v));
                c.assisted.beacon_period = c.sub6.beacon_period;
            },
            [](const RunConfig& c) { return fmt(us_to_ms(c.sub6.beacon_period)); }};
        m["sub6.data_rate"] = {
            [](RunConfig& c, const std::string& k, const std::string& v) {
                c.sub6.data_rate_mbps = parse_double(k, v);
            },
            [](const RunConfig& c) { return fmt(c.sub6.data_rate_mbps); }};
        m["sub6.base_beacon_bytes"] = {
            [](RunConfig& c, const std::string& k, const std::string& v) {
                c.sub6.base_beacon_bytes = static_cast<int>(parse_int(k, v));
            },
            [](const RunConfig& c) { return std::to_string(c.sub6.base_beacon_bytes); }};
        m["sub6.tx_power_dbm"] = {
            [](RunConfig& c, const std::string& k, const std::string& v) {
                c.sub6.tx_power_dbm = parse_double(k, v);
            },
            [](const RunConfig& c) { return fmt(c.sub6.tx_power_dbm); }};

        m["assisted.tx_dur"] = {
            [](RunConfig& c, const std::string& k, const std::string& v) {
                c.assisted.tx_dur = ms_to_us(parse_double(k, v));
            },
            [](const RunConfig& c) { return fmt(us_to_ms(c.assisted.tx_dur)); }};
        m["assisted.default_tx_dur"] = {
            [](RunConfig& c, const std::string& k, const std::string& v) {
                c.assisted.default_tx_dur = ms_to_us(parse_double(k, v));
            },
            [](const RunConfig& c) { return fmt(us_to_ms(c.assisted.default_tx_dur)); }};
        m["assisted.rts_retry_periods"] = {
            [](RunConfig& c, const std::string& k, const std::string& v) {
                c.assisted.rts_retry_periods = static_cast<int>(parse_int(k, v));
            },
            [](const RunConfig& c) { return std::to_string(c.assisted.rts_retry_periods); }};
        m["assisted.intent_expiry_periods"] = {
            [](RunConfig& c, const std::string& k, const std::string& v) {
                c.assisted.intent_expiry_periods = static_cast<int>(parse_int(k, v));
            },
            [](const RunConfig& c) { return std::to_string(c.assisted.intent_expiry_periods); }};

        m["ref80211ad.bhi_dur"] = {
            [](RunConfig& c, const std::string& k, const std::string& v) {
                c.ad.bhi_dur = ms_to_us(parse_double(k, v));
            },
            [](const RunConfig& c) { return fmt(us_to_ms(c.ad.bhi_dur)); }};
        m["ref80211ad.dti_dur"] = {
            [](RunConfig& c, const std::string& k, const std::string& v) {
                c.ad.dti_dur = ms_to_us(parse_double(k, v));
            },
            [](const RunConfig& c) { return fmt(us_to_ms(c.ad.dti_dur)); }};
        m["ref80211ad.slot_dur"] = {
            [](RunConfig& c, const std::string& k, const std::string& v) {
                c.ad.slot_dur = ms_to_us(parse_double(k, v));
            },
            [](const RunConfig& c) { return fmt(us_to_ms(c.ad.slot_dur)); }};
        m["ref80211ad.max_neighbors"] = {
            [](RunConfig& c, const std::string& k, const std::string& v) {
                c.ad.max_neighbors = static_cast<int>(parse_int(k, v));
            },
            [](const RunConfig& c) { return std::to_string(c.ad.max_neighbors); }};
        m["ref80211ad.control_bytes_per_neighbor"] = {
            [](RunConfig& c, const std::string& k, const std::string& v) {
                c.ad.control_bytes_per_neighbor = static_cast<int>(parse_int(k, v));
            },
            [](const RunConfig& c) { return std::to_string(c.ad.control_bytes_per_neighbor); }};
        m["ref80211ad.max_cycles"] = {
            [](RunConfig& c, const std::string& k, const std::string& v) {
                c.ad.max_cycles = static_cast<int>(parse_int(k, v));
            },
            [](const RunConfig& c) { return std::to_string(c.ad.max_cycles); }};

        m["run.mac"] = {
            [](RunConfig& c, const std::string&, const std::string& v) {
                c.mac = mac_from_string(v);
            },
            [](const RunConfig& c) { return to_string(c.mac); }};
        m["run.r_tx"] = {
            [](RunConfig& c, const std::string& k, const std::string& v) {
                c.r_tx = parse_double(k, v);
            },
            [](const RunConfig& c) { return fmt(c.r_tx); }};
        m["run.sim_duration"] = {
            [](RunConfig& c, const std::string& k, const std::string& v) {
                c.sim_duration = ms_to_us(parse_double(k, v));
            },
            [](const RunConfig& c) { return fmt(us_to_ms(c.sim_duration)); }};
        m["run.replications"] = {
            [](RunConfig& c, const std::string& k, const std::string& v) {
                c.replications = static_cast<int>(parse_int(k, v));
            },
            [](const RunConfig& c) { return std::to_string(c.replications); }};
        m["run.min_replications"] = {
            [](RunConfig& c, const std::string& k, const std::string& v) {
                c.min_replications = static_cast<int>(parse_int(k, v));
            },
            [](const RunConfig& c) { return std::to_string(c.min_replications); }};
        m["run.target_ci"] = {
            [](RunConfig& c, const std::string& k, const std::string& v) {
                c.target_ci = parse_double(k, v);
            },
            [](const RunConfig& c) { return fmt(c.target_ci); }};
        m["run.tx_activation"] = {
            [](RunConfig& c, const std::string&, const std::string& v) {
                c.activation = activation_policy_from_string(v);
            },
            [](const RunConfig& c) { return to_string(c.activation); }};
        m["run.poisson_mean_gap"] = {
            [](RunConfig& c, const std::string& k, const std::string& v) {
                c.poisson_mean_gap = ms_to_us(parse_double(k, v));
            },
            [](const RunConfig& c) { return fmt(us_to_ms(c.poisson_mean_gap)); }};
        m["run.mobility_step"] = {
            [](RunConfig& c, const std::string& k, const std::string& v) {
                c.mobility_step = ms_to_us(parse_double(k, v));
            },
            [](const RunConfig& c) { return fmt(us_to_ms(c.mobility_step)); }};
        m["run.cbr_window"] = {
            [](RunConfig& c, const std::string& k, const std::string& v) {
                c.cbr_window = ms_to_us(parse_double(k, v));
            },
            [](const RunConfig& c) { return fmt(us_to_ms(c.cbr_window)); }};
        return m;
    }();
    return s;
}

const char* kSections[] = {"scenario", "sub6", "assisted", "ref80211ad", "run"};

}  // namespace

std::vector<std::string> builtin_preset_names() {
    return {"paper-highway-125", "paper-highway-250"};
}

RunConfig builtin_preset(const std::string& name) {
    RunConfig cfg;  // defaults match paper-highway-125
    if (name == "paper-highway-125") {
        cfg.scenario.density = 125.0;
        cfg.scenario.mmwave_los_range = 28.36;  // calibrated: mean LOS degree 5.49
    } else if (name == "paper-highway-250") {
        cfg.scenario.density = 250.0;
        cfg.scenario.mmwave_los_range = 16.23;  // calibrated: mean LOS degree 5.47
    } else {
        throw std::invalid_argument("unknown preset: " + name);
    }
    // Retry bound for the reference MAC on the highway presets: transmitters
    // give up on a target after 8 cyclic intervals (~2.3 s).
    cfg.ad.max_cycles = 8;
    return cfg;
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            bool known = false;
            for (const char* s : kSections) known = known || section == s;
            if (!known)
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            ": unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty())
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": key outside any [section]");
        const std::string full = section + "." + key;
        const auto it = schema().find(full);
        if (it == schema().end())
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": unknown key '" + full + "'");
        it->second.set(cfg, full, value);
    }
    return cfg;
}

std::string config_to_text(const RunConfig& cfg) {
    std::ostringstream os;
    std::string current;
    for (const auto& [key, field] : schema()) {
        const auto dot = key.find('.');
        const std::string section = key.substr(0, dot);
        if (section != current) {
            if (!current.empty()) os << "\n";
            os << "[" << section << "]\n";
            current = section;
        }
        os << key.substr(dot + 1) << " = " << field.get(cfg) << "\n";
    }
    return os.str();
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("override must be section.key=value: " + assignment);
    const std::string key = trim(assignment.substr(0, eq));
    const std::string value = trim(assignment.substr(eq + 1));
    const auto it = schema().find(key);
    if (it == schema().end()) throw std::invalid_argument("unknown override key '" + key + "'");
    it->second.set(cfg, key, value);
}

RunConfig load_preset(const std::string& name_or_path) {
    namespace fs = std::filesystem;
    std::vector<fs::path> candidates;
    if (const char* dir = std::getenv("MACSIM_PRESET_DIR")) {
        candidates.push_back(fs::path(dir) / (name_or_path + ".conf"));
        candidates.push_back(fs::path(dir) / name_or_path);
    }
    candidates.push_back(fs::path("presets") / (name_or_path + ".conf"));
    candidates.push_back(fs::path(name_or_path));
    for (const auto& p : candidates) {
        if (fs::exists(p) && fs::is_regular_file(p)) {
            std::ifstream in(p);
            std::stringstream ss;
            ss << in.rdbuf();
            return parse_config_text(ss.str());
        }
    }
    return builtin_preset(name_or_path);
}

double mean_los_neighbors(const RunConfig& cfg, int seeds) {
    double total = 0.0;
    long count = 0;
    for (int s = 0; s < seeds; ++s) {
        Rng rng(derive_seed(cfg.master_seed, 1000 + static_cast<std::uint64_t>(s)));
        const auto state = generate_scenario(cfg.scenario, cfg.r_tx, cfg.sub6.beacon_period, rng);
        for (const auto& v : state.vehicles) {
            total += static_cast<double>(los_neighbors(state, v.id).size());
            ++count;
        }
    }
    return count > 0 ? total / static_cast<double>(count) : 0.0;
}

CalibrationResult calibrate_mmwave_range(RunConfig cfg, int seeds, double target,
                                         double tolerance) {
    double lo = 5.0, hi = 120.0;
    const auto eval = [&](double range) {
        cfg.scenario.mmwave_los_range = range;
        if (cfg.scenario.sub6_range < 2.0 * range) cfg.scenario.sub6_range = 2.0 * range;
        return mean_los_neighbors(cfg, seeds);
    };
    const double at_lo = eval(lo), at_hi = eval(hi);
    if (at_lo > target + tolerance / 2 || at_hi < target - tolerance / 2) {
        std::ostringstream os;
        os << "calibration bracket does not contain the target: mean(" << lo << " m)=" << at_lo
           << ", mean(" << hi << " m)=" << at_hi << ", target=" << target;
        throw std::runtime_error(os.str());
    }
    CalibrationResult result;
    for (int it = 0; it < 60; ++it) {
        const double mid = (lo + hi) / 2.0;
        const double mean = eval(mid);
        result.range_m = mid;
        result.mean_neighbors = mean;
        result.iterations = it + 1;
        if (std::abs(mean - target) <= tolerance / 2) return result;
        if (mean < target)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-3) break;
    }
    if (std::abs(result.mean_neighbors - target) <= tolerance) return result;
    throw std::runtime_error("calibration failed to converge");
}

}  // namespace macsim
