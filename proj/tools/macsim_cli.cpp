#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "macsim/golden.hpp"
#include "macsim/metrics.hpp"
#include "macsim/presets.hpp"
#include "macsim/runner.hpp"

namespace fs = std::filesystem;
using namespace macsim;

namespace {

struct CommonOpts {
    std::string preset = "paper-highway-125";
    std::string mac;
    double rtx = -1.0;
    std::int64_t seed = -1;
    int replications = -1;
    double target_ci = -1.0;
    std::string out;
    std::vector<std::string> formats = {"json"};
    long max_trace_events = 100000;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--preset", o.preset, "Preset name or config file path");
    cmd->add_option("--mac", o.mac, "MAC under test: assisted | ref-ad");
    cmd->add_option("--rtx", o.rtx, "Fraction of mmWave transmitters, e.g. 0.15");
    cmd->add_option("--seed", o.seed, "Master seed");
    cmd->add_option("--replications", o.replications, "Replication cap");
    cmd->add_option("--target-ci", o.target_ci, "Relative 95% CI margin stop target");
    cmd->add_option("--out", o.out, "Output directory");
    cmd->add_option("--format", o.formats, "Outputs: csv, json, ndjson-trace")->delimiter(',');
    cmd->add_option("--max-trace-events", o.max_trace_events, "Cap on ndjson trace records");
    cmd->add_option("overrides", o.overrides, "section.key=value config overrides");
}

RunConfig build_config(const CommonOpts& o) {
    RunConfig cfg = load_preset(o.preset);
    for (const auto& ov : o.overrides) apply_override(cfg, ov);
    if (!o.mac.empty()) cfg.mac = mac_from_string(o.mac);
    if (o.rtx >= 0.0) cfg.r_tx = o.rtx;
    if (o.seed >= 0) {
        cfg.master_seed = static_cast<std::uint64_t>(o.seed);
        cfg.scenario.seed = cfg.master_seed;
    }
    if (o.replications > 0) cfg.replications = o.replications;
    if (o.target_ci > 0.0) cfg.target_ci = o.target_ci;
    return cfg;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

bool wants(const CommonOpts& o, const std::string& fmt) {
    return std::find(o.formats.begin(), o.formats.end(), fmt) != o.formats.end();
}

void emit_outputs(const CommonOpts& o, const RunConfig& cfg, const MultiRunResult& result,
                  const std::string& stem) {
    if (o.out.empty()) return;
    fs::create_directories(o.out);
    const fs::path dir(o.out);
    if (wants(o, "json")) write_file(dir / (stem + ".json"), metrics_to_json(result.report));
    if (wants(o, "csv")) {
        std::ostringstream os;
        os << metrics_csv_header() << "\n";
        for (const auto& m : result.report.per_replication) os << metrics_csv_row(m) << "\n";
        write_file(dir / (stem + ".csv"), os.str());
    }
    if (result.first_artifacts) {
        write_file(dir / (stem + "_ledger.csv"), reservation_ledger_csv(*result.first_artifacts));
        write_file(dir / (stem + "_beacons.csv"), beacon_log_csv(*result.first_artifacts));
    }
    if (wants(o, "ndjson-trace"))
        write_file(dir / (stem + "_trace.ndjson"), event_trace_ndjson(cfg, o.max_trace_events));
}

void print_summary(const MetricsReport& r) {
    std::cout << "mac=" << r.mac << " r_tx=" << r.r_tx << " replications=" << r.replications
              << "\n  scheduled_ratio     " << r.scheduled_ratio.mean << " +/- "
              << r.scheduled_ratio.margin << "\n  delay_to_1st        " << r.delay_to_first_ms.mean
              << " ms +/- " << r.delay_to_first_ms.margin << "\n  round_overhead      "
              << r.mean_round_overhead_bytes.mean << " B (per neighbor "
              << r.per_neighbor_overhead_bytes << " B)\n  control_time        "
              << r.control_time_fraction << "\n  sharing k=0         " << r.sharing_histogram[0]
              << "\n  cbr_delta           " << r.cbr_delta_relative.mean << "\n  conflicts           "
              << r.conflicts << "\n";
}

int cmd_run(const CommonOpts& o) {
    const RunConfig cfg = build_config(o);
    const MultiRunResult result = run_replicated(cfg, /*keep_first_artifacts=*/!o.out.empty());
    print_summary(result.report);
    std::cout << "achieved 95% CI margin (delay-to-1st): " << result.achieved_ci << "\n";
    emit_outputs(o, cfg, result, "run");
    return 0;
}

int cmd_sweep(const CommonOpts& o, const std::vector<double>& rtx_list, bool both_macs) {
    std::vector<std::string> macs;
    if (both_macs || o.mac.empty())
        macs = {"assisted", "ref-ad"};
    else
        macs = {o.mac};
    const std::vector<double> ratios =
        rtx_list.empty() ? std::vector<double>{0.15, 0.20, 0.25, 0.30, 0.35, 0.40} : rtx_list;

    std::ostringstream table, summary;
    table << metrics_csv_header() << "\n";
    summary << "mac,r_tx,replications,scheduled_ratio,scheduled_ratio_ci95,delay1_ms,"
               "delay1_ms_ci95,round_overhead_bytes,control_time_fraction,share0,share1,share2,"
               "share3,share4plus,cbr_delta_relative,conflicts\n";
    std::vector<MetricsReport> reports;
    for (const auto& mac : macs) {
        for (double rtx : ratios) {
            CommonOpts cell = o;
            cell.mac = mac;
            cell.rtx = rtx;
            const RunConfig cfg = build_config(cell);
            try {
                MultiRunResult result = run_replicated(cfg);
                for (const auto& m : result.report.per_replication)
                    table << metrics_csv_row(m) << "\n";
                const auto& r = result.report;
                summary << r.mac << ',' << r.r_tx << ',' << r.replications << ','
                        << r.scheduled_ratio.mean << ',' << r.scheduled_ratio.margin << ','
                        << r.delay_to_first_ms.mean << ',' << r.delay_to_first_ms.margin << ','
                        << r.mean_round_overhead_bytes.mean << ',' << r.control_time_fraction;
                for (double x : r.sharing_histogram) summary << ',' << x;
                summary << ',' << r.cbr_delta_relative.mean << ',' << r.conflicts << "\n";
                print_summary(result.report);
                reports.push_back(std::move(result.report));
            } catch (const std::exception& e) {
                std::cerr << "sweep cell failed: mac=" << mac << " r_tx=" << rtx
                          << " master_seed=" << cfg.master_seed << ": " << e.what() << "\n";
                return 1;
            }
        }
    }
    if (!o.out.empty()) {
        fs::create_directories(o.out);
        write_file(fs::path(o.out) / "sweep.csv", table.str());
        write_file(fs::path(o.out) / "sweep_summary.csv", summary.str());
        std::ostringstream js;
        js << "[\n";
        for (std::size_t i = 0; i < reports.size(); ++i) {
            js << metrics_to_json(reports[i]);
            if (i + 1 < reports.size()) js << ",";
            js << "\n";
        }
        js << "]\n";
        write_file(fs::path(o.out) / "sweep.json", js.str());
    }
    return 0;
}

int cmd_golden(const std::string& name, const std::string& out) {
    const GoldenOutcome outcome = run_golden(name);
    if (outcome.pass) {
        std::cout << "golden " << name << ": PASS\n";
    } else {
        std::cout << "golden " << name << ": FAIL\n" << outcome.diff;
    }
    if (!out.empty()) {
        fs::create_directories(out);
        const RunConfig cfg = name == "fig2" ? golden_fig2_config() : golden_fig3_config();
        Engine engine(cfg);
        const RunArtifacts artifacts = engine.run_one(1);
        write_file(fs::path(out) / ("golden_" + name + "_ledger.csv"),
                   reservation_ledger_csv(artifacts));
    }
    return outcome.pass ? 0 : 1;
}

int cmd_calibrate(const CommonOpts& o, int seeds) {
    RunConfig cfg = build_config(o);
    const CalibrationResult result = calibrate_mmwave_range(cfg, seeds);
    std::cout << "calibrated mmwave_los_range = " << result.range_m
              << " m (mean LOS neighbors " << result.mean_neighbors << ", "
              << result.iterations << " iterations)\n";
    cfg.scenario.mmwave_los_range = result.range_m;
    const std::string path = o.out.empty() ? (o.preset + ".conf") : o.out;
    fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    write_file(p, config_to_text(cfg));
    std::cout << "wrote " << path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sub-6GHz assisted mmWave V2V MAC simulator"};
    app.require_subcommand(1);

    CommonOpts run_opts, sweep_opts, cal_opts;
    std::vector<double> sweep_rtx;
    bool sweep_both = false;
    std::string golden_name, golden_out;
    int cal_seeds = 12;

    auto* run_cmd = app.add_subcommand("run", "Run one (mac, r_tx) configuration");
    add_common(run_cmd, run_opts);

    auto* sweep_cmd = app.add_subcommand("sweep", "Sweep MACs over transmitter ratios");
    add_common(sweep_cmd, sweep_opts);
    sweep_cmd->add_option("--rtx-list", sweep_rtx, "Ratios to sweep")->delimiter(',');
    sweep_cmd->add_flag("--both", sweep_both, "Sweep both MACs (default when --mac unset)");

    auto* golden_cmd = app.add_subcommand("golden", "Replay a pinned scenario and diff");
    golden_cmd->add_option("name", golden_name, "fig2 | fig3")->required();
    golden_cmd->add_option("--out", golden_out, "Directory for the replay ledger CSV");

    auto* cal_cmd = app.add_subcommand("calibrate", "Calibrate mmwave_los_range for a preset");
    add_common(cal_cmd, cal_opts);
    cal_cmd->add_option("--seeds", cal_seeds, "Seeds averaged per probe");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return cmd_run(run_opts);
        if (sweep_cmd->parsed()) return cmd_sweep(sweep_opts, sweep_rtx, sweep_both);
        if (golden_cmd->parsed()) return cmd_golden(golden_name, golden_out);
        if (cal_cmd->parsed()) return cmd_calibrate(cal_opts, cal_seeds);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
