#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "macsim/golden.hpp"
#include "macsim/metrics.hpp"
#include "macsim/presets.hpp"
#include "macsim/runner.hpp"

namespace py = pybind11;
using namespace macsim;

namespace {

RunConfig config_from(const std::string& preset, const std::vector<std::string>& overrides) {
    RunConfig cfg = load_preset(preset);
    for (const auto& ov : overrides) apply_override(cfg, ov);
    return cfg;
}

py::dict report_to_dict(const MetricsReport& r) {
    py::dict d;
    d["mac"] = r.mac;
    d["r_tx"] = r.r_tx;
    d["replications"] = r.replications;
    d["scheduled_ratio"] = r.scheduled_ratio.mean;
    d["scheduled_ratio_ci95"] = r.scheduled_ratio.margin;
    d["mean_round_overhead_bytes"] = r.mean_round_overhead_bytes.mean;
    d["per_neighbor_overhead_bytes"] = r.per_neighbor_overhead_bytes;
    d["overhead_reduction_per_round"] = r.overhead_reduction_per_round;
    d["overhead_reduction_per_neighbor"] = r.overhead_reduction_per_neighbor;
    d["control_time_fraction"] = r.control_time_fraction;
    d["delay_to_first_ms"] = r.delay_to_first_ms.mean;
    d["delay_to_first_ms_ci95"] = r.delay_to_first_ms.margin;
    py::dict delays;
    for (int n = 0; n < 5; ++n) {
        py::dict e;
        e["mean"] = r.delay_to_nth[n].mean;
        e["p10"] = r.delay_to_nth[n].p10;
        e["p90"] = r.delay_to_nth[n].p90;
        e["count"] = r.delay_to_nth[n].count;
        delays[py::int_(n + 1)] = e;
    }
    d["delay_to_nth_ms"] = delays;
    py::list sharing;
    for (double x : r.sharing_histogram) sharing.append(x);
    d["sharing_histogram"] = sharing;
    d["cbr_delta_relative"] = r.cbr_delta_relative.mean;
    d["conflicts"] = r.conflicts;
    return d;
}

}  // namespace

PYBIND11_MODULE(_macsim, m) {
    m.doc() = "Sub-6GHz assisted mmWave V2V MAC simulator";

    py::class_<Reservation>(m, "Reservation")
        .def_readonly("tx", &Reservation::tx)
        .def_readonly("rx", &Reservation::rx)
        .def_readonly("start_us", &Reservation::start)
        .def_readonly("end_us", &Reservation::end)
        .def("__repr__", [](const Reservation& r) {
            return "Reservation(tx=" + std::to_string(r.tx) + ", rx=" + std::to_string(r.rx) +
                   ", start_us=" + std::to_string(r.start) + ", end_us=" + std::to_string(r.end) +
                   ")";
        });

    m.def("preset_names", &builtin_preset_names, "Built-in preset names");

    m.def(
        "run",
        [](const std::string& preset, const std::string& mac, double r_tx, std::uint64_t seed,
           int replications, const std::vector<std::string>& overrides) {
            RunConfig cfg = config_from(preset, overrides);
            if (!mac.empty()) cfg.mac = mac_from_string(mac);
            if (r_tx > 0.0) cfg.r_tx = r_tx;
            cfg.master_seed = seed;
            if (replications > 0) {
                cfg.replications = replications;
                cfg.min_replications = std::min(cfg.min_replications, replications);
            }
            const MultiRunResult result = run_replicated(cfg);
            return report_to_dict(result.report);
        },
        py::arg("preset") = "paper-highway-125", py::arg("mac") = "", py::arg("r_tx") = -1.0,
        py::arg("seed") = 1, py::arg("replications") = -1,
        py::arg("overrides") = std::vector<std::string>{},
        "Run one configuration and return the aggregated metrics report");

    m.def(
        "run_ledger",
        [](const std::string& preset, const std::string& mac, double r_tx, std::uint64_t seed,
           const std::vector<std::string>& overrides) {
            RunConfig cfg = config_from(preset, overrides);
            if (!mac.empty()) cfg.mac = mac_from_string(mac);
            if (r_tx > 0.0) cfg.r_tx = r_tx;
            cfg.master_seed = seed;
            Engine engine(cfg);
            const auto artifacts = engine.run_one(derive_seed(seed, 0));
            std::vector<Reservation> out;
            for (const auto& lr : artifacts.ledger.reservations()) out.push_back(lr.res);
            return out;
        },
        py::arg("preset") = "paper-highway-125", py::arg("mac") = "", py::arg("r_tx") = -1.0,
        py::arg("seed") = 1, py::arg("overrides") = std::vector<std::string>{},
        "Run a single replication and return its committed reservations");

    m.def(
        "golden",
        [](const std::string& name) {
            const GoldenOutcome outcome = run_golden(name);
            py::dict d;
            d["pass"] = outcome.pass;
            d["diff"] = outcome.diff;
            return d;
        },
        py::arg("name"), "Replay a pinned scenario (fig2 | fig3) and diff the ledger");

    m.def(
        "golden_fig2_expected",
        []() { return golden_fig2_expected(); },
        "The five pinned reservations of the fig2 replay");

    m.def(
        "mean_los_neighbors",
        [](const std::string& preset, int seeds) {
            return mean_los_neighbors(load_preset(preset), seeds);
        },
        py::arg("preset") = "paper-highway-125", py::arg("seeds") = 10,
        "Population mean LOS-neighbor count at t=0");

    m.def(
        "earliest_start",
        [](vehicle_id tx, vehicle_id rx, std::int64_t ref_time_us, std::int64_t dur_us,
           const std::vector<std::tuple<vehicle_id, vehicle_id, std::int64_t, std::int64_t>>&
               booked) {
            ReservationBook book(rx);
            for (const auto& [btx, brx, s, e] : booked) book.insert({btx, brx, s, e});
            return earliest_start(tx, rx, ref_time_us, dur_us, book);
        },
        py::arg("tx"), py::arg("rx"), py::arg("ref_time_us"), py::arg("dur_us"),
        py::arg("booked") = std::vector<std::tuple<vehicle_id, vehicle_id, std::int64_t,
                                                   std::int64_t>>{},
        "Earliest conflict-free start given (tx, rx, start_us, end_us) bookings");
}
