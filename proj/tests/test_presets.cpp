#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "macsim/presets.hpp"

using namespace macsim;

TEST_CASE("builtin presets load and validate") {
    for (const auto& name : builtin_preset_names()) {
        const RunConfig cfg = builtin_preset(name);
        CHECK_NOTHROW(cfg.validate());
    }
    CHECK_THROWS_AS(builtin_preset("nope"), std::invalid_argument);
}

TEST_CASE("config round-trips through text") {
    RunConfig cfg = builtin_preset("paper-highway-125");
    cfg.r_tx = 0.35;
    cfg.scenario.density = 200.0;
    cfg.ad.max_cycles = 9;
    const std::string text = config_to_text(cfg);
    const RunConfig back = parse_config_text(text);
    CHECK(back.r_tx == cfg.r_tx);
    CHECK(back.scenario.density == cfg.scenario.density);
    CHECK(back.ad.max_cycles == cfg.ad.max_cycles);
    CHECK(back.sub6.beacon_period == cfg.sub6.beacon_period);
    CHECK(back.scenario.lane_speeds == cfg.scenario.lane_speeds);
}

TEST_CASE("unknown keys and sections are rejected") {
    CHECK_THROWS_AS(parse_config_text("[scenario]\nroad_lenght = 4000\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("[nope]\nx = 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("road_length = 4000\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("[scenario]\ndensity = fast\n"), std::invalid_argument);
}

TEST_CASE("overrides are type-checked") {
    RunConfig cfg = builtin_preset("paper-highway-125");
    apply_override(cfg, "run.r_tx=0.4");
    CHECK(cfg.r_tx == 0.4);
    apply_override(cfg, "scenario.lane_speeds=30,30,30,30");
    CHECK(cfg.scenario.lane_speeds == std::vector<double>{30, 30, 30, 30});
    CHECK_THROWS_AS(apply_override(cfg, "run.bogus=1"), std::invalid_argument);
    CHECK_THROWS_AS(apply_override(cfg, "run.r_tx=abc"), std::invalid_argument);
}

TEST_CASE("preset files are found via MACSIM_PRESET_DIR") {
    const char* dir = "/tmp/macsim_preset_test";
    std::filesystem::create_directories(dir);
    RunConfig cfg = builtin_preset("paper-highway-125");
    cfg.r_tx = 0.33;
    std::ofstream(std::string(dir) + "/custom.conf") << config_to_text(cfg);
    setenv("MACSIM_PRESET_DIR", dir, 1);
    const RunConfig loaded = load_preset("custom");
    unsetenv("MACSIM_PRESET_DIR");
    CHECK(loaded.r_tx == 0.33);
}

TEST_CASE("calibration: the shipped 125 preset hits 5.5 +/- 0.5 LOS neighbors") {
    const RunConfig cfg = builtin_preset("paper-highway-125");
    const double mean = mean_los_neighbors(cfg, 10);
    CHECK(mean > 5.0);
    CHECK(mean < 6.0);
}

TEST_CASE("calibration: denser traffic calibrates to a smaller range") {
    const RunConfig c125 = builtin_preset("paper-highway-125");
    const RunConfig c250 = builtin_preset("paper-highway-250");
    CHECK(c250.scenario.mmwave_los_range < c125.scenario.mmwave_los_range);
    const double mean250 = mean_los_neighbors(c250, 6);
    CHECK(mean250 > 5.0);
    CHECK(mean250 < 6.0);
}
