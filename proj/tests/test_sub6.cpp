#include "doctest.h"

#include "macsim/sub6.hpp"

using namespace macsim;

namespace {

Beacon plain_beacon(vehicle_id sender, time_us t) {
    Beacon b;
    b.sender = sender;
    b.tx_time = t;
    return b;
}

}  // namespace

TEST_CASE("next_beacon_time") {
    const time_us period = 100 * kUsPerMs;
    CHECK(next_beacon_time(10 * kUsPerMs, period, 0) == 10 * kUsPerMs);
    CHECK(next_beacon_time(10 * kUsPerMs, period, 10 * kUsPerMs) == 10 * kUsPerMs);
    CHECK(next_beacon_time(70 * kUsPerMs, period, 121 * kUsPerMs) == 170 * kUsPerMs);
    // Beacon instants form an exact arithmetic progression.
    time_us t = next_beacon_time(37 * kUsPerMs, period, 0);
    for (int i = 0; i < 10; ++i) {
        const time_us next = next_beacon_time(37 * kUsPerMs, period, t + 1);
        CHECK(next == t + period);
        t = next;
    }
}

TEST_CASE("beacon_bytes: base plus 8 per extension entry") {
    Sub6Config cfg;
    Beacon b = plain_beacon(0, 0);
    CHECK(beacon_bytes(b, cfg) == 300);

    RtsExtension rts;
    for (int i = 0; i < 4; ++i) rts.entries.push_back({i + 1, 50 * kUsPerMs});
    b.extension = rts;
    CHECK(beacon_bytes(b, cfg) == 332);  // base + 4*8

    CtsExtension cts;
    cts.entries.push_back({1, 0});
    cts.entries.push_back({2, 30 * kUsPerMs});
    b.extension = cts;
    CHECK(beacon_bytes(b, cfg) == 316);
}

TEST_CASE("beacon_bytes is strictly increasing in entry count") {
    Sub6Config cfg;
    Beacon b = plain_beacon(0, 0);
    int prev = beacon_bytes(b, cfg);
    RtsExtension rts;
    for (int i = 0; i < 12; ++i) {
        rts.entries.push_back({i + 1, 50 * kUsPerMs});
        b.extension = rts;
        const int bytes = beacon_bytes(b, cfg);
        CHECK(bytes > prev);
        prev = bytes;
    }
}

TEST_CASE("scheduling-extension bytes at 5.5 mean neighbors sit near 100") {
    // One RTS entry plus one CTS entry per neighbor: 16 bytes each.
    const double per_neighbor = 2.0 * kBytesPerExtensionEntry;
    CHECK(5.5 * per_neighbor == doctest::Approx(88.0));
}

TEST_CASE("airtime of a 332-byte beacon at 6 Mbps") {
    Sub6Config cfg;
    CHECK(airtime_us(332, cfg) == doctest::Approx(442.6667).epsilon(1e-4));
}

TEST_CASE("deliver_beacon: exactly the in-range vehicles") {
    ScenarioState s;
    s.road_length = 4000.0;
    s.sub6_range = 300.0;
    VehicleState v0, v1, v2;
    v0.id = 0; v0.longitudinal_pos = 0.0;
    v1.id = 1; v1.longitudinal_pos = 200.0;
    v2.id = 2; v2.longitudinal_pos = 600.0;
    s.vehicles = {v0, v1, v2};

    const auto got = deliver_beacon(plain_beacon(0, 0), s);
    REQUIRE(got.size() == 1);
    CHECK(got[0] == 1);

    ScenarioState lonely = s;
    lonely.vehicles[1].longitudinal_pos = 1000.0;
    CHECK(deliver_beacon(plain_beacon(0, 0), lonely).empty());
}

TEST_CASE("cbr: single beacon in a 100 ms window") {
    ScenarioState s;
    s.road_length = 4000.0;
    s.sub6_range = 300.0;
    VehicleState v0, v1;
    v0.id = 0; v0.longitudinal_pos = 0.0;
    v1.id = 1; v1.longitudinal_pos = 50.0;
    s.vehicles = {v0, v1};

    Sub6Config cfg;
    std::vector<BeaconRecord> log;
    CHECK(cbr(1, 0, 100 * kUsPerMs, log, s, cfg, false) == 0.0);

    BeaconRecord rec;
    rec.time = 10 * kUsPerMs;
    rec.sender = 0;
    rec.bytes = 332;
    rec.base_bytes = 300;
    log.push_back(rec);
    CHECK(cbr(1, 0, 100 * kUsPerMs, log, s, cfg, false) ==
          doctest::Approx(0.004427).epsilon(1e-3));
    // Stripped to the base size the channel is busy for less time.
    CHECK(cbr(1, 0, 100 * kUsPerMs, log, s, cfg, true) == doctest::Approx(0.004).epsilon(1e-6));
}

TEST_CASE("cbr counts overlapping airtime once") {
    ScenarioState s;
    s.road_length = 4000.0;
    s.sub6_range = 300.0;
    VehicleState v0, v1, v2;
    v0.id = 0; v0.longitudinal_pos = 0.0;
    v1.id = 1; v1.longitudinal_pos = 10.0;
    v2.id = 2; v2.longitudinal_pos = 20.0;
    s.vehicles = {v0, v1, v2};

    Sub6Config cfg;
    std::vector<BeaconRecord> log;
    BeaconRecord a, b;
    a.time = 0; a.sender = 0; a.bytes = 300; a.base_bytes = 300;
    b.time = 0; b.sender = 1; b.bytes = 300; b.base_bytes = 300;  // same instant
    log = {a, b};
    // Two fully overlapping 400 us transmissions count as one busy interval.
    CHECK(cbr(2, 0, 100 * kUsPerMs, log, s, cfg, false) == doctest::Approx(0.004).epsilon(1e-6));
}

TEST_CASE("cbr is monotone in added extension bytes") {
    ScenarioState s;
    s.road_length = 4000.0;
    s.sub6_range = 300.0;
    VehicleState v0, v1;
    v0.id = 0; v0.longitudinal_pos = 0.0;
    v1.id = 1; v1.longitudinal_pos = 50.0;
    s.vehicles = {v0, v1};

    Sub6Config cfg;
    std::vector<BeaconRecord> log;
    for (int i = 0; i < 5; ++i) {
        BeaconRecord rec;
        rec.time = i * 20 * kUsPerMs;
        rec.sender = 0;
        rec.base_bytes = 300;
        rec.bytes = 300 + 8 * i;
        log.push_back(rec);
    }
    const double with_ext = cbr(1, 0, 100 * kUsPerMs, log, s, cfg, false);
    const double base = cbr(1, 0, 100 * kUsPerMs, log, s, cfg, true);
    CHECK(with_ext > base);
}
