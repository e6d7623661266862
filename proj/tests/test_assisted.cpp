#include "doctest.h"

#include "macsim/assisted.hpp"

using namespace macsim;

namespace {

constexpr time_us MS = kUsPerMs;

Reservation res(vehicle_id tx, vehicle_id rx, time_us start_ms, time_us end_ms) {
    return {tx, rx, start_ms * MS, end_ms * MS};
}

// Ids mirroring the running example: A=0, B=1, D=2, E=3, F=4.
constexpr vehicle_id A = 0, B = 1, D = 2, E = 3, F = 4;

Beacon cts_beacon(vehicle_id sender, time_us t, std::vector<CtsEntry> entries) {
    Beacon b;
    b.sender = sender;
    b.tx_time = t;
    CtsExtension ext;
    ext.entries = std::move(entries);
    b.extension = ext;
    return b;
}

Beacon rts_beacon(vehicle_id sender, time_us t, std::vector<RtsEntry> entries) {
    Beacon b;
    b.sender = sender;
    b.tx_time = t;
    RtsExtension ext;
    ext.entries = std::move(entries);
    b.extension = ext;
    return b;
}

}  // namespace

TEST_CASE("earliest_start: delay 30 behind an A->B reservation") {
    ReservationBook book(E);
    REQUIRE(book.insert(res(A, B, 20, 70)));
    const time_us s = earliest_start(A, E, 40 * MS, 50 * MS, book);
    CHECK(s == 70 * MS);
    CHECK(s - 40 * MS == 30 * MS);
}

TEST_CASE("earliest_start: delay 50 once A is booked back-to-back") {
    ReservationBook book(F);
    REQUIRE(book.insert(res(A, B, 20, 70)));
    REQUIRE(book.insert(res(A, E, 70, 120)));
    REQUIRE(book.insert(res(D, F, 70, 120)));
    const time_us s = earliest_start(A, F, 70 * MS, 50 * MS, book);
    CHECK(s == 120 * MS);
    CHECK(s - 70 * MS == 50 * MS);
}

TEST_CASE("earliest_start: empty book starts immediately") {
    ReservationBook book(B);
    CHECK(earliest_start(A, B, 20 * MS, 50 * MS, book) == 20 * MS);
}

TEST_CASE("book stays conflict-free and idempotent") {
    ReservationBook book(A);
    CHECK(book.insert(res(A, B, 0, 50)));
    CHECK(book.insert(res(A, B, 0, 50)));  // duplicate is a no-op
    CHECK(book.known().size() == 1);
    CHECK_FALSE(book.insert(res(A, E, 40, 90)));  // A is busy until 50
    CHECK(book.insert(res(D, F, 0, 50)));         // disjoint pair may overlap in time
}

TEST_CASE("compose: RTS goes out on the first beacon after activation") {
    AssistedVehicleState st(A);
    AssistedConfig cfg;
    AssistedCounters counters;

    TxIntent intent;
    intent.owner = A;
    intent.activation_time = 0;
    for (vehicle_id u : {B, D, E, F}) intent.targets.push_back({u, cfg.tx_dur, -1, false});
    intent.targets_pending = false;
    st.intent = intent;

    const auto composed = compose_beacon_extension(st, A, 10 * MS, cfg, counters);
    REQUIRE(std::holds_alternative<RtsExtension>(composed.extension));
    const auto& rts = std::get<RtsExtension>(composed.extension);
    REQUIRE(rts.entries.size() == 4);
    for (const auto& e : rts.entries) CHECK(e.tx_dur == 50 * MS);

    // Not re-announced on the next beacon while replies are still timely.
    const auto next = compose_beacon_extension(st, A, 110 * MS, cfg, counters);
    CHECK(std::holds_alternative<std::monostate>(next.extension));
}

TEST_CASE("compose: no pending RTSs means no extension") {
    AssistedVehicleState st(B);
    AssistedConfig cfg;
    AssistedCounters counters;
    const auto composed = compose_beacon_extension(st, B, 20 * MS, cfg, counters);
    CHECK(std::holds_alternative<std::monostate>(composed.extension));
}

TEST_CASE("compose: own RTS defers CTS replies to the next beacon") {
    AssistedVehicleState st(D);
    AssistedConfig cfg;
    AssistedCounters counters;

    st.pending.push_back({A, 50 * MS, 10 * MS});
    TxIntent intent;
    intent.owner = D;
    intent.activation_time = 45 * MS;
    intent.targets.push_back({F, cfg.tx_dur, -1, false});
    intent.targets_pending = false;
    st.intent = intent;

    const auto at50 = compose_beacon_extension(st, D, 50 * MS, cfg, counters);
    CHECK(std::holds_alternative<RtsExtension>(at50.extension));
    CHECK(st.pending.size() == 1);
    CHECK(counters.deferred_cts == 1);

    // The postponed reply happens at the next beacon, delay referenced there.
    st.book.insert(res(A, B, 20, 70));
    st.book.insert(res(A, E, 70, 120));
    st.book.insert(res(A, F, 120, 170));
    st.book.insert(res(D, F, 70, 120));
    const auto at150 = compose_beacon_extension(st, D, 150 * MS, cfg, counters);
    REQUIRE(std::holds_alternative<CtsExtension>(at150.extension));
    const auto& cts = std::get<CtsExtension>(at150.extension);
    REQUIRE(cts.entries.size() == 1);
    CHECK(cts.entries[0].transmitter == A);
    CHECK(cts.entries[0].delay == 20 * MS);  // A->D runs [170, 220)
    CHECK(st.pending.empty());
}

TEST_CASE("compose: one beacon answers several pending RTSs oldest-first") {
    AssistedVehicleState st(F);
    AssistedConfig cfg;
    AssistedCounters counters;

    st.pending.push_back({D, 50 * MS, 50 * MS});
    st.pending.push_back({A, 50 * MS, 10 * MS});
    st.book.insert(res(A, B, 20, 70));
    st.book.insert(res(A, E, 70, 120));

    const auto composed = compose_beacon_extension(st, F, 70 * MS, cfg, counters);
    REQUIRE(std::holds_alternative<CtsExtension>(composed.extension));
    const auto& cts = std::get<CtsExtension>(composed.extension);
    REQUIRE(cts.entries.size() == 2);
    CHECK(cts.entries[0].transmitter == A);  // received at 10, before D's at 50
    CHECK(cts.entries[0].delay == 50 * MS);
    CHECK(cts.entries[1].transmitter == D);
    CHECK(cts.entries[1].delay == 0);
    // Each grant constrained the next: both now sit in F's book.
    REQUIRE(composed.implied.size() == 2);
    CHECK(composed.implied[0] == res(A, F, 120, 170));
    CHECK(composed.implied[1] == res(D, F, 70, 120));
}

TEST_CASE("on_receive: CTS commits the reservation at cts_time + delay") {
    AssistedVehicleState st(A);
    AssistedConfig cfg;
    AssistedCounters counters;

    TxIntent intent;
    intent.owner = A;
    intent.activation_time = 0;
    intent.targets.push_back({B, 50 * MS, 10 * MS, false});
    intent.targets_pending = false;
    st.intent = intent;

    const auto committed =
        on_receive_extension(st, A, cts_beacon(B, 20 * MS, {{A, 0}}), cfg, counters);
    REQUIRE(committed.size() == 1);
    CHECK(committed[0] == res(A, B, 20, 70));
    CHECK(st.intent->targets[0].answered);

    // A duplicate CTS must not double-book.
    const auto dup = on_receive_extension(st, A, cts_beacon(B, 20 * MS, {{A, 0}}), cfg, counters);
    CHECK(dup.empty());
    CHECK(counters.stale_cts == 1);
}

TEST_CASE("on_receive: overheard CTS uses the cached RTS duration") {
    AssistedVehicleState st(E);
    AssistedConfig cfg;
    AssistedCounters counters;

    // E heard A's four-neighbor RTS at t=10.
    on_receive_extension(
        st, E,
        rts_beacon(A, 10 * MS, {{B, 50 * MS}, {D, 50 * MS}, {E, 50 * MS}, {F, 50 * MS}}), cfg,
        counters);
    REQUIRE(st.pending.size() == 1);  // E itself is addressed

    // Overhearing B's CTS at t=20 yields A->B [20, 70) in E's book.
    on_receive_extension(st, E, cts_beacon(B, 20 * MS, {{A, 0}}), cfg, counters);
    bool found = false;
    for (const auto& r : st.book.known()) found = found || r == res(A, B, 20, 70);
    CHECK(found);
    CHECK(counters.default_dur_overhears == 0);

    // That knowledge produces E's delay of 30 at its own beacon.
    const auto composed = compose_beacon_extension(st, E, 40 * MS, cfg, counters);
    REQUIRE(std::holds_alternative<CtsExtension>(composed.extension));
    CHECK(std::get<CtsExtension>(composed.extension).entries[0].delay == 30 * MS);
}

TEST_CASE("on_receive: overheard CTS without a cached RTS falls back to the default") {
    AssistedVehicleState st(B);
    AssistedConfig cfg;
    AssistedCounters counters;

    on_receive_extension(st, B, cts_beacon(F, 70 * MS, {{D, 0}}), cfg, counters);
    REQUIRE(st.book.known().size() == 1);
    CHECK(st.book.known()[0] == res(D, F, 70, 120));  // default 50 ms duration
    CHECK(counters.default_dur_overhears == 1);
}

TEST_CASE("on_receive: beacon without extension changes nothing") {
    AssistedVehicleState st(B);
    AssistedConfig cfg;
    AssistedCounters counters;
    Beacon plain;
    plain.sender = A;
    plain.tx_time = 10 * MS;
    on_receive_extension(st, B, plain, cfg, counters);
    CHECK(st.book.known().empty());
    CHECK(st.pending.empty());
}
