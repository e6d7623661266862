#pragma once

#include <cstdint>

namespace macsim {

// All simulation time is integer microseconds. The 802.11ad control interval
// (35.84 ms) and every other quantity used by the protocols are exact in us.
using time_us = std::int64_t;
using vehicle_id = std::int32_t;

constexpr time_us kUsPerMs = 1000;

constexpr time_us ms_to_us(double ms) {
    return static_cast<time_us>(ms * 1000.0 + (ms >= 0 ? 0.5 : -0.5));
}

constexpr double us_to_ms(time_us t) { return static_cast<double>(t) / 1000.0; }

constexpr double us_to_s(time_us t) { return static_cast<double>(t) / 1e6; }

/// Half-open interval [start, end) in microseconds.
struct Interval {
    time_us start = 0;
    time_us end   = 0;

    bool overlaps(const Interval& o) const { return start < o.end && o.start < end; }
    bool contains(time_us t) const { return t >= start && t < end; }
    time_us length() const { return end - start; }
};

}  // namespace macsim
