#pragma once

#include <cstdint>

#include "rplsim/rng.hpp"

namespace rplsim {

/// Trickle suppression timer (ContikiRPL defaults: i_min 4096 ms,
/// 8 doublings, redundancy k = 10).
struct TrickleState {
    double i_min_s = 4.096;
    int max_doublings = 8;
    int redundancy_k = 10;

    double current_interval = 4.096;
    int counter = 0;
    double interval_start = 0.0;
    double next_fire = 0.0;

    double max_interval() const {
        double i = i_min_s;
        for (int d = 0; d < max_doublings; ++d) i *= 2.0;
        return i;
    }

    /// Start a fresh interval at `now`; the fire point is uniform in the
    /// second half of the interval.
    void begin_interval(double now, RngStream& rng) {
        counter = 0;
        interval_start = now;
        next_fire = now + rng.uniform(current_interval / 2.0, current_interval);
    }

    void reset(double now, RngStream& rng) {
        current_interval = i_min_s;
        begin_interval(now, rng);
    }

    /// Called when the interval expires after a fire; doubles up to the cap.
    void advance_interval(double now, RngStream& rng) {
        current_interval *= 2.0;
        if (current_interval > max_interval()) current_interval = max_interval();
        begin_interval(now, rng);
    }

    bool suppressed() const { return counter >= redundancy_k; }

    void heard_consistent() { ++counter; }
};

}  // namespace rplsim
