#pragma once

#include <algorithm>

namespace conelab {

/// Tip cutoff: identically 1 on [0, one_until], identically 0 beyond
/// zero_from, C^3 smoothstep transition in between. Results downstream are
/// checked to be insensitive to the exact profile.
struct Cutoff {
    double one_until = 0.4;
    double zero_from = 0.9;

    double operator()(double x) const {
        if (x <= one_until) return 1.0;
        if (x >= zero_from) return 0.0;
        double s = (x - one_until) / (zero_from - one_until);
        // order-3 smoothstep of (1-s)
        double t = 1.0 - s;
        double t4 = t * t * t * t;
        return t4 * (35.0 - 84.0 * t + 70.0 * t * t - 20.0 * t * t * t);
    }
};

}  // namespace conelab
