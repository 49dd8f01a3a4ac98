#pragma once

#include <cmath>

namespace rdalab {

// C-infinity step: 0 for x <= 0, 1 for x >= 1, glued from e^{-1/x}.
inline double smoothstep(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double a = std::exp(-1.0 / x);
    double b = std::exp(-1.0 / (1.0 - x));
    return a / (a + b);
}

inline double smoothstep_derivative(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    double a = std::exp(-1.0 / x);
    double b = std::exp(-1.0 / (1.0 - x));
    double da = a / (x * x);
    double db = -b / ((1.0 - x) * (1.0 - x));
    double s = a + b;
    return (da * b - a * db) / (s * s);
}

// 1 below lo, 0 above hi, monotone in between.
struct Plateau {
    double lo = 1.0;
    double hi = 2.0;

    double operator()(double z) const { return 1.0 - smoothstep((z - lo) / (hi - lo)); }
    double derivative(double z) const { return -smoothstep_derivative((z - lo) / (hi - lo)) / (hi - lo); }
};

// Window profiles of the Floquet example: theta1 ramps up on (1/4, 1/2),
// theta2 on (0, 1/4).
inline double theta1(double y) { return smoothstep((y - 0.25) / 0.25); }
inline double theta2(double y) { return smoothstep(y / 0.25); }

// Generic ramp with configurable onset/plateau, used for sensitivity studies.
struct Ramp {
    double start = 0.25;
    double end = 0.5;
    double operator()(double y) const { return smoothstep((y - start) / (end - start)); }
};

}  // namespace rdalab
