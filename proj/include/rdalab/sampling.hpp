#pragma once

#include <random>

#include "field.hpp"

namespace rdalab {

// Real field with Gaussian coefficients damped by e^{-decay |n|}, scaled to a
// uniform random H^1 radius in [0, radius).
inline FourierField random_ball_field(int n_max, std::mt19937_64& rng, double radius, double decay = 0.3) {
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> r01(0.0, 1.0);
    FourierField u(n_max);
    u(0) = g(rng);
    for (int n = 1; n <= n_max; ++n) {
        cplx c = cplx(g(rng), g(rng)) * std::exp(-decay * n);
        u(n) = c;
        u(-n) = std::conj(c);
    }
    return u * (radius * r01(rng) / phi_norm(u));
}

// Same shape, exact H^1 norm.
inline FourierField random_sphere_field(int n_max, std::mt19937_64& rng, double radius, double decay = 0.3) {
    FourierField u = random_ball_field(n_max, rng, 1.0, decay);
    return u * (radius / phi_norm(u));
}

}  // namespace rdalab
