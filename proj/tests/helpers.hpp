#pragma once

#include "walkfit/rng.hpp"
#include "walkfit/simulate.hpp"
#include "walkfit/types.hpp"

#include <cmath>
#include <cstdint>

namespace testutil {

inline double rel_err(double actual, double expected) {
    return std::abs(actual - expected) / std::abs(expected);
}

// Trajectory from a randomly drawn model and parameter set, for property
// tests that should hold regardless of the generating process.
inline walkfit::Trajectory random_trajectory(std::uint64_t seed, std::size_t n_steps = 300) {
    walkfit::RandomStream s(seed);
    const double dt = 0.25 + s.next_unit();
    const std::uint64_t sim_seed = walkfit::derive_seed(seed, 7);
    if (s.next_unit() < 0.5) {
        walkfit::IsParams p;
        p.diffusion_coeff = 0.2 + 2.0 * s.next_unit();
        p.ballistic_speed = 0.2 + 3.0 * s.next_unit();
        p.rate_bd = 0.02 + 0.3 * s.next_unit();
        p.rate_db = 0.02 + 0.3 * s.next_unit();
        return walkfit::simulate_intermittent(p, n_steps, dt, sim_seed);
    }
    walkfit::LwParams p;
    p.tau0 = 0.5 + 5.0 * s.next_unit();
    p.levy_exponent = 0.8 + 2.0 * s.next_unit();
    p.speed = 0.3 + 2.0 * s.next_unit();
    return walkfit::simulate_levy(p, n_steps, dt, sim_seed);
}

} // namespace testutil
