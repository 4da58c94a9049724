#pragma once

#include "walkfit/rng.hpp"
#include "walkfit/samplers.hpp"
#include "walkfit/types.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace walkfit {

/// Simulates the intermittent walk for n_steps of length dt, starting at the
/// origin.
///
/// The phase-switch decision (probability 1 - exp(-lambda * dt) for the rate
/// that leaves the current phase) is made before the displacement of each
/// step, and a fresh uniform heading is drawn at every entry into the
/// ballistic phase. When initial_phase is absent the starting phase is drawn
/// from the stationary distribution; with both rates zero that draw is
/// ambiguous, so an explicit initial_phase is required.
///
/// Deterministic: identical inputs give bit-identical output. The stream is
/// consumed in a fixed layout independent of the parameter values (see
/// detail::IsDrawTable), so trajectories with equal seeds but different
/// parameters stay maximally correlated.
Trajectory simulate_intermittent(const IsParams& params, std::size_t n_steps,
                                 double dt, std::uint64_t seed,
                                 std::optional<PhaseLabel> initial_phase = {});

/// Simulates the Levy walk for n_steps of length dt, starting at the origin.
///
/// Flights (fresh uniform heading, Lomax duration via sample_flight_time,
/// constant speed) are split exactly at grid boundaries, so the sampled
/// points lie on the true piecewise-linear path and every grid displacement
/// has norm <= speed * dt, with equality when no turn falls inside the step.
Trajectory simulate_levy(const LwParams& params, std::size_t n_steps,
                         double dt, std::uint64_t seed);

namespace detail {

/// Pre-drawn randomness for one intermittent trajectory, in the documented
/// stream order: u_phase0, u_heading0, then per step the quadruple
/// (u_switch, normal pair via Box-Muller, u_heading). Every step consumes
/// all four draws whatever the phase, so a replay with different parameters
/// reuses each draw for the same purpose — the basis for common random
/// numbers during fitting.
struct IsDrawTable {
    double u_phase0 = 0.5;
    double u_heading0 = 0.5;
    std::vector<double> u_switch;
    std::vector<double> gauss_x;
    std::vector<double> gauss_y;
    std::vector<double> u_heading;

    void fill(RandomStream& stream, std::size_t n_steps);
    std::size_t n_steps() const { return u_switch.size(); }
};

/// Replays a draw table under concrete parameters. xs/ys must hold
/// n_steps + 1 slots; the path starts at the origin.
void simulate_intermittent_into(const IsParams& params,
                                const IsDrawTable& draws, double dt,
                                std::optional<PhaseLabel> initial_phase,
                                double* xs, double* ys);

/// Hands out one (u_heading, u_tau) pair per flight, drawn on demand.
class StreamFlightSource {
public:
    explicit StreamFlightSource(RandomStream& stream) : stream_(&stream) {}

    std::pair<double, double> next() {
        const double u_heading = stream_->next_unit();
        const double u_tau = stream_->next_unit();
        return {u_heading, u_tau};
    }

private:
    RandomStream* stream_;
};

/// Like StreamFlightSource, but remembers every pair it has handed out:
/// after rewind(), flight i receives the same draws again no matter how many
/// flights earlier replays consumed. Keeps the fitting objective continuous
/// in the Levy parameters under common random numbers.
class CachedFlightSource {
public:
    explicit CachedFlightSource(std::uint64_t seed) : stream_(seed) {}

    void rewind() { pos_ = 0; }

    std::pair<double, double> next() {
        if (pos_ == cache_.size()) {
            const double u_heading = stream_.next_unit();
            const double u_tau = stream_.next_unit();
            cache_.emplace_back(u_heading, u_tau);
        }
        return cache_[pos_++];
    }

private:
    RandomStream stream_;
    std::vector<std::pair<double, double>> cache_;
    std::size_t pos_ = 0;
};

/// Levy-walk core: samples the piecewise-linear flight path on the uniform
/// grid, splitting flights exactly at grid boundaries. xs/ys must hold
/// n_steps + 1 slots. If turns_per_step is non-null it is resized to n_steps
/// and receives the number of flights begun within each step.
template <class FlightSource>
void simulate_levy_into(const LwParams& params, std::size_t n_steps, double dt,
                        FlightSource& source, double* xs, double* ys,
                        std::vector<std::int32_t>* turns_per_step = nullptr) {
    if (turns_per_step) {
        turns_per_step->assign(n_steps, 0);
    }
    const double v = params.speed;
    double x = 0.0;
    double y = 0.0;
    xs[0] = 0.0;
    ys[0] = 0.0;
    double remaining = 0.0;  // time left in the current flight
    double cx = 1.0;
    double cy = 0.0;
    for (std::size_t i = 0; i < n_steps; ++i) {
        double t_left = dt;
        while (t_left > 0.0) {
            if (remaining <= 0.0) {
                const auto [u_heading, u_tau] = source.next();
                const double angle = 2.0 * RandomStream::kPi * u_heading;
                cx = std::cos(angle);
                cy = std::sin(angle);
                remaining = sample_flight_time(params, u_tau);
                if (turns_per_step) ++(*turns_per_step)[i];
                continue;  // re-check: a flight time can round to zero
            }
            const double advance = remaining < t_left ? remaining : t_left;
            x += v * advance * cx;
            y += v * advance * cy;
            remaining -= advance;
            t_left -= advance;
        }
        xs[i + 1] = x;
        ys[i + 1] = y;
    }
}

} // namespace detail

} // namespace walkfit
