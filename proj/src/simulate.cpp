#include "walkfit/simulate.hpp"

#include <cmath>
#include <stdexcept>

namespace walkfit {

namespace detail {

void IsDrawTable::fill(RandomStream& stream, std::size_t n_steps) {
    u_phase0 = stream.next_unit();
    u_heading0 = stream.next_unit();
    u_switch.resize(n_steps);
    gauss_x.resize(n_steps);
    gauss_y.resize(n_steps);
    u_heading.resize(n_steps);
    for (std::size_t i = 0; i < n_steps; ++i) {
        u_switch[i] = stream.next_unit();
        const auto [gx, gy] = stream.next_normal_pair();
        gauss_x[i] = gx;
        gauss_y[i] = gy;
        u_heading[i] = stream.next_unit();
    }
}

void simulate_intermittent_into(const IsParams& params,
                                const IsDrawTable& draws, double dt,
                                std::optional<PhaseLabel> initial_phase,
                                double* xs, double* ys) {
    const std::size_t n = draws.n_steps();
    // next_unit() lies strictly inside (0,1), so a zero rate forces the
    // comparison and the walker starts in the only reachable phase.
    PhaseLabel phase =
        initial_phase ? *initial_phase
                      : (draws.u_phase0 < params.stationary_ballistic()
                             ? PhaseLabel::Ballistic
                             : PhaseLabel::Diffusive);
    const double p_leave_b = 1.0 - std::exp(-params.rate_bd * dt);
    const double p_leave_d = 1.0 - std::exp(-params.rate_db * dt);
    const double ballistic_step = params.ballistic_speed * dt;
    const double sigma = params.diffusion_coeff * std::sqrt(dt);
    double heading = 2.0 * RandomStream::kPi * draws.u_heading0;
    double cx = std::cos(heading);
    double cy = std::sin(heading);
    double x = 0.0;
    double y = 0.0;
    xs[0] = 0.0;
    ys[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (phase == PhaseLabel::Ballistic) {
            if (draws.u_switch[i] < p_leave_b) phase = PhaseLabel::Diffusive;
        } else {
            if (draws.u_switch[i] < p_leave_d) {
                phase = PhaseLabel::Ballistic;
                heading = 2.0 * RandomStream::kPi * draws.u_heading[i];
                cx = std::cos(heading);
                cy = std::sin(heading);
            }
        }
        if (phase == PhaseLabel::Ballistic) {
            x += ballistic_step * cx;
            y += ballistic_step * cy;
        } else {
            x += sigma * draws.gauss_x[i];
            y += sigma * draws.gauss_y[i];
        }
        xs[i + 1] = x;
        ys[i + 1] = y;
    }
}

} // namespace detail

namespace {

void validate_common(std::size_t n_steps, double dt) {
    if (n_steps < 1) {
        throw std::invalid_argument("n_steps must be at least 1");
    }
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("dt must be positive and finite");
    }
}

} // namespace

Trajectory simulate_intermittent(const IsParams& params, std::size_t n_steps,
                                 double dt, std::uint64_t seed,
                                 std::optional<PhaseLabel> initial_phase) {
    params.validate();
    validate_common(n_steps, dt);
    if (params.rate_bd == 0.0 && params.rate_db == 0.0 && !initial_phase) {
        throw std::invalid_argument(
            "both switching rates are zero: initial_phase is required");
    }
    Trajectory traj;
    traj.dt = dt;
    traj.xs.resize(n_steps + 1);
    traj.ys.resize(n_steps + 1);
    RandomStream stream(seed);
    detail::IsDrawTable draws;
    draws.fill(stream, n_steps);
    detail::simulate_intermittent_into(params, draws, dt, initial_phase,
                                       traj.xs.data(), traj.ys.data());
    return traj;
}

Trajectory simulate_levy(const LwParams& params, std::size_t n_steps,
                         double dt, std::uint64_t seed) {
    params.validate();
    validate_common(n_steps, dt);
    Trajectory traj;
    traj.dt = dt;
    traj.xs.resize(n_steps + 1);
    traj.ys.resize(n_steps + 1);
    RandomStream stream(seed);
    detail::StreamFlightSource source(stream);
    detail::simulate_levy_into(params, n_steps, dt, source, traj.xs.data(),
                               traj.ys.data());
    return traj;
}

} // namespace walkfit
