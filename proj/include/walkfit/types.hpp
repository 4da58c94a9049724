#pragma once

#include <cstddef>
#include <variant>
#include <vector>

namespace walkfit {

/// Motion phase of the two-state intermittent process.
enum class PhaseLabel { Ballistic, Diffusive };

/// Parameters of the intermittent (ballistic/diffusive) walk.
///
/// Per step of length dt the walker either moves ballistic_speed * dt along a
/// heading held since the last ballistic entry, or takes an isotropic Gaussian
/// step whose per-axis standard deviation is diffusion_coeff * sqrt(dt).
/// Phase switches are Markovian with rates rate_bd (ballistic -> diffusive)
/// and rate_db (diffusive -> ballistic).
struct IsParams {
    double diffusion_coeff = 1.0;  ///< D, in length / sqrt(time)
    double ballistic_speed = 1.0;  ///< V_B, in length / time
    double rate_bd = 0.1;          ///< lambda_BD, in 1 / time
    double rate_db = 0.1;          ///< lambda_DB, in 1 / time

    /// Throws std::invalid_argument on non-finite or out-of-domain values.
    /// Both rates may be zero; simulation then requires an explicit initial
    /// phase (see simulate_intermittent).
    void validate() const;

    /// Stationary probability of the ballistic phase,
    /// rate_db / (rate_bd + rate_db).
    double stationary_ballistic() const;
};

/// Parameters of the Levy walk.
///
/// Flight durations are Lomax (shifted Pareto) with scale tau0 and tail
/// exponent levy_exponent; the walker moves at constant speed with a fresh
/// uniform heading each flight.
struct LwParams {
    double tau0 = 1.0;           ///< flight-time scale, in time
    double levy_exponent = 1.5;  ///< gamma, dimensionless tail exponent
    double speed = 1.0;          ///< v, in length / time

    void validate() const;
};

/// Parameters of the heavy-tailed step-length law
/// p(l) = nu * l_min^nu / l^(nu+1), l >= l_min (diagnostic sampler).
struct StepLenParams {
    double l_min = 1.0;  ///< minimum step length, > 0
    double nu = 1.5;     ///< tail exponent, must lie in (1, 2)

    void validate() const;
};

/// A planar trajectory sampled on a uniform time grid: position i is
/// (xs[i], ys[i]) at time i * dt.
struct Trajectory {
    double dt = 1.0;
    std::vector<double> xs;
    std::vector<double> ys;

    /// Number of steps (positions minus one).
    std::size_t n_steps() const { return xs.empty() ? 0 : xs.size() - 1; }

    double duration() const { return static_cast<double>(n_steps()) * dt; }

    /// Throws std::invalid_argument if dt <= 0, sizes mismatch, fewer than
    /// two positions, or any coordinate is non-finite.
    void validate() const;
};

enum class ModelKind { Intermittent, Levy };

using ModelParams = std::variant<IsParams, LwParams>;

ModelKind kind_of(const ModelParams& params);

} // namespace walkfit
