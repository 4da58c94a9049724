#pragma once

#include "walkfit/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace walkfit {

/// An ordered set of lag times, each an exact positive integer multiple of
/// the trajectory dt. Build through the factories; they enforce the
/// invariants (strictly increasing, >= 4 distinct lags).
struct LagGrid {
    std::vector<double> t_s;

    /// Default grid: n_lags logarithmically spaced lags from dt to
    /// duration/10, snapped to unique integer multiples of dt. Throws
    /// std::invalid_argument when fewer than 4 distinct lags survive.
    static LagGrid log_spaced(double dt, std::size_t n_steps,
                              std::size_t n_lags = 25);

    /// Wraps explicit lag times, validating them against dt.
    static LagGrid from_times(std::vector<double> times, double dt);

    /// Lags as integer step counts; throws std::invalid_argument when a lag
    /// is not a multiple of dt within 1e-9 relative.
    std::vector<std::size_t> steps_for(double dt) const;

    std::size_t size() const { return t_s.size(); }
};

/// Second and fourth velocity moments per lag. n_pairs is the number of
/// (t, t + t_s) displacement pairs averaged per trajectory at each lag.
struct MomentCurve {
    LagGrid lags;
    std::vector<double> m2;
    std::vector<double> m4;
    std::vector<std::int64_t> n_pairs;
};

/// Empirical moments of one trajectory: for each lag t_s the coarse-grained
/// velocity v(t, t_s) = (r_{t+t_s} - r_t) / t_s is formed over all
/// overlapping start indices, and m_k(t_s) = mean of ||v||^k for k in {2,4}.
///
/// Throws std::invalid_argument when a lag is not a multiple of traj.dt or
/// is not shorter than the trajectory duration.
MomentCurve empirical_moments(const Trajectory& traj, const LagGrid& grid);

/// Monte-Carlo model moments: simulates ensemble_size trajectories of
/// n_steps steps with member j seeded by derive_seed(seed, j), and averages
/// the members' empirical moments per lag. n_pairs reports the per-member
/// pair count. initial_phase applies to intermittent models only.
///
/// Deterministic for any n_workers: member results are reduced serially by
/// index, so 1 worker and 8 workers give bit-identical curves.
MomentCurve model_moments(const ModelParams& params, const LagGrid& grid,
                          std::size_t ensemble_size, std::size_t n_steps,
                          double dt, std::uint64_t seed,
                          std::optional<PhaseLabel> initial_phase = {},
                          int n_workers = 1);

namespace detail {

/// Per-lag moments of one path of n_pos positions: for each lag ks[l] writes
/// mean ||v||^2 into m2_out[l] and mean ||v||^4 into m4_out[l]. Summation
/// order is fixed, so results are reproducible bit-for-bit.
void path_moments(const double* xs, const double* ys, std::size_t n_pos,
                  const std::vector<std::size_t>& ks, double dt,
                  double* m2_out, double* m4_out);

} // namespace detail

} // namespace walkfit
