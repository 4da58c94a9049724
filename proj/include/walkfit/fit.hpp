#pragma once

#include "walkfit/moments.hpp"
#include "walkfit/types.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace walkfit {

/// Closed positive interval, in natural (not log) units.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Knobs of the simulation-based fit.
///
/// The optimizer is a multi-start Nelder-Mead simplex over log-parameters,
/// constrained to the bound box. A start is counted converged when the
/// simplex objective spread falls below `tolerance` or its extent in every
/// log coordinate falls below `param_tolerance` (the Monte-Carlo objective
/// is piecewise constant on very fine parameter scales, so a pure objective
/// criterion can never trigger).
struct FitConfig {
    int n_starts = 16;
    int max_iters = 400;        ///< simplex iterations per start
    double tolerance = 1e-6;    ///< stop on objective spread below this
    double param_tolerance = 1e-3;  ///< stop on log-space simplex extent
    int ensemble_size = 64;     ///< trajectories per objective evaluation
    /// Master seed of the common-random-numbers ensemble; derived from the
    /// fit seed when absent.
    std::optional<std::uint64_t> ensemble_seed;
    /// Re-derive a fresh ensemble for every objective evaluation instead of
    /// reusing one (a robustness diagnostic; the objective becomes noisy).
    bool fresh_ensemble_per_eval = false;
    int n_workers = 1;          ///< threads for ensemble evaluation
    /// Search boxes in natural units: {D, V_B, rate_bd, rate_db} and
    /// {tau0, gamma, v}. Defaults (see default_is_bounds / default_lw_bounds)
    /// apply when absent.
    std::optional<std::array<Interval, 4>> is_bounds;
    std::optional<std::array<Interval, 3>> lw_bounds;

    void validate() const;
};

/// Default search boxes: D, V_B in [1e-3, 1e3]; rates in [1e-4/dt, 1/dt];
/// tau0 in [dt/10, 1e3*dt]; gamma in [0.3, 4]; v in [1e-3, 1e3].
std::array<Interval, 4> default_is_bounds(double dt);
std::array<Interval, 3> default_lw_bounds(double dt);

/// Shape of the observed series behind a data MomentCurve; model ensembles
/// are simulated with the same step count and dt.
struct DataMeta {
    double dt = 1.0;
    std::size_t n_steps = 0;
};

struct FitReport {
    ModelKind model = ModelKind::Intermittent;
    ModelParams params;
    double objective = 0.0;
    double r2_adjusted = 0.0;
    std::vector<double> per_lag_d2;
    std::vector<double> per_lag_d4;
    int n_starts_converged = 0;
    FitConfig config_echo;
};

class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Squared log distance [ln(m_model / m_data)]^2 between two moment values;
/// symmetric, zero iff equal. Throws std::domain_error unless both arguments
/// are strictly positive and finite.
double log_distance(double m_model, double m_data);

/// Fit objective J = mean over lags of d2 + mean over lags of d4, the
/// squared log distances of m2 and m4. Requires identical lag grids.
double objective(const MomentCurve& model_curve, const MomentCurve& data_curve);

/// Adjusted R-squared on residuals pooled over both moment orders:
/// R2 = 1 - SS_res/SS_tot on ln m across all lags and k in {2,4}, with
/// SS_tot about the pooled mean of ln m_data, then the small-sample
/// adjustment 1 - (1 - R2)(n - 1)/(n - p - 1) with n = 2 * lag count.
/// Degenerate SS_tot = 0: returns 1 when SS_res = 0, otherwise throws
/// std::domain_error (the curve is non-scorable).
double adjusted_r2(const MomentCurve& model_curve,
                   const MomentCurve& data_curve, std::size_t n_params);

/// Fits one model family to an observed moment curve.
///
/// n_starts Nelder-Mead searches run in log-parameter space from start
/// points drawn uniformly in the log bound box; the objective compares
/// data_curve against model_moments under common random numbers, so it is
/// an exact deterministic function of the parameters. The best start wins;
/// ties break toward the lowest start index.
///
/// Seed derivation (stable public contract): the start-point stream is
/// RandomStream(derive_seed(seed, 0)), consuming one uniform per dimension
/// per start in start-major order; the ensemble master seed is
/// config.ensemble_seed when set, otherwise derive_seed(seed, 1), and
/// ensemble member j runs on RandomStream::substream(master, j) exactly as
/// model_moments does.
///
/// Throws FitError when no start yields a finite objective.
FitReport fit_model(ModelKind kind, const MomentCurve& data_curve,
                    const DataMeta& meta, const FitConfig& config,
                    std::uint64_t seed);

namespace detail {

struct SimplexResult {
    std::vector<double> best_x;
    double best_f = 0.0;
    int iterations = 0;
    bool converged = false;
    /// Best objective seen after each iteration (non-increasing).
    std::vector<double> best_trace;
};

/// Bounded Nelder-Mead: reflection/expansion/contraction points are clamped
/// into [lo, hi] componentwise. Deterministic.
SimplexResult nelder_mead(const std::function<double(const double*)>& f,
                          std::vector<double> start,
                          const std::vector<double>& lo,
                          const std::vector<double>& hi, int max_iters,
                          double f_tol, double x_tol);

} // namespace detail

} // namespace walkfit
