#include "walkfit/moments.hpp"

#include "walkfit/rng.hpp"
#include "walkfit/simulate.hpp"

#include "parallel.hpp"

#include <cmath>
#include <cstring>
#include <set>
#include <stdexcept>
#include <string>

namespace walkfit {

LagGrid LagGrid::log_spaced(double dt, std::size_t n_steps,
                            std::size_t n_lags) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("dt must be positive and finite");
    }
    if (n_lags < 4) {
        throw std::invalid_argument("n_lags must be at least 4");
    }
    const std::size_t max_k = n_steps / 10;
    if (max_k < 4) {
        throw std::invalid_argument(
            "trajectory too short for a lag grid (needs at least 40 steps)");
    }
    std::set<std::size_t> ks;
    const double log_max = std::log(static_cast<double>(max_k));
    for (std::size_t j = 0; j < n_lags; ++j) {
        const double frac =
            n_lags == 1 ? 0.0
                        : static_cast<double>(j) / static_cast<double>(n_lags - 1);
        auto k = static_cast<std::size_t>(std::llround(std::exp(frac * log_max)));
        if (k < 1) k = 1;
        if (k > max_k) k = max_k;
        ks.insert(k);
    }
    if (ks.size() < 4) {
        throw std::invalid_argument("lag grid has fewer than 4 distinct lags");
    }
    LagGrid grid;
    grid.t_s.reserve(ks.size());
    for (const std::size_t k : ks) {
        grid.t_s.push_back(static_cast<double>(k) * dt);
    }
    return grid;
}

LagGrid LagGrid::from_times(std::vector<double> times, double dt) {
    LagGrid grid;
    grid.t_s = std::move(times);
    const auto ks = grid.steps_for(dt);  // validates multiples and positivity
    for (std::size_t i = 1; i < ks.size(); ++i) {
        if (ks[i] <= ks[i - 1]) {
            throw std::invalid_argument("lags must be strictly increasing");
        }
    }
    if (ks.size() < 4) {
        throw std::invalid_argument("lag grid needs at least 4 lags");
    }
    return grid;
}

std::vector<std::size_t> LagGrid::steps_for(double dt) const {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("dt must be positive and finite");
    }
    std::vector<std::size_t> ks;
    ks.reserve(t_s.size());
    for (const double t : t_s) {
        if (!(t > 0.0) || !std::isfinite(t)) {
            throw std::invalid_argument("lags must be positive and finite");
        }
        const auto k = std::llround(t / dt);
        if (k < 1 || std::abs(t - static_cast<double>(k) * dt) > 1e-9 * t) {
            throw std::invalid_argument(
                "lag " + std::to_string(t) +
                " is not a positive integer multiple of dt");
        }
        ks.push_back(static_cast<std::size_t>(k));
    }
    return ks;
}

namespace detail {

namespace {

typedef double v4df __attribute__((vector_size(32)));

// Sums ||d||^2 and ||d||^4 over all start indices for one lag. Four fixed
// lanes plus a scalar tail: the summation order depends only on the pair
// count, never on threading, so results are bitwise reproducible.
void pair_sums(const double* xs, const double* ys, std::size_t n_pairs,
               std::size_t k, double& sum2, double& sum4) {
    v4df acc2 = {0.0, 0.0, 0.0, 0.0};
    v4df acc4 = {0.0, 0.0, 0.0, 0.0};
    std::size_t i = 0;
    for (; i + 4 <= n_pairs; i += 4) {
        v4df xa;
        v4df xb;
        v4df ya;
        v4df yb;
        std::memcpy(&xa, xs + i + k, sizeof xa);
        std::memcpy(&xb, xs + i, sizeof xb);
        std::memcpy(&ya, ys + i + k, sizeof ya);
        std::memcpy(&yb, ys + i, sizeof yb);
        const v4df dx = xa - xb;
        const v4df dy = ya - yb;
        const v4df s2 = dx * dx + dy * dy;
        acc2 += s2;
        acc4 += s2 * s2;
    }
    double tail2 = 0.0;
    double tail4 = 0.0;
    for (; i < n_pairs; ++i) {
        const double dx = xs[i + k] - xs[i];
        const double dy = ys[i + k] - ys[i];
        const double s2 = dx * dx + dy * dy;
        tail2 += s2;
        tail4 += s2 * s2;
    }
    sum2 = ((acc2[0] + acc2[1]) + (acc2[2] + acc2[3])) + tail2;
    sum4 = ((acc4[0] + acc4[1]) + (acc4[2] + acc4[3])) + tail4;
}

} // namespace

void path_moments(const double* xs, const double* ys, std::size_t n_pos,
                  const std::vector<std::size_t>& ks, double dt,
                  double* m2_out, double* m4_out) {
    for (std::size_t l = 0; l < ks.size(); ++l) {
        const std::size_t k = ks[l];
        const std::size_t n_pairs = n_pos - k;
        double sum2 = 0.0;
        double sum4 = 0.0;
        pair_sums(xs, ys, n_pairs, k, sum2, sum4);
        const double ts = static_cast<double>(k) * dt;
        const double ts2 = ts * ts;
        const double count = static_cast<double>(n_pairs);
        m2_out[l] = sum2 / (count * ts2);
        m4_out[l] = sum4 / (count * ts2 * ts2);
    }
}

} // namespace detail

namespace {

// Validates lags against the series length: every lag must be strictly
// shorter than the duration, n_steps * dt.
std::vector<std::size_t> checked_steps(const LagGrid& grid, double dt,
                                       std::size_t n_steps) {
    auto ks = grid.steps_for(dt);
    for (const std::size_t k : ks) {
        if (k >= n_steps) {
            throw std::invalid_argument(
                "lag must be shorter than the trajectory duration");
        }
    }
    return ks;
}

} // namespace

MomentCurve empirical_moments(const Trajectory& traj, const LagGrid& grid) {
    traj.validate();
    const std::size_t n = traj.n_steps();
    const auto ks = checked_steps(grid, traj.dt, n);
    MomentCurve curve;
    curve.lags = grid;
    curve.m2.resize(ks.size());
    curve.m4.resize(ks.size());
    curve.n_pairs.reserve(ks.size());
    detail::path_moments(traj.xs.data(), traj.ys.data(), n + 1, ks, traj.dt,
                         curve.m2.data(), curve.m4.data());
    for (const std::size_t k : ks) {
        curve.n_pairs.push_back(static_cast<std::int64_t>(n + 1 - k));
    }
    return curve;
}

MomentCurve model_moments(const ModelParams& params, const LagGrid& grid,
                          std::size_t ensemble_size, std::size_t n_steps,
                          double dt, std::uint64_t seed,
                          std::optional<PhaseLabel> initial_phase,
                          int n_workers) {
    if (ensemble_size < 1) {
        throw std::invalid_argument("ensemble_size must be at least 1");
    }
    if (n_steps < 1) {
        throw std::invalid_argument("n_steps must be at least 1");
    }
    const bool is_model = std::holds_alternative<IsParams>(params);
    if (is_model) {
        const auto& p = std::get<IsParams>(params);
        p.validate();
        if (p.rate_bd == 0.0 && p.rate_db == 0.0 && !initial_phase) {
            throw std::invalid_argument(
                "both switching rates are zero: initial_phase is required");
        }
    } else {
        std::get<LwParams>(params).validate();
    }
    const auto ks = checked_steps(grid, dt, n_steps);
    const std::size_t n_lags = ks.size();

    // Per-member results land in slots indexed by member, so the serial
    // reduction below is identical for every worker count.
    std::vector<double> member_m2(ensemble_size * n_lags);
    std::vector<double> member_m4(ensemble_size * n_lags);

    struct Workspace {
        std::vector<double> xs, ys;
        detail::IsDrawTable draws;
    };
    const std::size_t workers =
        n_workers < 1 ? 1
                      : std::min<std::size_t>(static_cast<std::size_t>(n_workers),
                                              ensemble_size);
    std::vector<Workspace> spaces(workers);

    detail::for_each_index(
        ensemble_size, static_cast<int>(workers),
        [&](std::size_t worker, std::size_t j) {
            Workspace& ws = spaces[worker];
            ws.xs.resize(n_steps + 1);
            ws.ys.resize(n_steps + 1);
            RandomStream stream = RandomStream::substream(seed, j);
            if (is_model) {
                ws.draws.fill(stream, n_steps);
                detail::simulate_intermittent_into(
                    std::get<IsParams>(params), ws.draws, dt, initial_phase,
                    ws.xs.data(), ws.ys.data());
            } else {
                detail::StreamFlightSource source(stream);
                detail::simulate_levy_into(std::get<LwParams>(params), n_steps,
                                           dt, source, ws.xs.data(),
                                           ws.ys.data());
            }
            detail::path_moments(ws.xs.data(), ws.ys.data(), n_steps + 1, ks,
                                 dt, member_m2.data() + j * n_lags,
                                 member_m4.data() + j * n_lags);
        });

    MomentCurve curve;
    curve.lags = grid;
    curve.m2.assign(n_lags, 0.0);
    curve.m4.assign(n_lags, 0.0);
    for (std::size_t j = 0; j < ensemble_size; ++j) {
        for (std::size_t l = 0; l < n_lags; ++l) {
            curve.m2[l] += member_m2[j * n_lags + l];
            curve.m4[l] += member_m4[j * n_lags + l];
        }
    }
    const auto scale = static_cast<double>(ensemble_size);
    for (std::size_t l = 0; l < n_lags; ++l) {
        curve.m2[l] /= scale;
        curve.m4[l] /= scale;
    }
    curve.n_pairs.reserve(n_lags);
    for (const std::size_t k : ks) {
        curve.n_pairs.push_back(static_cast<std::int64_t>(n_steps + 1 - k));
    }
    return curve;
}

} // namespace walkfit
