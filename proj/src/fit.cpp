#include "walkfit/fit.hpp"

#include "walkfit/rng.hpp"
#include "walkfit/simulate.hpp"

#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace walkfit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_interval(const Interval& iv, const char* name) {
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || iv.lo <= 0.0 ||
        iv.lo >= iv.hi) {
        throw std::invalid_argument(std::string(name) +
                                    " bounds need 0 < lo < hi, both finite");
    }
}

void check_same_grid(const MomentCurve& a, const MomentCurve& b) {
    if (a.lags.t_s != b.lags.t_s) {
        throw std::invalid_argument("moment curves have different lag grids");
    }
    const std::size_t n = a.lags.size();
    if (a.m2.size() != n || a.m4.size() != n || b.m2.size() != n ||
        b.m4.size() != n) {
        throw std::invalid_argument("moment arrays do not match the lag grid");
    }
}

} // namespace

void FitConfig::validate() const {
    if (n_starts < 1) throw std::invalid_argument("n_starts must be >= 1");
    if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
    if (!(tolerance > 0.0) || !std::isfinite(tolerance)) {
        throw std::invalid_argument("tolerance must be positive and finite");
    }
    if (!(param_tolerance >= 0.0) || !std::isfinite(param_tolerance)) {
        throw std::invalid_argument("param_tolerance must be >= 0 and finite");
    }
    if (ensemble_size < 1) {
        throw std::invalid_argument("ensemble_size must be >= 1");
    }
    if (n_workers < 1) throw std::invalid_argument("n_workers must be >= 1");
    if (is_bounds) {
        for (const auto& iv : *is_bounds) check_interval(iv, "is");
    }
    if (lw_bounds) {
        for (const auto& iv : *lw_bounds) check_interval(iv, "lw");
    }
}

std::array<Interval, 4> default_is_bounds(double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("dt must be positive and finite");
    }
    return {{{1e-3, 1e3}, {1e-3, 1e3}, {1e-4 / dt, 1.0 / dt}, {1e-4 / dt, 1.0 / dt}}};
}

std::array<Interval, 3> default_lw_bounds(double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("dt must be positive and finite");
    }
    return {{{dt / 10.0, 1e3 * dt}, {0.3, 4.0}, {1e-3, 1e3}}};
}

double log_distance(double m_model, double m_data) {
    if (!(m_model > 0.0) || !std::isfinite(m_model) || !(m_data > 0.0) ||
        !std::isfinite(m_data)) {
        throw std::domain_error("moments must be strictly positive and finite");
    }
    const double r = std::log(m_model / m_data);
    return r * r;
}

double objective(const MomentCurve& model_curve,
                 const MomentCurve& data_curve) {
    check_same_grid(model_curve, data_curve);
    const std::size_t n_lags = model_curve.lags.size();
    double sum2 = 0.0;
    double sum4 = 0.0;
    for (std::size_t l = 0; l < n_lags; ++l) {
        sum2 += log_distance(model_curve.m2[l], data_curve.m2[l]);
        sum4 += log_distance(model_curve.m4[l], data_curve.m4[l]);
    }
    const auto count = static_cast<double>(n_lags);
    return sum2 / count + sum4 / count;
}

double adjusted_r2(const MomentCurve& model_curve,
                   const MomentCurve& data_curve, std::size_t n_params) {
    check_same_grid(model_curve, data_curve);
    const std::size_t n_lags = model_curve.lags.size();
    const std::size_t n_points = 2 * n_lags;
    if (n_points <= n_params + 1) {
        throw std::invalid_argument(
            "need more pooled points than parameters plus one");
    }
    std::vector<double> y;
    std::vector<double> y_hat;
    y.reserve(n_points);
    y_hat.reserve(n_points);
    auto push_logs = [&](const std::vector<double>& model,
                         const std::vector<double>& data) {
        for (std::size_t l = 0; l < n_lags; ++l) {
            // log_distance validates positivity of the same values
            log_distance(model[l], data[l]);
            y.push_back(std::log(data[l]));
            y_hat.push_back(std::log(model[l]));
        }
    };
    push_logs(model_curve.m2, data_curve.m2);
    push_logs(model_curve.m4, data_curve.m4);
    double mean = 0.0;
    for (const double v : y) mean += v;
    mean /= static_cast<double>(n_points);
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < n_points; ++i) {
        const double r = y[i] - y_hat[i];
        const double c = y[i] - mean;
        ss_res += r * r;
        ss_tot += c * c;
    }
    if (ss_tot == 0.0) {
        if (ss_res == 0.0) return 1.0;
        throw std::domain_error(
            "non-scorable: data moments are constant across lags");
    }
    const double r2 = 1.0 - ss_res / ss_tot;
    const auto n = static_cast<double>(n_points);
    const auto p = static_cast<double>(n_params);
    return 1.0 - (1.0 - r2) * (n - 1.0) / (n - p - 1.0);
}

namespace detail {

SimplexResult nelder_mead(const std::function<double(const double*)>& f,
                          std::vector<double> start,
                          const std::vector<double>& lo,
                          const std::vector<double>& hi, int max_iters,
                          double f_tol, double x_tol) {
    const std::size_t dim = start.size();
    if (dim == 0 || lo.size() != dim || hi.size() != dim) {
        throw std::invalid_argument("dimension mismatch");
    }
    auto clamp = [&](std::vector<double>& x) {
        for (std::size_t d = 0; d < dim; ++d) {
            x[d] = std::min(std::max(x[d], lo[d]), hi[d]);
        }
    };
    auto safe_eval = [&](const std::vector<double>& x) {
        const double v = f(x.data());
        return std::isfinite(v) ? v : kInf;
    };

    clamp(start);
    std::vector<std::vector<double>> verts(dim + 1, start);
    for (std::size_t d = 0; d < dim; ++d) {
        double step = 0.10 * (hi[d] - lo[d]);
        if (verts[d + 1][d] + step > hi[d]) step = -step;
        verts[d + 1][d] += step;
        clamp(verts[d + 1]);
    }
    std::vector<double> fs(dim + 1);
    for (std::size_t i = 0; i <= dim; ++i) fs[i] = safe_eval(verts[i]);

    std::vector<std::size_t> order(dim + 1);
    auto sort_order = [&] {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return fs[a] != fs[b] ? fs[a] < fs[b] : a < b;
        });
    };

    SimplexResult result;
    result.best_trace.reserve(static_cast<std::size_t>(max_iters));
    std::vector<double> centroid(dim);
    std::vector<double> candidate(dim);
    std::vector<double> contracted(dim);
    int iter = 0;
    for (; iter < max_iters; ++iter) {
        sort_order();
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second_worst = order[dim - 1];

        if (fs[worst] - fs[best] <= f_tol) {
            result.converged = true;
            break;
        }
        double extent = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
            double mn = verts[0][d];
            double mx = verts[0][d];
            for (std::size_t i = 1; i <= dim; ++i) {
                mn = std::min(mn, verts[i][d]);
                mx = std::max(mx, verts[i][d]);
            }
            extent = std::max(extent, mx - mn);
        }
        if (extent <= x_tol) {
            result.converged = true;
            break;
        }

        for (std::size_t d = 0; d < dim; ++d) {
            double s = 0.0;
            for (std::size_t i = 0; i <= dim; ++i) {
                if (i != worst) s += verts[i][d];
            }
            centroid[d] = s / static_cast<double>(dim);
        }

        // Reflection
        for (std::size_t d = 0; d < dim; ++d) {
            candidate[d] = centroid[d] + (centroid[d] - verts[worst][d]);
        }
        clamp(candidate);
        const double f_reflect = safe_eval(candidate);

        bool shrink = false;
        if (f_reflect < fs[best]) {
            // Expansion
            std::vector<double>& expanded = contracted;
            for (std::size_t d = 0; d < dim; ++d) {
                expanded[d] = centroid[d] + 2.0 * (centroid[d] - verts[worst][d]);
            }
            clamp(expanded);
            const double f_expand = safe_eval(expanded);
            if (f_expand < f_reflect) {
                verts[worst] = expanded;
                fs[worst] = f_expand;
            } else {
                verts[worst] = candidate;
                fs[worst] = f_reflect;
            }
        } else if (f_reflect < fs[second_worst]) {
            verts[worst] = candidate;
            fs[worst] = f_reflect;
        } else if (f_reflect < fs[worst]) {
            // Outside contraction
            for (std::size_t d = 0; d < dim; ++d) {
                contracted[d] = centroid[d] + 0.5 * (candidate[d] - centroid[d]);
            }
            clamp(contracted);
            const double f_contract = safe_eval(contracted);
            if (f_contract <= f_reflect) {
                verts[worst] = contracted;
                fs[worst] = f_contract;
            } else {
                shrink = true;
            }
        } else {
            // Inside contraction
            for (std::size_t d = 0; d < dim; ++d) {
                contracted[d] =
                    verts[worst][d] + 0.5 * (centroid[d] - verts[worst][d]);
            }
            clamp(contracted);
            const double f_contract = safe_eval(contracted);
            if (f_contract < fs[worst]) {
                verts[worst] = contracted;
                fs[worst] = f_contract;
            } else {
                shrink = true;
            }
        }

        if (shrink) {
            for (std::size_t i = 0; i <= dim; ++i) {
                if (i == best) continue;
                for (std::size_t d = 0; d < dim; ++d) {
                    verts[i][d] = verts[best][d] + 0.5 * (verts[i][d] - verts[best][d]);
                }
                fs[i] = safe_eval(verts[i]);
            }
        }
        result.best_trace.push_back(*std::min_element(fs.begin(), fs.end()));
    }

    sort_order();
    result.best_x = verts[order.front()];
    result.best_f = fs[order.front()];
    result.iterations = iter;
    return result;
}

} // namespace detail

namespace {

// Common-random-numbers model-moment evaluator: all randomness is drawn once
// (per-member draw tables for the intermittent family, replayable flight
// sources for the Levy family) so the objective is an exact deterministic
// function of the parameters. Member seeding and the reduction order match
// model_moments exactly; evaluating the public function at the fitted
// parameters with the ensemble master seed reproduces the curve bit for bit.
class CrnEvaluator {
public:
    CrnEvaluator(ModelKind kind, const FitConfig& config, const DataMeta& meta,
                 const LagGrid& grid, std::vector<std::size_t> ks,
                 std::uint64_t master)
        : kind_(kind),
          n_steps_(meta.n_steps),
          dt_(meta.dt),
          ensemble_(static_cast<std::size_t>(config.ensemble_size)),
          fresh_per_eval_(config.fresh_ensemble_per_eval),
          master_(master),
          ks_(std::move(ks)) {
        workers_ = std::min<std::size_t>(
            static_cast<std::size_t>(config.n_workers), ensemble_);
        spaces_.resize(workers_);
        member_m2_.resize(ensemble_ * ks_.size());
        member_m4_.resize(ensemble_ * ks_.size());
        curve_.lags = grid;
        curve_.m2.resize(ks_.size());
        curve_.m4.resize(ks_.size());
        curve_.n_pairs.reserve(ks_.size());
        for (const std::size_t k : ks_) {
            curve_.n_pairs.push_back(
                static_cast<std::int64_t>(n_steps_ + 1 - k));
        }
        if (!fresh_per_eval_) seed_randomness(master_);
    }

    /// Model moments at log-parameters z; the reference stays valid until
    /// the next call.
    const MomentCurve& evaluate(const double* z) {
        if (fresh_per_eval_) {
            seed_randomness(derive_seed(master_, eval_count_++));
        }
        IsParams is_params;
        LwParams lw_params;
        if (kind_ == ModelKind::Intermittent) {
            is_params = IsParams{std::exp(z[0]), std::exp(z[1]),
                                 std::exp(z[2]), std::exp(z[3])};
        } else {
            lw_params = LwParams{std::exp(z[0]), std::exp(z[1]), std::exp(z[2])};
        }
        const std::size_t n_lags = ks_.size();
        detail::for_each_index(
            ensemble_, static_cast<int>(workers_),
            [&](std::size_t worker, std::size_t j) {
                Workspace& ws = spaces_[worker];
                ws.xs.resize(n_steps_ + 1);
                ws.ys.resize(n_steps_ + 1);
                if (kind_ == ModelKind::Intermittent) {
                    detail::simulate_intermittent_into(
                        is_params, is_tables_[j], dt_, std::nullopt,
                        ws.xs.data(), ws.ys.data());
                } else {
                    lw_sources_[j].rewind();
                    detail::simulate_levy_into(lw_params, n_steps_, dt_,
                                               lw_sources_[j], ws.xs.data(),
                                               ws.ys.data());
                }
                detail::path_moments(ws.xs.data(), ws.ys.data(), n_steps_ + 1,
                                     ks_, dt_, member_m2_.data() + j * n_lags,
                                     member_m4_.data() + j * n_lags);
            });
        std::fill(curve_.m2.begin(), curve_.m2.end(), 0.0);
        std::fill(curve_.m4.begin(), curve_.m4.end(), 0.0);
        for (std::size_t j = 0; j < ensemble_; ++j) {
            for (std::size_t l = 0; l < n_lags; ++l) {
                curve_.m2[l] += member_m2_[j * n_lags + l];
                curve_.m4[l] += member_m4_[j * n_lags + l];
            }
        }
        const auto scale = static_cast<double>(ensemble_);
        for (std::size_t l = 0; l < n_lags; ++l) {
            curve_.m2[l] /= scale;
            curve_.m4[l] /= scale;
        }
        return curve_;
    }

private:
    struct Workspace {
        std::vector<double> xs, ys;
    };

    void seed_randomness(std::uint64_t master) {
        if (kind_ == ModelKind::Intermittent) {
            is_tables_.resize(ensemble_);
            detail::for_each_index(ensemble_, static_cast<int>(workers_),
                                   [&](std::size_t, std::size_t j) {
                                       RandomStream stream =
                                           RandomStream::substream(master, j);
                                       is_tables_[j].fill(stream, n_steps_);
                                   });
        } else {
            lw_sources_.clear();
            lw_sources_.reserve(ensemble_);
            for (std::size_t j = 0; j < ensemble_; ++j) {
                lw_sources_.emplace_back(derive_seed(master, j));
            }
        }
    }

    ModelKind kind_;
    std::size_t n_steps_;
    double dt_;
    std::size_t ensemble_;
    bool fresh_per_eval_;
    std::uint64_t master_;
    std::uint64_t eval_count_ = 0;
    std::vector<std::size_t> ks_;
    std::size_t workers_;
    std::vector<Workspace> spaces_;
    std::vector<detail::IsDrawTable> is_tables_;
    std::vector<detail::CachedFlightSource> lw_sources_;
    std::vector<double> member_m2_, member_m4_;
    MomentCurve curve_;
};

} // namespace

FitReport fit_model(ModelKind kind, const MomentCurve& data_curve,
                    const DataMeta& meta, const FitConfig& config,
                    std::uint64_t seed) {
    config.validate();
    if (meta.n_steps < 1) {
        throw std::invalid_argument("data_meta.n_steps must be >= 1");
    }
    const std::size_t n_lags = data_curve.lags.size();
    if (data_curve.m2.size() != n_lags || data_curve.m4.size() != n_lags) {
        throw std::invalid_argument("moment arrays do not match the lag grid");
    }
    for (std::size_t l = 0; l < n_lags; ++l) {
        if (!(data_curve.m2[l] > 0.0) || !std::isfinite(data_curve.m2[l]) ||
            !(data_curve.m4[l] > 0.0) || !std::isfinite(data_curve.m4[l])) {
            throw std::invalid_argument(
                "data moments must be strictly positive and finite");
        }
    }
    auto ks = data_curve.lags.steps_for(meta.dt);
    for (const std::size_t k : ks) {
        if (k >= meta.n_steps) {
            throw std::invalid_argument(
                "lag must be shorter than the trajectory duration");
        }
    }

    const std::size_t dim = kind == ModelKind::Intermittent ? 4 : 3;
    std::vector<double> lo(dim);
    std::vector<double> hi(dim);
    if (kind == ModelKind::Intermittent) {
        const auto bounds = config.is_bounds.value_or(default_is_bounds(meta.dt));
        for (std::size_t d = 0; d < dim; ++d) {
            lo[d] = std::log(bounds[d].lo);
            hi[d] = std::log(bounds[d].hi);
        }
    } else {
        const auto bounds = config.lw_bounds.value_or(default_lw_bounds(meta.dt));
        for (std::size_t d = 0; d < dim; ++d) {
            lo[d] = std::log(bounds[d].lo);
            hi[d] = std::log(bounds[d].hi);
        }
    }

    const std::uint64_t ensemble_master =
        config.ensemble_seed ? *config.ensemble_seed : derive_seed(seed, 1);
    CrnEvaluator evaluator(kind, config, meta, data_curve.lags, ks,
                           ensemble_master);
    auto f = [&](const double* z) {
        return objective(evaluator.evaluate(z), data_curve);
    };

    RandomStream starts_stream(derive_seed(seed, 0));
    bool have_best = false;
    detail::SimplexResult best;
    int n_converged = 0;
    for (int s = 0; s < config.n_starts; ++s) {
        std::vector<double> start(dim);
        for (std::size_t d = 0; d < dim; ++d) {
            start[d] = starts_stream.next_uniform(lo[d], hi[d]);
        }
        detail::SimplexResult res =
            detail::nelder_mead(f, std::move(start), lo, hi, config.max_iters,
                                config.tolerance, config.param_tolerance);
        if (res.converged) ++n_converged;
        if (std::isfinite(res.best_f) && (!have_best || res.best_f < best.best_f)) {
            best = std::move(res);
            have_best = true;
        }
    }
    if (!have_best) {
        throw FitError("no start produced a finite objective");
    }

    FitReport report;
    report.model = kind;
    if (kind == ModelKind::Intermittent) {
        report.params = IsParams{std::exp(best.best_x[0]), std::exp(best.best_x[1]),
                                 std::exp(best.best_x[2]), std::exp(best.best_x[3])};
    } else {
        report.params = LwParams{std::exp(best.best_x[0]), std::exp(best.best_x[1]),
                                 std::exp(best.best_x[2])};
    }
    report.objective = best.best_f;
    const MomentCurve& final_curve = evaluator.evaluate(best.best_x.data());
    report.per_lag_d2.reserve(n_lags);
    report.per_lag_d4.reserve(n_lags);
    for (std::size_t l = 0; l < n_lags; ++l) {
        report.per_lag_d2.push_back(log_distance(final_curve.m2[l], data_curve.m2[l]));
        report.per_lag_d4.push_back(log_distance(final_curve.m4[l], data_curve.m4[l]));
    }
    report.r2_adjusted = adjusted_r2(final_curve, data_curve, dim);
    report.n_starts_converged = n_converged;
    report.config_echo = config;
    return report;
}

} // namespace walkfit
