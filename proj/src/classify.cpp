#include "walkfit/classify.hpp"

#include "walkfit/rng.hpp"

#include <cmath>
#include <utility>

namespace walkfit {

double gamma_score(double r2_is, double r2_lw) {
    if (!std::isfinite(r2_is) || !std::isfinite(r2_lw)) {
        throw std::domain_error("adjusted R^2 values must be finite");
    }
    return r2_is - r2_lw;
}

ModelKind label_for(double gamma) {
    return gamma > 0.0 ? ModelKind::Intermittent : ModelKind::Levy;
}

ClassificationReport classify_trajectory(const Trajectory& traj,
                                         const LagGrid& grid,
                                         const FitConfig& config,
                                         std::uint64_t seed) {
    traj.validate();
    config.validate();
    const MomentCurve curve = empirical_moments(traj, grid);
    const DataMeta meta{traj.dt, traj.n_steps()};

    std::shared_ptr<const FitReport> fit_is;
    try {
        fit_is = std::make_shared<const FitReport>(fit_model(
            ModelKind::Intermittent, curve, meta, config, derive_seed(seed, 0)));
    } catch (const std::exception& e) {
        throw ClassifyError(std::string("intermittent fit failed: ") + e.what(),
                            nullptr, nullptr);
    }
    std::shared_ptr<const FitReport> fit_lw;
    try {
        fit_lw = std::make_shared<const FitReport>(fit_model(
            ModelKind::Levy, curve, meta, config, derive_seed(seed, 1)));
    } catch (const std::exception& e) {
        throw ClassifyError(std::string("levy fit failed: ") + e.what(),
                            std::move(fit_is), nullptr);
    }

    ClassificationReport report;
    report.gamma = gamma_score(fit_is->r2_adjusted, fit_lw->r2_adjusted);
    report.label = label_for(report.gamma);
    report.fit_is = *fit_is;
    report.fit_lw = *fit_lw;
    report.data_curve = curve;
    return report;
}

} // namespace walkfit
