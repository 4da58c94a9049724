#pragma once

#include "walkfit/fit.hpp"
#include "walkfit/moments.hpp"
#include "walkfit/types.hpp"

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>

namespace walkfit {

/// Outcome of the full pipeline: empirical moments, both family fits, and
/// the decision score gamma = r2_is - r2_lw. label is Intermittent iff
/// gamma > 0, Levy otherwise (ties favor Levy).
struct ClassificationReport {
    double gamma = 0.0;
    ModelKind label = ModelKind::Levy;
    FitReport fit_is;
    FitReport fit_lw;
    MomentCurve data_curve;
};

/// gamma = r2_is - r2_lw. Throws std::domain_error on non-finite input.
double gamma_score(double r2_is, double r2_lw);

/// The sign rule: Intermittent iff gamma > 0.
ModelKind label_for(double gamma);

/// Raised when either family fit fails; carries whatever reports completed.
class ClassifyError : public std::runtime_error {
public:
    ClassifyError(const std::string& what,
                  std::shared_ptr<const FitReport> partial_is,
                  std::shared_ptr<const FitReport> partial_lw)
        : std::runtime_error(what),
          partial_is_(std::move(partial_is)),
          partial_lw_(std::move(partial_lw)) {}

    const FitReport* partial_fit_is() const noexcept { return partial_is_.get(); }
    const FitReport* partial_fit_lw() const noexcept { return partial_lw_.get(); }

private:
    std::shared_ptr<const FitReport> partial_is_;
    std::shared_ptr<const FitReport> partial_lw_;
};

/// Computes the trajectory's empirical moments on `grid`, fits both model
/// families to the shared curve with independent optimizer seeds
/// (derive_seed(seed, 0) for the intermittent fit, derive_seed(seed, 1) for
/// the Levy fit), and classifies by the sign of gamma. Deterministic.
ClassificationReport classify_trajectory(const Trajectory& traj,
                                         const LagGrid& grid,
                                         const FitConfig& config,
                                         std::uint64_t seed);

} // namespace walkfit
