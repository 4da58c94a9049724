#include "walkfit/types.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace walkfit {

namespace {

void require_finite(double value, const char* name) {
    if (!std::isfinite(value)) {
        throw std::invalid_argument(std::string(name) + " must be finite");
    }
}

void require_positive(double value, const char* name) {
    require_finite(value, name);
    if (value <= 0.0) {
        throw std::invalid_argument(std::string(name) + " must be positive");
    }
}

void require_non_negative(double value, const char* name) {
    require_finite(value, name);
    if (value < 0.0) {
        throw std::invalid_argument(std::string(name) + " must be non-negative");
    }
}

} // namespace

void IsParams::validate() const {
    require_non_negative(diffusion_coeff, "diffusion_coeff");
    require_non_negative(ballistic_speed, "ballistic_speed");
    require_non_negative(rate_bd, "rate_bd");
    require_non_negative(rate_db, "rate_db");
    if (diffusion_coeff == 0.0 && ballistic_speed == 0.0) {
        throw std::invalid_argument(
            "diffusion_coeff and ballistic_speed cannot both be zero");
    }
}

double IsParams::stationary_ballistic() const {
    const double total = rate_bd + rate_db;
    // Both rates zero: no stationary distribution exists; callers must
    // supply an explicit initial phase before this matters.
    if (total == 0.0) return 0.5;
    return rate_db / total;
}

void LwParams::validate() const {
    require_positive(tau0, "tau0");
    require_positive(levy_exponent, "levy_exponent");
    require_positive(speed, "speed");
}

void StepLenParams::validate() const {
    require_positive(l_min, "l_min");
    require_finite(nu, "nu");
    if (nu <= 1.0 || nu >= 2.0) {
        throw std::invalid_argument("nu must lie in (1, 2)");
    }
}

void Trajectory::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("dt must be positive and finite");
    }
    if (xs.size() != ys.size()) {
        throw std::invalid_argument("xs and ys must have equal length");
    }
    if (xs.size() < 2) {
        throw std::invalid_argument("trajectory needs at least two positions");
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) {
            throw std::invalid_argument("coordinates must be finite");
        }
    }
}

ModelKind kind_of(const ModelParams& params) {
    return std::holds_alternative<IsParams>(params) ? ModelKind::Intermittent
                                                    : ModelKind::Levy;
}

} // namespace walkfit
