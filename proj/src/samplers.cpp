#include "walkfit/samplers.hpp"

#include <cmath>
#include <stdexcept>

namespace walkfit {

namespace {

void require_unit_open(double u) {
    if (!(u > 0.0) || !(u < 1.0)) {
        throw std::domain_error("u must lie strictly in (0, 1)");
    }
}

} // namespace

double sample_flight_time(const LwParams& params, double u) {
    params.validate();
    require_unit_open(u);
    const double tau =
        params.tau0 * (std::pow(u, -1.0 / params.levy_exponent) - 1.0);
    if (!std::isfinite(tau)) {
        throw std::domain_error("flight time overflowed");
    }
    return tau;
}

double sample_step_length(const StepLenParams& params, double u) {
    params.validate();
    require_unit_open(u);
    const double l = params.l_min * std::pow(u, -1.0 / params.nu);
    if (!std::isfinite(l)) {
        throw std::domain_error("step length overflowed");
    }
    return l;
}

} // namespace walkfit
