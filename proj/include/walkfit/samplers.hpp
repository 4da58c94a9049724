#pragma once

#include "walkfit/types.hpp"

namespace walkfit {

/// Inverse-CDF sample of the Lomax flight-time law
/// psi(tau) = gamma * tau0^gamma / (tau + tau0)^(gamma + 1).
///
/// `u` is interpreted as the survival probability, so
/// tau = tau0 * (u^(-1/gamma) - 1) and small u gives long flights.
/// Throws std::domain_error if u is outside (0, 1) or the result overflows.
double sample_flight_time(const LwParams& params, double u);

/// Inverse-CDF sample of the Pareto step-length law
/// p(l) = nu * l_min^nu / l^(nu+1): l = l_min * u^(-1/nu).
///
/// Same `u` convention and error behavior as sample_flight_time.
double sample_step_length(const StepLenParams& params, double u);

} // namespace walkfit
