#include "doctest.h"

#include "walkfit/rng.hpp"
#include "walkfit/samplers.hpp"

#include <cmath>
#include <stdexcept>

using namespace walkfit;

namespace {
double lomax_cdf(double tau, double tau0, double gamma) {
    return 1.0 - std::pow(tau0 / (tau + tau0), gamma);
}
} // namespace

TEST_CASE("flight time inverts its own survival function") {
    // Median of the gamma = 1 distribution sits exactly at tau0.
    CHECK(sample_flight_time({1.0, 1.0, 1.0}, 0.5) == doctest::Approx(1.0).epsilon(1e-12));

    const double combos[][3] = {
        {1.0, 1.0, 0.5}, {2.0, 1.5, 0.3}, {0.5, 3.0, 0.9}, {2.0, 0.8, 0.123}, {0.5, 3.0, 0.999}};
    for (const auto& c : combos) {
        LwParams p{c[0], c[1], 1.0};
        const double tau = sample_flight_time(p, c[2]);
        CHECK(tau > 0.0);
        // sample_flight_time treats u as survival probability.
        CHECK(lomax_cdf(tau, p.tau0, p.levy_exponent)
              == doctest::Approx(1.0 - c[2]).epsilon(1e-10));
    }
}

TEST_CASE("flight time edge behaviour") {
    // u near one means almost-certain survival to only a tiny time.
    const double tiny = sample_flight_time({1.0, 1.0, 1.0}, 1.0 - 1e-12);
    CHECK(tiny > 0.0);
    CHECK(tiny < 1e-9);
    // u near zero produces very long flights without overflowing.
    const double huge = sample_flight_time({1.0, 0.5, 1.0}, 1e-12);
    CHECK(std::isfinite(huge));
    CHECK(huge > 1e20);
}

TEST_CASE("flight time rejects out-of-range arguments") {
    LwParams p{1.0, 1.5, 1.0};
    CHECK_THROWS_AS(sample_flight_time(p, 0.0), std::domain_error);
    CHECK_THROWS_AS(sample_flight_time(p, 1.0), std::domain_error);
    CHECK_THROWS_AS(sample_flight_time(p, -0.5), std::domain_error);
    CHECK_THROWS_AS(sample_flight_time({0.0, 1.5, 1.0}, 0.5), std::invalid_argument);
}

TEST_CASE("flight time mean matches tau0/(gamma-1) when it exists") {
    LwParams p{1.0, 3.0, 1.0};
    RandomStream s(31415);
    double sum = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i)
        sum += sample_flight_time(p, s.next_unit());
    CHECK(std::abs(sum / n - 0.5) / 0.5 < 0.01);
}

TEST_CASE("step length inverts its tail function") {
    // Median of the nu = 1.5 distribution: l_min * 2^(2/3).
    CHECK(sample_step_length({1.0, 1.5}, 0.5)
          == doctest::Approx(1.5874010519681994).epsilon(1e-12));
    CHECK(sample_step_length({2.0, 1.5}, 0.5)
          == doctest::Approx(2.0 * 1.5874010519681994).epsilon(1e-12));

    StepLenParams p{0.7, 1.2};
    RandomStream s(7);
    for (int i = 0; i < 10000; ++i) {
        const double u = s.next_unit();
        const double l = sample_step_length(p, u);
        CHECK(l >= p.l_min);
        // Tail identity: P(L > l) = (l_min/l)^nu = u.
        CHECK(std::pow(p.l_min / l, p.nu) == doctest::Approx(u).epsilon(1e-9));
    }
}

TEST_CASE("step length tail frequency beyond ten minima") {
    StepLenParams p{1.0, 1.5};
    RandomStream s(271828);
    const int n = 1000000;
    int beyond = 0;
    for (int i = 0; i < n; ++i)
        if (sample_step_length(p, s.next_unit()) > 10.0)
            ++beyond;
    const double frac = static_cast<double>(beyond) / n;
    CHECK(std::abs(frac - 0.03162277660168379) / 0.03162277660168379 < 0.10);
}

TEST_CASE("step length rejects out-of-range arguments") {
    StepLenParams p{1.0, 1.5};
    CHECK_THROWS_AS(sample_step_length(p, 0.0), std::domain_error);
    CHECK_THROWS_AS(sample_step_length(p, 1.0), std::domain_error);
    CHECK_THROWS_AS(sample_step_length({1.0, 2.5}, 0.5), std::invalid_argument);
}
