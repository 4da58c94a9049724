#include "doctest.h"

#include "walkfit/rng.hpp"
#include "walkfit/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

using namespace walkfit;

namespace {

double step_norm(const Trajectory& t, std::size_t i) {
    const double dx = t.xs[i + 1] - t.xs[i];
    const double dy = t.ys[i + 1] - t.ys[i];
    return std::hypot(dx, dy);
}

// Positions are stored as absolute doubles, so a displacement reconstructed
// from them carries rounding noise at the coordinate scale; any bound check
// must allow a few ulps of that scale.
double coord_slack(double a, double b, double c, double d, double floor_scale) {
    const double scale = std::max(
        {std::abs(a), std::abs(b), std::abs(c), std::abs(d), floor_scale});
    return 4.0 * (std::nextafter(scale, std::numeric_limits<double>::infinity()) -
                  scale);
}

// Straight-line re-implementation of the intermittent stepping rule, drawing
// from the stream in the documented order. Guards the draw layout that the
// common-random-numbers machinery depends on.
Trajectory reference_intermittent(const IsParams& p, std::size_t n_steps, double dt,
                                  std::uint64_t seed,
                                  std::optional<PhaseLabel> initial_phase) {
    RandomStream stream(seed);
    Trajectory out;
    out.dt = dt;
    out.xs.assign(n_steps + 1, 0.0);
    out.ys.assign(n_steps + 1, 0.0);

    const double u_phase0 = stream.next_unit();
    const double u_heading0 = stream.next_unit();
    bool ballistic = initial_phase ? *initial_phase == PhaseLabel::Ballistic
                                   : u_phase0 < p.stationary_ballistic();
    double angle = 2.0 * RandomStream::kPi * u_heading0;
    double hx = std::cos(angle), hy = std::sin(angle);
    const double p_bd = 1.0 - std::exp(-p.rate_bd * dt);
    const double p_db = 1.0 - std::exp(-p.rate_db * dt);
    const double sdt = std::sqrt(dt);
    double x = 0.0, y = 0.0;
    for (std::size_t i = 0; i < n_steps; ++i) {
        const double u_switch = stream.next_unit();
        const auto [gx, gy] = stream.next_normal_pair();
        const double u_heading = stream.next_unit();
        if (ballistic) {
            if (u_switch < p_bd) ballistic = false;
        } else {
            if (u_switch < p_db) {
                ballistic = true;
                angle = 2.0 * RandomStream::kPi * u_heading;
                hx = std::cos(angle);
                hy = std::sin(angle);
            }
        }
        if (ballistic) {
            x += p.ballistic_speed * dt * hx;
            y += p.ballistic_speed * dt * hy;
        } else {
            x += p.diffusion_coeff * gx * sdt;
            y += p.diffusion_coeff * gy * sdt;
        }
        out.xs[i + 1] = x;
        out.ys[i + 1] = y;
    }
    return out;
}

} // namespace

TEST_CASE("intermittent output shape and origin") {
    IsParams p{1.0, 2.0, 0.05, 0.05};
    const auto t = simulate_intermittent(p, 5, 0.5, 42);
    CHECK(t.xs.size() == 6);
    CHECK(t.ys.size() == 6);
    CHECK(t.xs[0] == 0.0);
    CHECK(t.ys[0] == 0.0);
    CHECK(t.dt == 0.5);
    CHECK_NOTHROW(t.validate());
}

TEST_CASE("intermittent runs are reproducible") {
    IsParams p{0.7, 1.3, 0.1, 0.2};
    const auto a = simulate_intermittent(p, 400, 0.5, 99);
    const auto b = simulate_intermittent(p, 400, 0.5, 99);
    CHECK(a.xs == b.xs);
    CHECK(a.ys == b.ys);
    const auto c = simulate_intermittent(p, 400, 0.5, 100);
    CHECK(a.xs != c.xs);
}

TEST_CASE("intermittent matches the documented draw layout") {
    const double dts[] = {1.0, 0.3};
    const IsParams sets[] = {
        {1.0, 2.0, 0.05, 0.05}, {0.5, 3.0, 0.3, 0.1}, {1.0, 0.0, 0.0, 0.0},
        {0.0, 2.0, 0.0, 0.0},
    };
    for (const double dt : dts) {
        for (const auto& p : sets) {
            std::optional<PhaseLabel> phase;
            if (p.rate_bd == 0.0 && p.rate_db == 0.0)
                phase = p.ballistic_speed > 0.0 ? PhaseLabel::Ballistic
                                                : PhaseLabel::Diffusive;
            const auto got = simulate_intermittent(p, 200, dt, 1234, phase);
            const auto want = reference_intermittent(p, 200, dt, 1234, phase);
            CHECK(got.xs == want.xs);
            CHECK(got.ys == want.ys);
        }
    }
}

TEST_CASE("intermittent validates its inputs") {
    IsParams p{1.0, 2.0, 0.0, 0.0};
    CHECK_THROWS_AS(simulate_intermittent(p, 100, 1.0, 1), std::invalid_argument);
    CHECK_NOTHROW(simulate_intermittent(p, 100, 1.0, 1, PhaseLabel::Ballistic));
    IsParams q{1.0, 2.0, 0.05, 0.05};
    CHECK_THROWS_AS(simulate_intermittent(q, 0, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(simulate_intermittent(q, 100, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(simulate_intermittent(q, 100, -1.0, 1), std::invalid_argument);
    q.diffusion_coeff = -1.0;
    CHECK_THROWS_AS(simulate_intermittent(q, 100, 1.0, 1), std::invalid_argument);
}

TEST_CASE("pure ballistic walk moves in a fixed direction at fixed speed") {
    IsParams p{0.0, 1.0, 0.0, 0.0};
    const auto t = simulate_intermittent(p, 1000, 0.1, 7, PhaseLabel::Ballistic);
    const double dx0 = t.xs[1] - t.xs[0];
    const double dy0 = t.ys[1] - t.ys[0];
    for (std::size_t i = 0; i < 1000; ++i) {
        CHECK(step_norm(t, i) == doctest::Approx(0.1).epsilon(1e-12));
        CHECK(t.xs[i + 1] - t.xs[i] == doctest::Approx(dx0).epsilon(1e-9));
        CHECK(t.ys[i + 1] - t.ys[i] == doctest::Approx(dy0).epsilon(1e-9));
    }
}

TEST_CASE("pure diffusive increments have the right variance and no memory") {
    IsParams p{1.0, 0.0, 0.0, 0.0};
    const std::size_t n = 100000;

    for (const double dt : {1.0, 0.25}) {
        const auto t = simulate_intermittent(p, n, dt, 2718, PhaseLabel::Diffusive);
        double sum = 0.0, sum2 = 0.0, cross = 0.0;
        double prev = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double dx = t.xs[i + 1] - t.xs[i];
            sum += dx;
            sum2 += dx * dx;
            if (i > 0) cross += dx * prev;
            prev = dx;
        }
        const double mean = sum / n;
        const double var = sum2 / n - mean * mean;
        // Per-axis increment variance D^2 dt.
        CHECK(std::abs(var - p.diffusion_coeff * p.diffusion_coeff * dt)
              / (p.diffusion_coeff * p.diffusion_coeff * dt) < 0.03);
        const double autocorr = (cross / (n - 1) - mean * mean) / var;
        CHECK(std::abs(autocorr) < 0.01);
    }
}

TEST_CASE("switching occupancy matches the stationary split") {
    IsParams p{0.5, 3.0, 0.1, 0.1};
    const std::size_t n = 1000000;
    const double dt = 1.0;
    const auto t = simulate_intermittent(p, n, dt, 5150);
    std::size_t ballistic_steps = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(step_norm(t, i) - p.ballistic_speed * dt) < 1e-9)
            ++ballistic_steps;
    }
    const double frac = static_cast<double>(ballistic_steps) / n;
    CHECK(frac > 0.48);
    CHECK(frac < 0.52);
}

TEST_CASE("initial phase is drawn from the stationary distribution") {
    IsParams p{1.0, 2.0, 0.1, 0.3}; // pi_B = 0.75
    const int trials = 2000;
    int ballistic_first = 0;
    for (int s = 0; s < trials; ++s) {
        const auto t = simulate_intermittent(p, 1, 1.0, 40000 + s);
        if (std::abs(step_norm(t, 0) - 2.0) < 1e-9) ++ballistic_first;
    }
    const double frac = static_cast<double>(ballistic_first) / trials;
    CHECK(std::abs(frac - 0.75) < 0.03);
}

TEST_CASE("a zero rate pins the walk to one phase") {
    SUBCASE("never leaves ballistic") {
        IsParams p{1.0, 2.0, 0.0, 0.5};
        for (int s = 0; s < 50; ++s) {
            const auto t = simulate_intermittent(p, 200, 1.0, 600 + s);
            for (std::size_t i = 0; i < 200; ++i)
                CHECK(step_norm(t, i) == doctest::Approx(2.0).epsilon(1e-12));
        }
    }
    SUBCASE("never leaves diffusive") {
        IsParams p{1.0, 2.0, 0.5, 0.0};
        for (int s = 0; s < 50; ++s) {
            const auto t = simulate_intermittent(p, 200, 1.0, 700 + s);
            std::size_t ballistic = 0;
            for (std::size_t i = 0; i < 200; ++i)
                if (std::abs(step_norm(t, i) - 2.0) < 1e-9) ++ballistic;
            CHECK(ballistic == 0);
        }
    }
}

TEST_CASE("explicit initial phase overrides the stationary draw") {
    IsParams p{1.0, 2.0, 1e-9, 1e-9}; // switching essentially off
    const auto b = simulate_intermittent(p, 10, 1.0, 3, PhaseLabel::Ballistic);
    for (std::size_t i = 0; i < 10; ++i)
        CHECK(step_norm(b, i) == doctest::Approx(2.0).epsilon(1e-12));
    const auto d = simulate_intermittent(p, 10, 1.0, 3, PhaseLabel::Diffusive);
    for (std::size_t i = 0; i < 10; ++i)
        CHECK(std::abs(step_norm(d, i) - 2.0) > 1e-6);
}

TEST_CASE("levy output shape, origin, and reproducibility") {
    LwParams p{1.0, 1.5, 2.0};
    const auto a = simulate_levy(p, 300, 0.5, 11);
    CHECK(a.xs.size() == 301);
    CHECK(a.xs[0] == 0.0);
    CHECK(a.ys[0] == 0.0);
    CHECK_NOTHROW(a.validate());
    const auto b = simulate_levy(p, 300, 0.5, 11);
    CHECK(a.xs == b.xs);
    CHECK(a.ys == b.ys);
    const auto c = simulate_levy(p, 300, 0.5, 12);
    CHECK(a.xs != c.xs);
}

TEST_CASE("levy validates its inputs") {
    LwParams p{1.0, 1.5, 2.0};
    CHECK_THROWS_AS(simulate_levy(p, 0, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(simulate_levy(p, 10, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(simulate_levy({0.0, 1.5, 2.0}, 10, 1.0, 1), std::invalid_argument);
}

TEST_CASE("levy grid displacements never exceed the flight speed") {
    LwParams p{2.0, 1.2, 1.7};
    const double bound = p.speed * 0.5;
    for (int s = 0; s < 100; ++s) {
        const auto t = simulate_levy(p, 500, 0.5, 9000 + s);
        for (std::size_t i = 0; i < 500; ++i) {
            const double slack =
                coord_slack(t.xs[i], t.xs[i + 1], t.ys[i], t.ys[i + 1], bound);
            CHECK(step_norm(t, i) <= bound + slack);
        }
    }
}

TEST_CASE("a flight longer than the whole window gives a straight line") {
    LwParams p{1e9, 3.0, 1.5};
    // With tau0 huge the first flight almost surely covers all n*dt.
    const auto t = simulate_levy(p, 100, 1.0, 4);
    const double dx0 = t.xs[1] - t.xs[0];
    const double dy0 = t.ys[1] - t.ys[0];
    CHECK(std::hypot(dx0, dy0) == doctest::Approx(1.5).epsilon(1e-12));
    for (std::size_t i = 0; i < 100; ++i) {
        CHECK(t.xs[i + 1] - t.xs[i] == doctest::Approx(dx0).epsilon(1e-9));
        CHECK(t.ys[i + 1] - t.ys[i] == doctest::Approx(dy0).epsilon(1e-9));
    }
}

TEST_CASE("turn counting matches the renewal rate and the speed bound") {
    LwParams p{1.0, 3.0, 1.0}; // mean flight 0.5, so about 2 turns per unit time
    const double dt = 1.0;
    const std::size_t n = 200;
    double total_turns = 0.0;
    for (int s = 0; s < 200; ++s) {
        RandomStream stream(derive_seed(31337, static_cast<std::uint64_t>(s)));
        detail::StreamFlightSource source(stream);
        std::vector<double> xs(n + 1), ys(n + 1);
        std::vector<std::int32_t> turns;
        detail::simulate_levy_into(p, n, dt, source, xs.data(), ys.data(), &turns);
        for (std::size_t i = 0; i < n; ++i) {
            total_turns += turns[i];
            const double norm = std::hypot(xs[i + 1] - xs[i], ys[i + 1] - ys[i]);
            const double slack =
                coord_slack(xs[i], xs[i + 1], ys[i], ys[i + 1], p.speed * dt);
            if (turns[i] == 0) {
                // No turn inside the step: the displacement saturates the bound.
                CHECK(std::abs(norm - p.speed * dt) <= slack);
            } else {
                CHECK(norm <= p.speed * dt + slack);
            }
        }
    }
    const double mean_turns = total_turns / 200.0;
    const double expected = n * dt * (p.levy_exponent - 1.0) / p.tau0;
    CHECK(std::abs(mean_turns - expected) / expected < 0.10);
}

TEST_CASE("cached flight source replays the same draws after rewind") {
    detail::CachedFlightSource cached(808);
    std::vector<std::pair<double, double>> first;
    for (int i = 0; i < 50; ++i) first.push_back(cached.next());
    cached.rewind();
    for (int i = 0; i < 30; ++i) CHECK(cached.next() == first[i]);
    cached.rewind();
    for (int i = 0; i < 50; ++i) CHECK(cached.next() == first[i]);
    // And it serves fresh draws past the cached prefix.
    const auto extra = cached.next();
    cached.rewind();
    for (int i = 0; i < 50; ++i) cached.next();
    CHECK(cached.next() == extra);
}

TEST_CASE("cached and streaming flight sources agree") {
    LwParams p{1.0, 1.5, 2.0};
    const std::size_t n = 400;
    std::vector<double> xs_a(n + 1), ys_a(n + 1), xs_b(n + 1), ys_b(n + 1);
    RandomStream stream(321);
    detail::StreamFlightSource streaming(stream);
    detail::simulate_levy_into(p, n, 0.5, streaming, xs_a.data(), ys_a.data());
    detail::CachedFlightSource cached(321);
    detail::simulate_levy_into(p, n, 0.5, cached, xs_b.data(), ys_b.data());
    CHECK(xs_a == xs_b);
    CHECK(ys_a == ys_b);
}

TEST_CASE("replays through a cached source are parameter-stable") {
    // Evaluating other parameters in between must not disturb a replay.
    LwParams a{1.0, 1.5, 2.0};
    LwParams b{4.0, 0.9, 0.7};
    const std::size_t n = 300;
    detail::CachedFlightSource source(606);
    std::vector<double> x1(n + 1), y1(n + 1), x2(n + 1), y2(n + 1), xb(n + 1), yb(n + 1);
    source.rewind();
    detail::simulate_levy_into(a, n, 1.0, source, x1.data(), y1.data());
    source.rewind();
    detail::simulate_levy_into(b, n, 1.0, source, xb.data(), yb.data());
    source.rewind();
    detail::simulate_levy_into(a, n, 1.0, source, x2.data(), y2.data());
    CHECK(x1 == x2);
    CHECK(y1 == y2);
    CHECK(x1 != xb);
}

TEST_CASE("public levy wrapper equals the cached-source path") {
    LwParams p{2.0, 1.1, 1.3};
    const auto t = simulate_levy(p, 250, 0.5, 414);
    detail::CachedFlightSource source(414);
    std::vector<double> xs(251), ys(251);
    detail::simulate_levy_into(p, 250, 0.5, source, xs.data(), ys.data());
    CHECK(t.xs == xs);
    CHECK(t.ys == ys);
}
