#include "doctest.h"

#include <cmath>
#include <limits>

#include "core/closed_form.hpp"
#include "core/errors.hpp"
#include "core/integrate.hpp"
#include "core/modes.hpp"
#include "core/rng.hpp"
#include "support.hpp"

using namespace epochdd;
using namespace epochdd::closed_form;

namespace {

ModeParams figure_defaults(double gamma, double eta, double rho) {
    ModeParams m;
    m.lambda = 1.0;
    m.sigma = 2.5;
    if (eta > 0.0) {
        m.eta_a = m.eta_b = eta;
    } else {
        m.eta_a = 0.0;
        m.eta_b = 1.0;
    }
    m.gamma = gamma;
    m.z0 = 0.01;
    m.rho = rho;
    return m;
}

}  // namespace

TEST_CASE("constant_C") {
    SUBCASE("one-layer value") {
        ModeParams m = figure_defaults(0.005, 0.0, 0.5);
        // eta = 0 collapses C to 2 gamma^2 lambda / (lambda (sigma - lambda z0)).
        double expected = 2.0 * 0.005 * 0.005 / (2.5 - 0.01);
        CHECK(constant_C(m) == doctest::Approx(expected).epsilon(1e-12));
    }
    SUBCASE("gamma = 0 collapses the radical") {
        ModeParams m = figure_defaults(0.0, 0.005, 0.5);
        double expected = 8.0 * 0.005 * 0.005 * 2.5 * 0.01 /
                          (1.0 * (2.5 - 1.0 * 0.01));
        CHECK(constant_C(m) == doctest::Approx(expected).epsilon(1e-12));
    }
    SUBCASE("z0 at the global minimum is outside the branch") {
        ModeParams m = figure_defaults(0.005, 0.0, 0.0);
        m.z0 = 2.5;
        CHECK_THROWS_AS((void)constant_C(m), Error);
    }
}

TEST_CASE("z_general reproduces the initial value exactly") {
    Rng rng(3);
    for (int i = 0; i < 30; ++i) {
        ModeParams m = testsup::random_valid_mode(rng);
        CHECK(std::fabs(z_general(m, 0.0) - m.z0) <= 1e-12);
    }
}

TEST_CASE("z_general matches the integrated flow") {
    SUBCASE("balanced dynamics at t = 100") {
        ModeParams m = figure_defaults(0.0, 0.005, 0.5);
        double s = std::exp(2.0 * 0.005 * 2.5 * 100.0);
        double expected = 2.5 * s * 0.01 / ((s - 1.0) * 0.01 + 2.5);
        CHECK(z_general(m, 100.0) == doctest::Approx(expected).epsilon(1e-12));
        auto oracle = testsup::rk4_at_times(m, {100.0}, 1e-3);
        CHECK(std::fabs(z_general(m, 100.0) - oracle[0]) <= 1e-6);
    }
    SUBCASE("bridged dynamics against the integrator") {
        ModeParams m = figure_defaults(0.0025, 0.0025, 0.5);
        double r = effective_rate(m);
        std::vector<double> ts = logspace(1e-3 / r, 10.0 / r, 50);
        auto oracle = testsup::rk4_at_times(m, ts, 0.002 / r);
        for (std::size_t k = 0; k < ts.size(); ++k)
            CHECK(std::fabs(z_general(m, ts[k]) - oracle[k]) <= 1e-6);
    }
}

TEST_CASE("gamma = 0 with z0 = 0 stays at zero") {
    ModeParams m = figure_defaults(0.0, 0.005, 0.5);
    m.z0 = 0.0;
    for (double t : {0.0, 1.0, 100.0, 1e6}) CHECK(z_general(m, t) == 0.0);
}

TEST_CASE("z0 at the fixed point stays there; beyond it is out of branch") {
    ModeParams m = figure_defaults(0.0025, 0.0025, 0.0);
    m.z0 = 2.5;
    CHECK(z_general(m, 17.0) == doctest::Approx(2.5));
    m.z0 = 2.6;
    CHECK_THROWS_AS((void)z_general(m, 1.0), Error);
}

TEST_CASE("one-layer solution") {
    ModeParams m = figure_defaults(0.005, 0.0, 0.5);
    CHECK(z_one_layer(m, 0.0) == doctest::Approx(0.01));
    CHECK(z_one_layer(m, 1e7) == doctest::Approx(2.5));
    double t_half = std::log(2.0) / (0.005 * 1.0);
    CHECK(z_one_layer(m, t_half) == doctest::Approx((0.01 + 2.5) / 2.0));

    ModeParams bad = m;
    bad.gamma = 0.0;
    CHECK_THROWS_AS((void)z_one_layer(bad, 1.0), Error);
}

TEST_CASE("balanced solution") {
    ModeParams m = figure_defaults(0.0, 0.005, 0.5);
    CHECK(z_balanced(m, 0.0) == doctest::Approx(0.01));
    CHECK(z_balanced(m, 1e9) == doctest::Approx(2.5));
    auto oracle = testsup::rk4_at_times(m, {200.0}, 1e-3);
    CHECK(std::fabs(z_balanced(m, 200.0) - oracle[0]) <= 1e-6);

    ModeParams bad = m;
    bad.z0 = 0.0;
    CHECK_THROWS_AS((void)z_balanced(bad, 1.0), Error);
}

TEST_CASE("no overflow and monotone approach for very large t") {
    Rng rng(5);
    for (int i = 0; i < 20; ++i) {
        ModeParams m = testsup::random_valid_mode(rng);
        double zstar = global_minimum(m);
        double prev = -std::numeric_limits<double>::infinity();
        double r = effective_rate(m);
        for (double t : logspace(1e-3 / r, 1e9 / r, 60)) {
            double z = z_general(m, t);
            CHECK(std::isfinite(z));
            CHECK(z >= std::min(m.z0, zstar) - 1e-12);
            CHECK(z <= std::max(m.z0, zstar) + 1e-12);
            CHECK(z >= prev - 1e-9 * std::fabs(zstar));
            prev = z;
        }
        CHECK(z_general(m, 1e12 / r) == doctest::Approx(zstar));
    }
}

TEST_CASE("special-case consistency near the boundaries") {
    Rng rng(9);
    for (int i = 0; i < 10; ++i) {
        ModeParams m = testsup::random_valid_mode(rng, testsup::Regime::OneLayer);
        double r = effective_rate(m);
        ModeParams near_one_layer = m;
        near_one_layer.eta_a = near_one_layer.eta_b = 1e-8;
        for (double t : logspace(0.01 / r, 10.0 / r, 20))
            CHECK(std::fabs(z_general(near_one_layer, t) - z_one_layer(m, t)) <=
                  1e-5);

        ModeParams b = testsup::random_valid_mode(rng, testsup::Regime::Balanced);
        ModeParams near_balanced = b;
        near_balanced.gamma = 1e-8;
        double rb = effective_rate(b);
        for (double t : logspace(0.01 / rb, 10.0 / rb, 20))
            CHECK(std::fabs(z_general(near_balanced, t) - z_balanced(b, t)) <=
                  1e-5);
    }
}

TEST_CASE("tail slope equals the effective rate") {
    Rng rng(13);
    for (int i = 0; i < 5; ++i) {
        ModeParams m = testsup::random_tail_mode(rng);
        double r = effective_rate(m);
        double zstar = global_minimum(m);
        std::vector<double> ts = linspace(5.0 / r, 10.0 / r, 50);
        std::vector<double> logs;
        for (double t : ts)
            logs.push_back(std::log(std::fabs(zstar - z_general(m, t))));
        double slope = testsup::fit_slope(ts, logs);
        CHECK(std::fabs(slope + r) <= 0.05 * r);
    }
}

TEST_CASE("central finite differences recover the flow right-hand side") {
    Rng rng(17);
    for (int i = 0; i < 10; ++i) {
        ModeParams m = testsup::random_valid_mode(rng);
        double r = effective_rate(m);
        for (double t : logspace(0.05 / r, 6.0 / r, 15)) {
            double h = 1e-5 / r;
            double deriv = (z_general(m, t + h) - z_general(m, t - h)) / (2 * h);
            double expected = flow_rhs(m, z_general(m, t));
            CHECK(std::fabs(deriv - expected) <=
                  1e-5 * std::max(std::fabs(expected), 1e-12));
        }
    }
}

TEST_CASE("time_to_target") {
    SUBCASE("already at the target") {
        ModeParams m = figure_defaults(0.0025, 0.0025, 0.5);
        m.z0 = 1.25;  // equals (1 - rho) z*
        CHECK(time_to_target(m, 0.5) == 0.0);
    }
    SUBCASE("the asymptote is never reached") {
        ModeParams m = figure_defaults(0.0025, 0.0025, 0.5);
        CHECK(std::isinf(time_to_target(m, 0.0)));
    }
    SUBCASE("matches bisection on the trajectory") {
        ModeParams m = figure_defaults(0.0025, 0.0025, 0.5);
        double t_star = time_to_target(m, 0.5);
        CHECK(std::fabs(z_general(m, t_star) - 1.25) <= 1e-9);
        // independent bisection on z_general
        double lo = 0.0, hi = 1.0;
        while (z_general(m, hi) < 1.25) hi *= 2.0;
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            (z_general(m, mid) < 1.25 ? lo : hi) = mid;
        }
        CHECK(t_star == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-9));
    }
    SUBCASE("targets behind the start are refused") {
        ModeParams m = figure_defaults(0.0025, 0.0025, 0.5);
        m.z0 = 1.0;
        CHECK_THROWS_AS((void)time_to_target(m, 0.9), Error);
    }
}

TEST_CASE("time_to_target inverts the trajectory across regimes") {
    Rng rng(21);
    for (int i = 0; i < 30; ++i) {
        ModeParams m = testsup::random_valid_mode(rng);
        double zstar = global_minimum(m);
        double rho_max = 1.0 - m.z0 / zstar;
        double rho = rng.uniform(0.02 * rho_max, 0.98 * rho_max);
        double t = time_to_target(m, rho);
        CHECK(std::fabs(z_general(m, t) - (1.0 - rho) * zstar) <= 1e-9);
    }
}
