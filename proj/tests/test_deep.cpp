#include "doctest.h"

#include <cmath>

#include "core/deep.hpp"
#include "core/errors.hpp"
#include "core/integrate.hpp"
#include "core/modes.hpp"
#include "core/rng.hpp"

using namespace epochdd;

namespace {

DeepModeParams make_deep(int L, double gamma = 0.0, double z0 = 0.05,
                         double rho = 0.5, double eta = 0.02,
                         double lambda = 1.0, double sigma = 2.0) {
    DeepModeParams dm;
    dm.base.lambda = lambda;
    dm.base.sigma = sigma;
    dm.base.gamma = gamma;
    dm.base.z0 = z0;
    dm.base.rho = rho;
    dm.base.eta_a = eta;
    dm.base.eta_b = eta;
    dm.L = L;
    dm.eta_first = eta;
    dm.eta_last = eta;
    return dm;
}

}  // namespace

TEST_CASE("deep flow fixed points") {
    DeepModeParams at_zero = make_deep(8, 0.0, 0.0);
    auto traj = integrate_deep_scalar(at_zero, default_deep_config(at_zero));
    for (double z : traj.values) CHECK(z == 0.0);

    DeepModeParams at_star = make_deep(8, 0.0, 2.0, 0.0);
    auto traj2 = integrate_deep_scalar(at_star, default_deep_config(at_star));
    for (double z : traj2.values) CHECK(z == doctest::Approx(2.0));
}

TEST_CASE("doubling the depth halves the clock exactly") {
    DeepModeParams base = make_deep(8);
    DeepModeParams doubled = make_deep(16);
    auto a = integrate_deep_scalar(base, default_deep_config(base));
    auto b = integrate_deep_scalar(doubled, default_deep_config(doubled));
    REQUIRE(a.values.size() == b.values.size());
    for (std::size_t k = 0; k < a.values.size(); ++k) {
        CHECK(b.values[k] == doctest::Approx(a.values[k]).epsilon(1e-14));
        CHECK(b.times[k] == doctest::Approx(0.5 * a.times[k]).epsilon(1e-14));
    }
}

TEST_CASE("negative rate argument is a parameter error") {
    DeepModeParams dm = make_deep(8, -0.9, 0.05, 0.5, 0.01);
    CHECK_THROWS_AS((void)integrate_deep_scalar(dm, IntegratorConfig{0.01,
                        Method::RK4, 1.0, 1}), Error);
    dm.square_gamma = true;  // gamma^2 + 4 eta^2 is always nonnegative
    (void)default_deep_config(dm);
}

TEST_CASE("two layers reduce to the coupled pair flow") {
    DeepModeParams dm = make_deep(2, 0.004, 0.05, 0.5, 0.02);
    dm.eta_first = 0.015;
    dm.eta_last = 0.025;
    GroupedInit init = grouped_init(dm);
    CHECK(conserved_gamma(init.a_first, init.a_last, dm.eta_first,
                          dm.eta_last) == doctest::Approx(0.004));
    CHECK(init.a_first * init.a_last == doctest::Approx(0.05));

    IntegratorConfig cfg{0.01, Method::RK4, 120.0, 10};
    DeepLayerwiseResult lw = integrate_deep_layerwise(
        2, init.a_first, init.a_last, dm.eta_first, dm.eta_last,
        dm.base.lambda, dm.base.sigma, cfg);

    ModeParams pair;
    pair.lambda = dm.base.lambda;
    pair.sigma = dm.base.sigma;
    pair.eta_a = dm.eta_first;
    pair.eta_b = dm.eta_last;
    auto states = integrate_ab(init.a_first, init.a_last, pair, cfg);
    REQUIRE(states.size() == lw.z.values.size());
    for (std::size_t k = 0; k < states.size(); ++k)
        CHECK(lw.z.values[k] == doctest::Approx(states[k].z()).epsilon(1e-12));
}

TEST_CASE("pairwise conservation holds along the layerwise flow") {
    DeepModeParams dm = make_deep(8, 0.01, 0.05, 0.5, 0.02);
    GroupedInit init = grouped_init(dm);
    IntegratorConfig cfg = default_deep_config(dm);
    cfg.sample_stride = 100;
    DeepLayerwiseResult lw = integrate_deep_layerwise(
        8, init.a_first, init.a_last, dm.eta_first, dm.eta_last,
        dm.base.lambda, dm.base.sigma, cfg);
    double g0 = dm.eta_last * init.a_first * init.a_first -
                dm.eta_first * init.a_last * init.a_last;
    for (std::size_t k = 0; k < lw.layer_first.size(); ++k) {
        double g = dm.eta_last * lw.layer_first[k] * lw.layer_first[k] -
                   dm.eta_first * lw.layer_last[k] * lw.layer_last[k];
        CHECK(std::fabs(g - g0) <= 1e-8);
    }
}

TEST_CASE("the large-depth approximation improves with depth") {
    double prev_gap = 1e18;
    for (int L : {8, 16, 32}) {
        DeepModeParams dm = make_deep(L);
        IntegratorConfig cfg = default_deep_config(dm);
        cfg.sample_stride = 50;
        GroupedInit init = grouped_init(dm);
        DeepLayerwiseResult lw = integrate_deep_layerwise(
            L, init.a_first, init.a_last, dm.eta_first, dm.eta_last,
            dm.base.lambda, dm.base.sigma, cfg);
        Trajectory approx = integrate_deep_scalar(dm, cfg);
        REQUIRE(lw.z.values.size() == approx.values.size());
        double gap = 0.0;
        for (std::size_t k = 0; k < lw.z.values.size(); ++k)
            gap = std::max(gap, std::fabs(lw.z.values[k] - approx.values[k]));
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
}

TEST_CASE("deep inflection locations") {
    SUBCASE("rho = 0.5 lands at the quadratic roots") {
        DeepModeParams dm = make_deep(8, 0.0, 0.02, 0.5, 0.02, 1.0, 2.5);
        InflectionReport rep = deep_inflections(dm);
        REQUIRE(rep.points.size() == 2);
        // roots of 4 l^2 z^2 - 3 l s (2 - rho) z + 2 s^2 (1 - rho)
        double l = 1.0, s = 2.5, rho = 0.5;
        double A = 4.0 * l * l, B = -3.0 * l * s * (2.0 - rho);
        double C = 2.0 * s * s * (1.0 - rho);
        double disc = std::sqrt(B * B - 4.0 * A * C);
        double z_minus = (-B - disc) / (2.0 * A);
        double z_plus = (-B + disc) / (2.0 * A);
        CHECK(std::fabs(rep.points[0].z_hat - z_minus) <= 1e-9);
        CHECK(std::fabs(rep.points[1].z_hat - z_plus) <= 1e-9);
        CHECK(rep.points[0].side == InflectionSide::BeforeMin);
        CHECK(rep.points[1].side == InflectionSide::AfterMin);
        CHECK(rep.points[0].t_hat < rep.t_min);
        CHECK(rep.points[1].t_hat > rep.t_min);
    }
    SUBCASE("rho = 0 keeps only the early candidate at sigma / (2 lambda)") {
        DeepModeParams dm = make_deep(8, 0.0, 0.02, 0.0, 0.02, 1.0, 2.5);
        InflectionReport rep = deep_inflections(dm);
        REQUIRE(rep.points.size() == 1);
        CHECK(rep.points[0].side == InflectionSide::BeforeMin);
        CHECK(rep.points[0].z_hat == doctest::Approx(2.5 / 2.0));
        CHECK(std::isinf(rep.t_min));
    }
    SUBCASE("starting beyond the early location removes it") {
        DeepModeParams dm = make_deep(8, 0.0, 0.02, 0.5, 0.02, 1.0, 2.5);
        double z_minus = 2.5 * (4.5 - std::sqrt(4.25)) / 8.0;
        dm.base.z0 = z_minus + 0.01;
        InflectionReport rep = deep_inflections(dm);
        REQUIRE(rep.points.size() == 1);
        CHECK(rep.points[0].side == InflectionSide::AfterMin);
    }
}

TEST_CASE("deep inflection times match the sampled curvature pattern") {
    DeepModeParams dm = make_deep(8, 0.0, 0.02, 0.5, 0.02, 1.0, 2.5);
    InflectionReport rep = deep_inflections(dm);
    IntegratorConfig cfg = default_deep_config(dm);
    cfg.sample_stride = 20;
    Trajectory traj = integrate_deep_scalar(dm, cfg);
    std::vector<double> ts, vs;
    for (std::size_t k = 1; k < traj.times.size(); ++k) {
        double gap = (1.0 - dm.base.rho) * dm.base.sigma -
                     dm.base.lambda * traj.values[k];
        ts.push_back(traj.times[k]);
        vs.push_back(gap * gap);
    }
    std::vector<double> curv(ts.size(), 0.0);
    for (std::size_t k = 1; k + 1 < ts.size(); ++k) {
        double dl = (vs[k] - vs[k - 1]) / (ts[k] - ts[k - 1]);
        double dr = (vs[k + 1] - vs[k]) / (ts[k + 1] - ts[k]);
        curv[k] = 2.0 * (dr - dl) / (ts[k + 1] - ts[k - 1]);
    }
    double top = 0.0;
    for (double c : curv) top = std::max(top, std::fabs(c));
    std::vector<std::pair<double, double>> cells;
    int prev_sign = 0;
    std::size_t prev_idx = 0;
    for (std::size_t k = 1; k + 1 < ts.size(); ++k) {
        if (std::fabs(curv[k]) <= 1e-9 * top) continue;
        int sign = curv[k] > 0.0 ? 1 : -1;
        if (prev_sign != 0 && sign != prev_sign)
            cells.push_back({ts[prev_idx > 0 ? prev_idx - 1 : 0],
                             ts[std::min(k + 1, ts.size() - 1)]});
        prev_sign = sign;
        prev_idx = k;
    }
    REQUIRE(cells.size() == rep.points.size());
    for (std::size_t k = 0; k < cells.size(); ++k) {
        CHECK(rep.points[k].t_hat >= cells[k].first);
        CHECK(rep.points[k].t_hat <= cells[k].second);
    }
}

TEST_CASE("deep error curves keep the three admissible shapes") {
    Rng rng(71);
    for (int i = 0; i < 25; ++i) {
        DeepModeParams dm = make_deep(8);
        dm.base.lambda = rng.log_uniform(0.5, 2.0);
        dm.base.sigma = rng.log_uniform(0.8, 3.0);
        dm.base.rho = rng.uniform(0.05, 0.9);
        dm.eta_first = dm.eta_last = rng.log_uniform(0.005, 0.05);
        dm.base.eta_a = dm.eta_first;
        dm.base.eta_b = dm.eta_last;
        double zbar = (1.0 - dm.base.rho) * dm.base.sigma / dm.base.lambda;
        dm.base.z0 = zbar * rng.uniform(0.05, 0.9);
        IntegratorConfig cfg = default_deep_config(dm);
        cfg.sample_stride = 50;
        Trajectory traj = integrate_deep_scalar(dm, cfg);
        // error differences change sign at most once, downward then upward
        int transitions = 0;
        int prev_sign = 0;
        double prev_v = 0.0;
        bool first = true;
        for (std::size_t k = 0; k < traj.values.size(); ++k) {
            double gap = (1.0 - dm.base.rho) * dm.base.sigma -
                         dm.base.lambda * traj.values[k];
            double v = gap * gap;
            if (!first) {
                double d = v - prev_v;
                if (std::fabs(d) > 1e-14) {
                    int sign = d > 0.0 ? 1 : -1;
                    if (prev_sign != 0 && sign != prev_sign) ++transitions;
                    CHECK((prev_sign == 0 || sign >= prev_sign));
                    prev_sign = sign;
                }
            }
            prev_v = v;
            first = false;
        }
        CHECK(transitions <= 1);
    }
}
