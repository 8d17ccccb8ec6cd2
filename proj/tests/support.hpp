#pragma once

// Test-side oracles, independent of the closed-form implementation paths
// they are used to check.

#include <algorithm>
#include <cmath>
#include <vector>

#include "core/modes.hpp"
#include "core/rng.hpp"

namespace testsup {

// Classic RK4 on dz/dt = sqrt(gamma^2 + 4 eta^2 z^2)(sigma - lambda z),
// landing exactly on every requested time (times must be ascending).
inline std::vector<double> rk4_at_times(const epochdd::ModeParams& m,
                                        const std::vector<double>& times,
                                        double step) {
    double eta = std::sqrt(m.eta_a * m.eta_b);
    auto f = [&](double z) {
        return std::sqrt(m.gamma * m.gamma + 4.0 * eta * eta * z * z) *
               (m.sigma - m.lambda * z);
    };
    auto rk4_step = [&](double z, double h) {
        double k1 = f(z);
        double k2 = f(z + 0.5 * h * k1);
        double k3 = f(z + 0.5 * h * k2);
        double k4 = f(z + h * k3);
        return z + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    };
    std::vector<double> out;
    out.reserve(times.size());
    double t = 0.0, z = m.z0;
    for (double target : times) {
        while (t < target) {
            double h = std::min(step, target - t);
            z = rk4_step(z, h);
            t += h;
        }
        out.push_back(z);
    }
    return out;
}

enum class Regime { General, OneLayer, Balanced };

// Random mode satisfying the analysis conditions with an active trajectory.
inline epochdd::ModeParams random_valid_mode(epochdd::Rng& rng,
                                             Regime regime) {
    epochdd::ModeParams m;
    m.lambda = rng.log_uniform(0.2, 5.0);
    m.sigma = rng.log_uniform(0.5, 5.0);
    m.rho = rng.uniform(0.02, 0.95);
    switch (regime) {
        case Regime::OneLayer:
            m.eta_a = 0.0;
            m.eta_b = 1.0;
            m.gamma = rng.log_uniform(1e-4, 0.05);
            break;
        case Regime::Balanced: {
            double eta = rng.log_uniform(1e-4, 0.05);
            m.eta_a = m.eta_b = eta;
            m.gamma = 0.0;
            break;
        }
        case Regime::General: {
            double eta = rng.log_uniform(1e-4, 0.05);
            m.eta_a = m.eta_b = eta;
            m.gamma = rng.log_uniform(1e-4, 0.05);
            if (rng.uniform() < 0.5) m.gamma = -m.gamma;
            break;
        }
    }
    double zbar = (1.0 - m.rho) * m.sigma / m.lambda;
    double lo = (regime == Regime::OneLayer) ? 0.0 : 1e-4;
    m.z0 = zbar * rng.uniform(lo + 1e-6, 0.9);
    return m;
}

inline epochdd::ModeParams random_valid_mode(epochdd::Rng& rng) {
    double u = rng.uniform();
    Regime regime = u < 1.0 / 3.0   ? Regime::OneLayer
                    : u < 2.0 / 3.0 ? Regime::Balanced
                                    : Regime::General;
    return random_valid_mode(rng, regime);
}

// Mode whose convergence gap |z* - z(t)| is already in its asymptotic
// regime on the window t in [5/r, 10/r]: the subdominant correction scales
// with (z* - z0)/z0 exp(-rt), so keep z0 a sizable fraction of z*.
inline epochdd::ModeParams random_tail_mode(epochdd::Rng& rng) {
    epochdd::ModeParams m = random_valid_mode(rng);
    m.rho = rng.uniform(0.05, 0.7);
    double zbar = (1.0 - m.rho) * m.sigma / m.lambda;
    m.z0 = zbar * rng.uniform(0.6, 0.95);
    return m;
}

// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x,
                        const std::vector<double>& y) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

}  // namespace testsup
