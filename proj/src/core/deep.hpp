#pragma once

#include <vector>

#include "analysis.hpp"
#include "integrate.hpp"
#include "modes.hpp"

namespace epochdd {

// Parameters of a decoupled mode of the L-layer linear network with layers
// grouped into two halves: the first L/2 share (gamma, eta_first), the last
// L/2 are balanced with rate eta_last. The large-L product weight obeys
//
//     dz/dt ~= (L/2) sqrt(gamma + 4 eta^2) z^2 (sigma - lambda z),
//
// with eta = sqrt(eta_first * eta_last). gamma enters under the square root
// to the first power, as printed in the source analysis; square_gamma
// switches to gamma^2 for sensitivity studies (the two agree at gamma = 0,
// the regime the grouped derivation is exact in the L -> infinity limit).
struct DeepModeParams {
    ModeParams base;            // lambda, sigma, gamma, z0, rho reused
    int L = 4;                  // even depth
    double eta_first = 0.0;     // rate of the first group
    double eta_last = 0.0;      // rate of the last group
    bool square_gamma = false;

    double eta() const;
    double rate_term() const;   // sqrt(gamma + 4 eta^2) (or gamma^2 variant)
};

void validate_deep_mode(const DeepModeParams& mode);

// Product-weight flow of the large-L approximation.
Trajectory integrate_deep_scalar(const DeepModeParams& mode,
                                 const IntegratorConfig& cfg);

IntegratorConfig default_deep_config(const DeepModeParams& mode);

struct DeepLayerwiseResult {
    Trajectory z;                             // product weight
    std::vector<double> layer_first;          // first-group scalar at samples
    std::vector<double> layer_last;           // last-group scalar at samples
};

// Direct integration of the L coupled per-layer scalars
// da_l/dt = eta_l prod_{j != l} a_j (sigma - lambda prod_j a_j)
// under the two-group parameterisation.
DeepLayerwiseResult integrate_deep_layerwise(int L, double a_first0,
                                             double a_last0, double eta_first,
                                             double eta_last, double lambda,
                                             double sigma,
                                             const IntegratorConfig& cfg);

// Grouped initial scalars realizing (gamma, z0): the last group is
// balanced, the first group carries the imbalance.
struct GroupedInit {
    double a_first = 0.0;
    double a_last = 0.0;
};
GroupedInit grouped_init(const DeepModeParams& mode);

// Candidate inflection locations sigma (6 - 3 rho +/- sqrt(9 rho^2 - 4 rho
// + 4)) / (8 lambda); times found by bisecting the integrated trajectory to
// 1e-9 in z.
InflectionReport deep_inflections(const DeepModeParams& mode);

}  // namespace epochdd
