#pragma once

#include <functional>
#include <limits>
#include <span>

#include "ccnls/grid.hpp"

namespace ccnls {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Even bump: 1 on [-4/3, 4/3], 0 outside [-5/3, 5/3], quintic smoothstep between.
double eta(double x);
// eta_0 = eta, eta_j(x) = eta(x / 2^j) - eta(x / 2^{j-1}).
double eta_j(double x, int j);
// Littlewood-Paley symbol; psi_1 = eta(|xi|), psi_N = eta(|xi|/N) - eta(2|xi|/N).
double psi_N(double xi_abs, DyadicScale N);
double psi_N(std::span<const double> xi, DyadicScale N);

// Multiply every spectral coefficient by m(|xi|); result in spectral representation.
Field apply_radial_multiplier(const Field& f, const std::function<double(double)>& m);

Field project_dyadic(const Field& f, DyadicScale N);           // P_N
Field project_low(const Field& f, DyadicScale N);              // P_{<=N}
Field sharp_truncate(const Field& f, double K);                // J_{<=K}, K may be kInf
Field sharp_band(const Field& f, double K1, double K2);        // J_{(K1,K2]}

StateBundle project_dyadic(const StateBundle& s, DyadicScale N);
StateBundle sharp_truncate(const StateBundle& s, double K);

// Modulation shells finer than the tau resolution of the sample are merged into
// shell 0: returns the largest j folded into the base shell.
int modulation_merge_level(const SpaceTimeSample& F);
// Effective modulation symbol after merging (partition of unity over j >= 0).
double modulation_weight(double m, int j, int merge_level);
// Highest modulation shell that can be non-empty for this sample.
int modulation_top_level(const SpaceTimeSample& F, double sigma);

SpaceTimeSample modulation_project(const SpaceTimeSample& F, int j, double sigma);  // Q_j^sigma
SpaceTimeSample project_dyadic(const SpaceTimeSample& F, DyadicScale N);

}  // namespace ccnls
