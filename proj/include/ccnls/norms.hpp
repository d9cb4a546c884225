#pragma once

#include <span>
#include <stdexcept>

#include "ccnls/multipliers.hpp"

namespace ccnls {

// Raised when a sample is not spectrally localised where a norm requires it.
struct SupportError : std::runtime_error {
  double offending_mass;
  SupportError(const std::string& what, double mass) : std::runtime_error(what), offending_mass(mass) {}
};

// Physical quadrature (L/M)^d sum |f|^2, summed over components.
double l2_norm_squared(const Field& f);
double l2_norm(const Field& f);
// Spectral H^s norm with <xi> = (1+|xi|^2)^{1/2}; s = 0 coincides with l2_norm.
double sobolev_norm(const Field& f, double s);
// Homogeneous seminorm (|xi|^s weight, zero mode dropped).
double homogeneous_sobolev_norm(const Field& f, double s);
// Sum-of-squares bundle norm over u, v, w.
double sobolev_norm(const StateBundle& b, double s);
double l2_norm_squared(const StateBundle& b);

// l^2_N ( N^s sup_t ||P_N f(t)|| ), per component, combined by sum of squares.
double dyadic_energy_norm(std::span<const StateBundle> traj, double s);
double dyadic_energy_norm(std::span<const Field> traj, double s);

// L^2_{tau,xi} norm normalised by Plancherel, i.e. equal to the L^2_{t,x}
// quadrature of the sample.
double spacetime_l2_norm(const SpaceTimeSample& F);

// sum_j 2^{j/2} ||eta_j(tau + sigma|xi|^2) F||.  The sample must be supported in
// I_N up to relative spectral mass 1e-8, otherwise SupportError.
double xns_norm(const SpaceTimeSample& F, DyadicScale N, double sigma);

// sup over window centres spaced T/(4N) of xns_norm(eta_0(N (t - t_N)/T) F).
double f_norm_proxy(const SpaceTimeSample& F, DyadicScale N, double sigma, double T);
// Same with the resolvent weight (tau + sigma|xi|^2 + i N/T)^{-1}.
double g_norm_proxy(const SpaceTimeSample& F, DyadicScale N, double sigma, double T);

// Window centres used by the proxies.
std::vector<double> window_centers(const SpaceTimeSample& F, DyadicScale N, double T);

// Samples the time-dependent field family f(t) on the uniform lattice.
SpaceTimeSample sample_from_fields(std::span<const Field> frames, double t0, double dt);

}  // namespace ccnls
