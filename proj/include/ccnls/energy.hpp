#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ccnls/solver.hpp"

namespace ccnls {

struct EnergyConfig {
  double s = 1.6;
  double s_tilde = 1.6;
  double C_tilde = 1.0;

  // s0 = d/2 + (s - (d+1)/2)/2, derived, never set.
  double s0(int d) const { return 0.5 * d + 0.5 * (s - 0.5 * (d + 1)); }
  void validate() const;
};

// M_N(f, g, h) = Re int (f . conj P_N g) conj(div Lap^{-1} P_N h) dx, N >= 2.
double correction_M_N(const Field& f, const Field& g, const Field& h, DyadicScale N);
// Pre-Re value, for diagnostics.
cplx correction_M_N_complex(const Field& f, const Field& g, const Field& h, DyadicScale N);

// E_N = N^{2 s~}(1 + N^{-1} C~ ||U||^2_{H^{s0}}) ||P_N U||^2 + 4/(beta+gamma) N^{2 s~} M_N(u, v, w)
double modified_energy(const StateBundle& s, DyadicScale N, const EnergyConfig& cfg, const SystemParams& p);

// difference energy built from u~ = s1 - s2
double difference_energy(const StateBundle& s1, const StateBundle& s2, DyadicScale N, double r,
                         const EnergyConfig& cfg, const SystemParams& p);

struct CoercivityResult {
  double C_tilde = 0.0;       // smallest 2^k that works
  int exponent = 0;
  bool capped = false;        // nothing up to 2^30 worked
  double required = 0.0;      // exact infimum over the ensemble
  double empirical_constant = 0.0;  // sup |M_N| N / (||U||_{H^{s0}} ||P_N U||^2)
  long violations_at_C = 0;   // direct re-check at the returned C~
};

inline constexpr int kCoercivityMinExponent = -20;
inline constexpr int kCoercivityMaxExponent = 30;

// Scans N over `scales` (all N >= 2 by default: 2 .. 2^6).
CoercivityResult coercivity_search(std::span<const StateBundle> ensemble, const EnergyConfig& cfg,
                                   const SystemParams& p, std::span<const std::int64_t> scales);
// Same for the difference energy over pairs (s1[i], s2[i]).
CoercivityResult difference_coercivity_search(std::span<const StateBundle> s1, std::span<const StateBundle> s2,
                                              double r, const EnergyConfig& cfg, const SystemParams& p,
                                              std::span<const std::int64_t> scales);

enum class IdentityVariant {
  Exact,            // right side with the actual alpha
  AlphaEqualsGamma  // right side assembled as if alpha = gamma (negative control)
};

struct IdentityTerms {
  double lhs = 0.0;     // centred difference of the energy functional
  double rhs123 = 0.0;  // commutator terms
  double rhs567 = 0.0;  // correction-term derivative terms
  double rhs = 0.0;     // rhs123 + 2/(beta+gamma) rhs567
  double laplacian_pair = 0.0;  // Im int (Lap u . conj P_N v) conj(div Lap^{-1} P_N w)
  double residual = 0.0;
};

struct IdentityResidual {
  std::vector<double> t;
  std::vector<IdentityTerms> terms;
  double max_residual = 0.0;
  double max_scale = 0.0;  // max |lhs| for context
};

// 1/2 [ ||P_N U||^2 + 4/(beta+gamma) M_N(u, v, w) ]
double identity_functional(const StateBundle& s, DyadicScale N, const SystemParams& p);
// Assembled time derivative of identity_functional at one state.
IdentityTerms identity_rhs(const StateBundle& s, DyadicScale N, const SystemParams& p,
                           IdentityVariant variant = IdentityVariant::Exact, bool dealias = true);

IdentityResidual energy_identity_residual(const Trajectory& traj, DyadicScale N, const SystemParams& p,
                                          IdentityVariant variant = IdentityVariant::Exact, bool dealias = true);

struct EnergyRow {
  double t = 0.0;
  std::int64_t N = 0;
  double M_N = 0.0;
  double E_N = 0.0;
  double coercivity_ratio = 0.0;  // E_N / (N^{2 s~} ||P_N U||^2)
};

struct EnergyReport {
  std::vector<EnergyRow> rows;
  std::vector<double> drift;  // max_N |E_N(t) - E_N(0)| / max(E_N(0), tiny)
  std::vector<double> identity_residuals;
  nlohmann::json summary;
};

EnergyReport energy_scan(const Trajectory& traj, const EnergyConfig& cfg, const SystemParams& p,
                         std::span<const std::int64_t> scales);
std::string energy_csv(const EnergyReport& r);

}  // namespace ccnls
