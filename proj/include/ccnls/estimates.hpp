#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ccnls/boxes.hpp"
#include "ccnls/experiments.hpp"
#include "ccnls/system.hpp"

namespace ccnls {

// ---- reports -------------------------------------------------------------

struct RatioSample {
  double scale = 0.0;
  int member = 0;
  double ratio = 0.0;
};

struct EstimateReport {
  std::string name;
  nlohmann::json descriptors = nlohmann::json::object();
  std::vector<RatioSample> samples;
  std::vector<double> scales;     // filled by finalize()
  std::vector<double> sup_ratio;
  std::optional<RateFit> fit;     // only with >= 5 positive scale points
  std::vector<std::string> warnings;
  std::vector<std::string> flags;
  nlohmann::json extra = nlohmann::json::object();

  void finalize();
};

std::string report_csv(const EstimateReport& r);       // scale,member,ratio
nlohmann::json report_summary(const EstimateReport& r);  // {slope, ci, n_points, ...}

// ---- modulation dichotomy ------------------------------------------------

struct DichotomyResult {
  double b = 0.0;
  double deviation = 0.0;   // |xi3/xi2 - b/2|
  double threshold = 0.0;   // |b+2| / 4
  bool in_A = false, in_B = false;
  double A_lhs = 0.0, A_bound = 0.0;  // |beta xi2 - gamma xi3| vs |gamma||b+2||xi2|/4
  double B_lhs = 0.0, B_bound = 0.0;  // resonance vs |gamma||b+2||xi2|^2/2
  bool A_holds = false, B_holds = false;
  char certified = '-';     // 'A', 'B' or '-' (nothing certified)
  double margin = 0.0;      // relative margin of the certified conclusion
};

inline constexpr double kDichotomySlack = 1e-12;

// alpha = gamma, beta + gamma != 0, xi2 != 0.
DichotomyResult dichotomy_check(double xi2, double xi3, const SystemParams& p);

struct ResonanceIdentity {
  double lhs = 0.0, rhs = 0.0, residual = 0.0;
};

// tau1 - tau2 - tau3 = 0 and xi1 - xi2 - xi3 = 0 are required.
ResonanceIdentity resonance_identity(const std::array<double, 3>& tau, const std::array<double, 3>& xi,
                                     const SystemParams& p);

struct DichotomySweep {
  std::vector<std::array<double, 2>> points;  // (xi2, xi3)
  std::vector<DichotomyResult> results;
  long uncovered = 0;     // points where neither conclusion is certified
  long region_A = 0, region_B = 0;
  double min_margin = 0.0;
  long fuzz_samples = 0;
  double max_relative_residual = 0.0;  // |lhs - rhs| / max(1, lhs)
};

// Lattice xi2, xi3 in {+-2^k : kmin <= k <= kmax}, plus `fuzz` random constrained samples
// of the resonance identity (dyadic rationals, so the constraints hold exactly).
DichotomySweep dichotomy_sweep(const SystemParams& p, int kmin = -6, int kmax = 6, long fuzz = 10000,
                               std::uint64_t seed = 1);
std::string dichotomy_csv(const DichotomySweep& s);  // xi2,xi3,deviation,threshold,in_A,in_B,certified,margin

// ---- bilinear -------------------------------------------------------------

struct BilinearConfig {
  std::vector<std::int64_t> N1{16, 32, 64, 128, 256, 512};
  std::int64_t N2 = 2;
  int j1 = 0, j2 = 0;
  double sigma1 = 1.0, sigma2 = 1.0;
  int ensemble = 50;
  std::uint64_t seed = 1;
  int bins = 4;          // piecewise-constant bins per sign on each shell plateau
  double interp_a = 0.0; // 0: plain bound; in (0,1): interpolated bound
  int panels = 12;       // Gauss panels per axis for the (p, m) integral
};

void validate(const BilinearConfig& cfg);
double bilinear_bound(double N1, double N2, int j1, int j2, int d, double a = 0.0);

// Semi-analytic d = 1 continuum evaluation (exact in tau, quadrature in frequency).
EstimateReport bilinear_ratio_experiment(const BilinearConfig& cfg);

// Ratio ||f1 f2|| / (bound ||f1|| ||f2||) for sampled space-time functions.
double bilinear_ratio_sampled(const SpaceTimeSample& f1, const SpaceTimeSample& f2, double N1, double N2, int j1,
                              int j2, double a = 0.0);

// Independent physical-space quadrature of one ensemble member of the experiment
// (member index, N1 taken from cfg.N1[k]); returns {semi-analytic, quadrature} ratios.
std::array<double, 2> bilinear_crosscheck(const BilinearConfig& cfg, std::size_t k, int member);

// ---- trilinear ------------------------------------------------------------

enum class TrilinearCase { HighHighLow, HighLowHigh, AllComparable };
TrilinearCase trilinear_case_from_string(const std::string& s);
const char* trilinear_case_name(TrilinearCase c);

struct TrilinearConfig {
  SystemParams params;
  double T = 1.0;
  std::vector<std::int64_t> scales{16, 32, 64, 128, 256, 512};
  std::int64_t low = 2;
  TrilinearCase kind = TrilinearCase::HighHighLow;
  int ensemble = 50;
  std::uint64_t seed = 1;
  int window = 1;  // g_m index m >= 1
};

void validate(const TrilinearConfig& cfg);
EstimateReport trilinear_ratio_experiment(const TrilinearConfig& cfg);

// |int_0^T int conj(u) v w| for free evolutions on the 2 pi torus with lattice
// coefficients a1, a2, a3 indexed by wavenumber offset (k = k0 + index).
struct LatticeData {
  long k0 = 0;
  std::vector<cplx> a;
  double norm() const;  // L^2 norm on the torus
};
cplx trilinear_time_integral(const LatticeData& u, const LatticeData& v, const LatticeData& w, const SystemParams& p,
                             double t0, double t1);

// ---- quadratic ------------------------------------------------------------

enum class QuadraticCase { HighLow, LowHigh, HighHigh };
QuadraticCase quadratic_case_from_string(const std::string& s);
const char* quadratic_case_name(QuadraticCase c);

struct QuadraticConfig {
  double s = 1.6, s_tilde = 1.6;
  double sigma1 = 1.0, sigma2 = 1.0;
  std::vector<std::int64_t> scales{16, 32, 64, 128, 256, 512};
  std::int64_t low = 2;
  QuadraticCase kind = QuadraticCase::HighLow;
  int ensemble = 20;
  std::uint64_t seed = 1;
  double T = 1.0;
  int n_t = 8;
  // Members are bumps at a shared random centre (magnitudes in (1/2, 3/2), aligned phases), which
  // saturate Bernstein; false draws independent phases instead.
  bool coherent = true;
};

void validate(const QuadraticConfig& cfg);
EstimateReport quadratic_estimate_experiment(const QuadraticConfig& cfg);

// LHS and the two right-hand terms for one pair of free solutions (d = 1 torus).
struct QuadraticTerms {
  double lhs = 0.0, near_shell = 0.0, tail = 0.0;
};
QuadraticTerms quadratic_terms(const Field& f1, const Field& f2, DyadicScale N, const QuadraticConfig& cfg);

// ---- one-dimensional optimality construction ------------------------------

struct A1Config {
  double K = 256;
  double a = 0.5;
  double s = 0.0;
  double T = 1.0 / 16.0;
  int d = 1;
  SystemParams params;
};

struct A1Boxes {
  double delta = 0.0, M = 0.0;
  BoxRegion D1, D2, D;
};
A1Boxes a1_boxes(double K, double a, int d, const SystemParams& p);

struct A1Result {
  double ratio = 0.0;
  double predicted_exponent = 0.0;   // (1 - a)/4
  double phase_exponent = 0.0;       // 1 - a - delta
  double t0 = 0.0;
  double phase_bound = 0.0;          // certified sup |t0 Phi|
  double conv_min_on_D = 0.0;        // exact min of the convolution on D
  double conv_claim = 0.0;           // 2^{-(d-1)} K^{-delta}
  bool sinc_regime = true;           // phase bound <= pi
};

A1Result counterexample_a1(const A1Config& cfg);
EstimateReport counterexample_a1_sweep(A1Config cfg, const std::vector<double>& K);

struct PhaseSmallness {
  double sup = 0.0;        // sampled sup |t' Phi|
  double certified = 0.0;  // interval-arithmetic upper bound
};
// Phi = alpha|xi - eta|^2 - beta|eta|^2 - gamma|xi|^2 over xi in D, -eta in D2, t' in [0, t_max].
PhaseSmallness phase_smallness_a1(const BoxRegion& D, const BoxRegion& D2, const SystemParams& p, double t_max,
                                  long samples, std::uint64_t seed = 1);
// Phi = alpha|xi1|^2 - beta|xi2|^2 - gamma|xi3|^2 with xi1 = xi2 + xi3, xi2 in D2, xi3 in D3,
// xi1 in D1 (samples outside D1 are rejected).
PhaseSmallness phase_smallness_a2(const BoxRegion& D1, const BoxRegion& D2, const BoxRegion& D3,
                                  const SystemParams& p, double t_max, long samples, std::uint64_t seed = 1);

// ---- resonant trilinear construction -------------------------------------

enum class A2Regime { BPos, BNeg, BZero, MultiD };
A2Regime a2_regime_from_string(const std::string& s);
const char* a2_regime_name(A2Regime r);

struct A2Config {
  A2Regime regime = A2Regime::MultiD;
  int d = 2;
  double K = 16;
  double p_exp = 3.0;
  double s = 0.0;
  double T = 1.0;
  double C_tilde = 32.0;
  double C2 = 64.0, C3 = 16.0;
  SystemParams params;
};

struct A2Boxes {
  BoxRegion D1, D2, D3;
  std::array<double, 3> N{};  // dyadic scales containing each box
  double C3_used = 0.0;
  bool C3_adjusted = false;
};
A2Boxes a2_boxes(const A2Config& cfg);

struct A2Result {
  double lower_bound = 0.0;   // certified lower bound of |int g0 conj(u) v w|
  double constant = 0.0;      // C(K) = LB / ((N1*)^{-1} (N3*)^s prod ||f_j||)
  double conv_min_on_D1 = 0.0;
  double conv_claim = 0.0;    // K^{d-1} (multiD) or 1 (1-D) scale of the claimed bound
  double phase_bound = 0.0;   // certified sup |t Phi| over the window
  double window = 0.0;        // T / N1*
  bool sinc_regime = true;
  std::vector<std::string> flags;
};

A2Result counterexample_a2(const A2Config& cfg);
EstimateReport counterexample_a2_sweep(A2Config cfg, const std::vector<double>& K);

}  // namespace ccnls
