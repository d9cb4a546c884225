#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ccnls/solver.hpp"

namespace ccnls {

enum class DataKind { SobolevRandom, Gaussian, SingleMode, BoxData };
DataKind data_kind_from_string(const std::string& s);
const char* data_kind_name(DataKind k);

struct DataSpec {
  DataKind kind = DataKind::SobolevRandom;
  double s = 1.6;           // target regularity (SobolevRandom)
  std::uint64_t seed = 1;
  double amplitude = 1.0;
  double width = 1.0;       // Gaussian: physical width
  double mode = 1.0;        // SingleMode: lattice index along axis 0
  double lo = 1.0, hi = 2.0;  // BoxData: spectral band lo <= |xi| <= hi

  void validate() const;
};

nlohmann::json to_json(const DataSpec& s);
DataSpec data_spec_from_json(const nlohmann::json& j);

// |c_xi| = A <xi>^{-(s + d/2)} (1 + log<xi>)^{-1} with independent uniform
// phases.  Coefficients are orthonormal Fourier-series coefficients, and the
// phase of a given lattice wavenumber depends only on (seed, field, component,
// wavenumber), so refining M keeps the low modes unchanged.
StateBundle sobolev_random_data(const Grid& g, const DataSpec& spec);
// Dispatches on spec.kind.
StateBundle make_data(const Grid& g, const DataSpec& spec);

// n members of kind `base.kind`: member i uses a seed derived from (base.seed, i) and an
// amplitude drawn log-uniformly from [amp_lo, amp_hi].
std::vector<StateBundle> random_ensemble(const Grid& g, int n, const DataSpec& base, double amp_lo, double amp_hi);

struct RateFit {
  std::vector<double> x, y;  // raw abscissae / ordinates (fit is in log-log)
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;     // rms of log residuals
  double stderr_slope = 0.0;
  double ci95 = 0.0;         // half-width of the 95% band on the slope
};

// Least squares of log y against log x.  Needs >= 4 points, distinct x, y > 0.
RateFit rate_fit(const std::vector<double>& x, const std::vector<double>& y, std::size_t min_points = 4);
nlohmann::json to_json(const RateFit& f);

struct ConvergenceConfig {
  Grid grid{1, 2.0 * kPi, 1024};
  DataSpec data;
  std::vector<double> K{8, 16, 32, 64, 128};
  SystemParams params;
  SolverConfig solver;  // dt, T, integrator; the reference run uses dt/4
  double monotone_tol = 0.05;
};

struct ConvergenceResult {
  std::vector<double> K;
  std::vector<double> error;  // sup_t ||U_K - U_ref||_{L^2}
  double K_ref = 0.0;
  RateFit fit;
  bool monotone = true;
  bool smooth_regime = false;  // slope <= -3: the algebraic bound says nothing
  double predicted_slope = 0.0;  // -(s - (d+1)/2)
  std::vector<std::string> notes;
};

ConvergenceResult convergence_study(const ConvergenceConfig& cfg);
std::string convergence_csv(const ConvergenceResult& r);

struct ContinuityRow {
  double eps = 0.0;
  double initial_distance = 0.0;  // ||U1(0) - U2(0)||_{H^s}
  double sup_distance = 0.0;      // sup_t ||U1(t) - U2(t)||_{H^s}
  double amplification = 0.0;
  double sqrt_loss_shape = 0.0;   // ||d(0)||_{H^0}^{1/2} ||U1(0)||_{H^{2s}}^{1/2}
};

struct ContinuityResult {
  std::vector<ContinuityRow> rows;
  bool monotone = true;
};

// Data plus eps times a unit H^s direction (SobolevRandom, seed + 1).
ContinuityResult flow_continuity_probe(const StateBundle& data, const std::vector<double>& eps, double s,
                                       const SystemParams& p, const SolverConfig& cfg);

struct LadderResult {
  std::vector<double> J;
  std::vector<double> distance;  // sup_t ||U_{J_{k+1}} - U_{J_k}||_{H^s}
  double partial_sum = 0.0;
  double tail_ratio = 0.0;       // last distance / first distance
};

// Bona-Smith ladder: solutions from P_{<=J} data for the given J.
LadderResult smoothing_ladder(const StateBundle& data, const std::vector<double>& J, double s,
                              const SystemParams& p, const SolverConfig& cfg);

std::string continuity_csv(const ContinuityResult& r);
std::string ladder_csv(const LadderResult& r);

}  // namespace ccnls
