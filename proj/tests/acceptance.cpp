// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "ccnls/cli.hpp"
#include "ccnls/energy.hpp"
#include "ccnls/estimates.hpp"
#include "ccnls/experiments.hpp"
#include "ccnls/norms.hpp"

using namespace ccnls;
namespace fs = std::filesystem;

namespace tol {
constexpr double partition = 1e-12;
constexpr double drift = 1e-8;
constexpr double drift_ratio_lo = 8.0, drift_ratio_hi = 24.0;
constexpr double identity_ratio_lo = 2.5, identity_ratio_hi = 6.0;
constexpr double control_gap = 10.0;       // control residual over exact residual, finest dt
constexpr double control_stall = 0.5;      // control residual may shrink by at most this factor per halving
constexpr double resonance = 1e-12;
constexpr double bilinear_slope = 0.1;
constexpr double trilinear_slope = 0.1;
constexpr double a2_slope = 0.1;
constexpr double a1_slope = 0.03;
constexpr double a1_phase = 0.05;
constexpr double convergence_slope = -0.3;
}  // namespace tol

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

SystemParams params(double a, double b, double c, double K = kInf, int d = 1) {
  SystemParams p;
  p.alpha = a;
  p.beta = b;
  p.gamma = c;
  p.K = K;
  p.d = d;
  return p;
}

DataSpec sobolev(double s, std::uint64_t seed, double amp) {
  DataSpec d;
  d.s = s;
  d.seed = seed;
  d.amplitude = amp;
  return d;
}

double max_coef(const Field& f) {
  Field x = f.spectral();
  double m = 0.0;
  for (const auto& c : x.comp)
    for (const auto& z : c) m = std::max(m, std::abs(z));
  return m;
}

double max_coef_diff(const Field& a, const Field& b) { return max_coef(a - b); }

Field random_spectral(const Grid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Field f(g, -1, Rep::Spectral);
  for (auto& c : f.comp)
    for (auto& z : c) z = cplx(nd(rng), nd(rng));
  return f;
}

// ---- 1 ------------------------------------------------------------------------

Outcome partition() {
  double sym = 0.0;
  for (double x = 0.0; x <= 5000.0; x += 0.0625) {
    double s = 0.0;
    for (std::int64_t N = 1; N <= 8192; N *= 2) s += psi_N(x, N);
    sym = std::max(sym, std::abs(s - 1.0));
  }
  double field = 0.0;
  bool exact = true;
  for (int d : {1, 2}) {
    Grid g(d, 2.0 * kPi, d == 1 ? 1024 : 64);
    Field f = random_spectral(g, 11 + d);
    Field acc(g, -1, Rep::Spectral);
    for (auto N : dyadic_scales(g)) acc += project_dyadic(f, N);
    field = std::max(field, max_coef_diff(acc, f) / max_coef(f));
    for (double K : {3.0, 7.5, 20.0})
      for (std::int64_t N : {2, 4, 8, 16}) {
        Field J = sharp_truncate(f, K);
        exact = exact && max_coef_diff(sharp_truncate(J, K), J) == 0.0;
        exact = exact && max_coef_diff(sharp_truncate(project_dyadic(f, N), K), project_dyadic(J, N)) == 0.0;
      }
  }
  return {sym <= tol::partition && field <= tol::partition && exact,
          fmt::format("symbol residual {:.2e}, field residual {:.2e}, J/P commute and J idempotent: {}", sym, field,
                      exact ? "exact" : "NOT exact")};
}

// ---- 2 ------------------------------------------------------------------------

Outcome conservation() {
  const Grid g(1, 64.0 * kPi, 4096);
  const SystemParams p = params(1, 1, 1, 16);
  const StateBundle data = make_data(g, sobolev(1.6, 7, 8.0));
  std::vector<double> drift;
  for (double dt : {std::ldexp(1.0, -12), std::ldexp(1.0, -13)}) {
    SolverConfig c;
    c.dt = dt;
    c.T = 1.0;
    c.cadence = 256;
    c.keep_snapshots = false;
    Trajectory t = simulate(data, p, c);
    double m = 0.0;
    for (const auto& x : t.diagnostics) m = std::max({m, x.drift1, x.drift2});
    drift.push_back(m);
  }
  double ratio = drift[0] / drift[1];
  return {drift[0] <= tol::drift && ratio >= tol::drift_ratio_lo && ratio <= tol::drift_ratio_hi,
          fmt::format("drift {:.3e} at dt = 2^-12, {:.3e} at 2^-13, halving ratio {:.2f}", drift[0], drift[1], ratio)};
}

// ---- 3 ------------------------------------------------------------------------

Outcome identity() {
  const Grid g(1, 8.0 * kPi, 256);
  const SystemParams p = params(1.5, 1, 1, 16);
  const StateBundle data = make_data(g, sobolev(1.6, 3, 1.0));
  const std::vector<double> dts = {std::ldexp(1.0, -12), std::ldexp(1.0, -13), std::ldexp(1.0, -14)};
  const std::vector<std::int64_t> scales = {2, 4, 8};
  std::map<std::int64_t, std::vector<double>> ex, ct;
  for (double dt : dts) {
    SolverConfig c;
    c.dt = dt;
    c.T = 1.0 / 16.0;
    c.cadence = 2;
    Trajectory t = simulate(data, p, c);
    for (auto N : scales) {
      ex[N].push_back(energy_identity_residual(t, N, p).max_residual);
      ct[N].push_back(energy_identity_residual(t, N, p, IdentityVariant::AlphaEqualsGamma).max_residual);
    }
  }
  bool ok = true;
  double lo = kInf, hi = 0.0, gap = kInf, stall = kInf;
  for (auto N : scales)
    for (std::size_t i = 1; i < dts.size(); ++i) {
      double r = ex[N][i - 1] / ex[N][i];
      lo = std::min(lo, r);
      hi = std::max(hi, r);
      stall = std::min(stall, ct[N][i] / ct[N][i - 1]);
      if (i + 1 == dts.size()) gap = std::min(gap, ct[N][i] / ex[N][i]);
    }
  ok = lo >= tol::identity_ratio_lo && hi <= tol::identity_ratio_hi && gap >= tol::control_gap &&
       stall >= tol::control_stall;
  return {ok, fmt::format("exact halving ratios in [{:.3f}, {:.3f}]; control/exact {:.3g}, control refinement factor "
                          ">= {:.3f}",
                          lo, hi, gap, stall)};
}

// ---- 4 ------------------------------------------------------------------------

Outcome coercivity() {
  const Grid g(1, 2.0 * kPi, 512);
  const SystemParams p = params(1, 1, 1, 16);
  EnergyConfig ec;
  std::vector<std::int64_t> scales;
  for (std::int64_t N = 2; N <= 64; N *= 2) scales.push_back(N);
  const auto e1 = random_ensemble(g, 200, sobolev(1.6, 1, 1.0), 0.1, 10.0);
  const auto e2 = random_ensemble(g, 200, sobolev(1.6, 2, 1.0), 0.1, 10.0);
  const auto c = coercivity_search(e1, ec, p, scales);
  const auto c0 = difference_coercivity_search(e1, e2, 0.0, ec, p, scales);
  const auto cs = difference_coercivity_search(e1, e2, ec.s, ec, p, scales);
  const long viol = c.violations_at_C + c0.violations_at_C + cs.violations_at_C;
  const bool capped = c.capped || c0.capped || cs.capped;

  // held-out ensemble at the constant found above
  const auto h = random_ensemble(g, 200, sobolev(1.6, 101, 1.0), 0.1, 10.0);
  EnergyConfig at = ec;
  at.C_tilde = c.C_tilde;
  long held = 0;
  for (const auto& s : h)
    for (auto n : scales) {
      double base = std::pow(double(n), 2.0 * at.s_tilde) * l2_norm_squared(project_dyadic(s, n));
      if (modified_energy(s, n, at, p) < 0.5 * base) ++held;
    }
  return {viol == 0 && !capped && held == 0,
          fmt::format("C~ = 2^{} / 2^{} / 2^{} (E, difference r=0, r=s), violations {}, held-out violations {}",
                      c.exponent, c0.exponent, cs.exponent, viol, held)};
}

// ---- 5 ------------------------------------------------------------------------

Outcome dichotomy() {
  long uncovered = 0, points = 0;
  double res = 0.0;
  for (auto p : {params(1, 1, 1), params(1, 3, 1), params(2, 1, 2), params(1, -0.5, 1), params(-1, -3, -1)}) {
    DichotomySweep s = dichotomy_sweep(p, -6, 6, 10000, 1);
    uncovered += s.uncovered;
    points += static_cast<long>(s.points.size());
    res = std::max(res, s.max_relative_residual);
  }
  return {uncovered == 0 && res <= tol::resonance,
          fmt::format("{} lattice points over 5 parameter sets, {} uncovered; resonance residual {:.2e} on 5 x 10^4 "
                      "samples",
                      points, uncovered, res)};
}

// ---- 6 ------------------------------------------------------------------------

Outcome bilinear() {
  BilinearConfig cfg;
  EstimateReport r = bilinear_ratio_experiment(cfg);
  if (!r.fit) return {false, "no slope"};
  return {std::abs(r.fit->slope) <= tol::bilinear_slope,
          fmt::format("slope {:.4f} +- {:.4f} over N1 = 2^4..2^9, N2 = 2, ensemble {}", r.fit->slope, r.fit->ci95,
                      cfg.ensemble)};
}

// ---- 7 ------------------------------------------------------------------------

Outcome trilinear() {
  TrilinearConfig tc;
  EstimateReport t = trilinear_ratio_experiment(tc);
  std::vector<double> K;
  for (int k = 3; k <= 7; ++k) K.push_back(std::ldexp(1.0, k));
  A2Config a;
  a.params = params(1, 1, 1, kInf, 2);
  a.s = 0.0;
  EstimateReport r0 = counterexample_a2_sweep(a, K);
  a.s = 0.5;
  EstimateReport rh = counterexample_a2_sweep(a, K);
  if (!t.fit || !r0.fit || !rh.fit) return {false, "missing slope"};
  bool ok = std::abs(t.fit->slope) <= tol::trilinear_slope && std::abs(r0.fit->slope - 0.5) <= tol::a2_slope &&
            std::abs(rh.fit->slope) <= tol::a2_slope;
  return {ok, fmt::format("non-resonant slope {:.4f}; resonant d = 2 slope {:.4f} (s = 0), {:.4f} (s = 1/2)",
                          t.fit->slope, r0.fit->slope, rh.fit->slope)};
}

// ---- 8 ------------------------------------------------------------------------

Outcome optimality() {
  A1Config cfg;
  std::vector<double> K;
  for (int k = 4; k <= 10; ++k) K.push_back(std::ldexp(1.0, k));
  EstimateReport r = counterexample_a1_sweep(cfg, K);
  if (!r.fit || !r.extra.contains("phase_fit")) return {false, "missing slope"};
  const double pred = r.extra["predicted_exponent"].get<double>();
  const double pexp = r.extra["phase_exponent"].get<double>();
  const double ph = r.extra["phase_fit"]["slope"].get<double>();
  return {std::abs(r.fit->slope - pred) <= tol::a1_slope && std::abs(ph - pexp) <= tol::a1_phase && r.flags.empty(),
          fmt::format("slope {:.4f} (predicted {:.4f}), phase slope {:.4f} (predicted {:.4f})", r.fit->slope, pred, ph,
                      pexp)};
}

// ---- 9 ------------------------------------------------------------------------

Outcome convergence() {
  ConvergenceConfig cfg;
  cfg.grid = Grid(1, 2.0 * kPi, 1024);
  cfg.data = sobolev(1.6, 1, 0.3);
  cfg.K = {8, 16, 32, 64, 128};
  cfg.params = params(1, 1, 1);
  cfg.solver.dt = std::ldexp(1.0, -10);
  cfg.solver.T = 1.0;
  cfg.solver.cadence = 16;
  ConvergenceResult r = convergence_study(cfg);
  std::string errs;
  for (double e : r.error) errs += fmt::format(" {:.2e}", e);
  return {r.monotone && r.fit.slope <= tol::convergence_slope,
          fmt::format("K_ref = {:g}, errors{}, slope {:.3f}", r.K_ref, errs, r.fit.slope)};
}

// ---- 10 -----------------------------------------------------------------------

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> m;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) {
      std::ifstream is(e.path(), std::ios::binary);
      m[fs::relative(e.path(), root).string()] = {std::istreambuf_iterator<char>(is), {}};
    }
  return m;
}

Outcome determinism() {
  const std::vector<std::vector<std::string>> studies = {
      {"simulate", "--set", "grid.M=256", "--set", "grid.L=\"8pi\"", "--set", "solver.T=0.125", "--set",
       "solver.cadence=64"},
      {"converge", "--set", "grid.M=256", "--set", "Ks=[4,8,16,32]", "--set", "solver.T=0.25"},
      {"energy-scan", "--set", "mode=\"coercivity\"", "--set", "coercivity.ensemble=20"},
      {"verify-bilinear", "--set", "ensemble=5"},
      {"dichotomy", "--set", "fuzz=500"},
      {"counterexample-a1"},
      {"counterexample-a2"}};
  const fs::path base = fs::temp_directory_path() / "ccnls-acceptance-determinism";
  fs::remove_all(base);
  std::ostringstream sink;
  int failures = 0;
  for (const char* run : {"a", "b"})
    for (const auto& s : studies) {
      std::vector<std::string> args = {"ccnls"};
      args.insert(args.end(), s.begin(), s.end());
      args.insert(args.end(), {"--out", (base / run).string(), "--jobs", run[0] == 'a' ? "1" : "3"});
      std::vector<const char*> argv;
      for (const auto& a : args) argv.push_back(a.c_str());
      failures += cli::cli_dispatch(static_cast<int>(argv.size()), argv.data(), sink, sink) != 0;
    }
  auto ta = tree(base / "a"), tb = tree(base / "b");
  return {failures == 0 && !ta.empty() && ta == tb,
          fmt::format("{} files from {} studies, runs {}, trees {}", ta.size(), studies.size(),
                      failures == 0 ? "succeeded" : "FAILED", ta == tb ? "byte-identical" : "differ")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 partition of unity and projector algebra", partition},
      {"2 conservation under the truncated flow", conservation},
      {"3 energy identity", identity},
      {"4 coercivity of the modified energies", coercivity},
      {"5 modulation dichotomy", dichotomy},
      {"6 bilinear estimate scaling", bilinear},
      {"7 trilinear estimate scaling", trilinear},
      {"8 one-dimensional optimality", optimality},
      {"9 Galerkin convergence", convergence},
      {"10 determinism of output trees", determinism}};
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << fmt::format("{} {}: {} ({:.1f} s)\n", o.pass ? "PASS" : "FAIL", name, o.detail, sec) << std::flush;
    failed += !o.pass;
  }
  std::cout << fmt::format("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
