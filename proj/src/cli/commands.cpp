#include <algorithm>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "ccnls/cli.hpp"
#include "ccnls/energy.hpp"
#include "ccnls/estimates.hpp"
#include "ccnls/experiments.hpp"

namespace ccnls::cli {

using nlohmann::json;

namespace {

// ---- shared config pieces ---------------------------------------------------

json system_defaults(double alpha = 1.0, double beta = 1.0, double gamma = 1.0, json K = 16, int d = 1) {
  return {{"alpha", alpha}, {"beta", beta}, {"gamma", gamma}, {"K", K}, {"d", d}};
}

json with(json a, const json& b) {
  for (auto it = b.begin(); it != b.end(); ++it) a[it.key()] = *it;
  return a;
}

json grid_defaults(const std::string& L, int M) { return {{"grid", {{"L", L}, {"M", M}}}}; }

json data_defaults(double s = 1.6, double amplitude = 1.0) {
  DataSpec d;
  d.s = s;
  d.amplitude = amplitude;
  json j = to_json(d);
  j.erase("seed");  // taken from the top-level seed
  return {{"data", j}};
}

json solver_defaults(double dt, double T, int cadence) {
  return {{"solver",
           {{"dt", dt}, {"T", T}, {"integrator", "InteractionRK4"}, {"dealias", true}, {"cadence", cadence},
            {"diag_s", 1.0}}}};
}

SystemParams system_of(const json& P) {
  json j;
  for (const char* k : {"alpha", "beta", "gamma", "K", "d"})
    if (P.contains(k)) j[k] = P.at(k);
  return params_from_json(j);
}

// A length is a number or "<c>pi".
double length_of(const json& v) {
  if (v.is_number()) return v.get<double>();
  const std::string s = v.get<std::string>();
  if (s.size() >= 2 && s.substr(s.size() - 2) == "pi") {
    const std::string c = s.substr(0, s.size() - 2);
    if (c.empty()) return kPi;
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(c, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == c.size()) return x * kPi;
  }
  throw ParameterError(fmt::format("grid: cannot read length '{}'", s));
}

Grid grid_of(const json& P, int d) {
  const json& g = P.at("grid");
  return Grid(d, length_of(g.at("L")), g.at("M").get<int>());
}

DataSpec data_of(const json& P) {
  json j = P.at("data");
  j["seed"] = P.at("seed");
  return data_spec_from_json(j);
}

SolverConfig solver_of(const json& P) {
  const json& j = P.at("solver");
  SolverConfig c;
  c.dt = j.at("dt").get<double>();
  c.T = j.at("T").get<double>();
  c.integrator = integrator_from_string(j.at("integrator").get<std::string>());
  c.dealias = j.at("dealias").get<bool>();
  c.cadence = j.at("cadence").get<int>();
  c.diag_s = j.at("diag_s").get<double>();
  c.validate();
  return c;
}

template <class T>
std::vector<T> list_of(const json& v, const char* what) {
  if (!v.is_array() || v.empty()) throw ParameterError(fmt::format("{}: expected a non-empty list", what));
  return v.get<std::vector<T>>();
}

std::vector<double> pow2_range(int lo, int hi) {
  std::vector<double> v;
  for (int k = lo; k <= hi; ++k) v.push_back(std::ldexp(1.0, k));
  return v;
}

std::vector<std::int64_t> int_pow2_range(int lo, int hi) {
  std::vector<std::int64_t> v;
  for (int k = lo; k <= hi; ++k) v.push_back(std::int64_t{1} << k);
  return v;
}

std::string g17(double x) { return fmt::format("{:.17g}", x); }

Report dry() {
  Report r;
  r.line = "parameters ok (dry run)";
  return r;
}

// fitted slope of an estimate report, NaN when no fit
double slope_of(const EstimateReport& r) { return r.fit ? r.fit->slope : std::nan(""); }

// ---- simulate -------------------------------------------------------------------

Report run_simulate(const json& P, const Context& ctx) {
  const SystemParams p = system_of(P);
  const Grid g = grid_of(P, p.d);
  const DataSpec ds = data_of(P);
  SolverConfig sc = solver_of(P);
  sc.keep_snapshots = P.at("keep_snapshots").get<bool>();
  if (ctx.dry_run) return dry();
  const Trajectory traj = simulate(make_data(g, ds), p, sc);
  Report r;
  export_trajectory(traj, ctx.dir / "trajectory");  // final state only without snapshots
  double d1 = 0.0, d2 = 0.0;
  for (const auto& x : traj.diagnostics) {
    d1 = std::max(d1, x.drift1);
    d2 = std::max(d2, x.drift2);
  }
  const auto& last = traj.diagnostics.back();
  r.summary = {{"steps", sc.steps()},       {"snapshots", traj.snapshots.size()}, {"final_time", last.t},
               {"max_drift_Q1", d1},        {"max_drift_Q2", d2},                 {"Hs_u", last.Hs_u},
               {"Hs_v", last.Hs_v},         {"Hs_w", last.Hs_w}};
  r.line = fmt::format("simulate: {} steps to t = {:.6g}, drift Q1 {:.3e}, Q2 {:.3e}", sc.steps(), last.t, d1, d2);
  r.band_ok = d1 <= 1e-8 && d2 <= 1e-8;
  r.band_note = "conserved-quantity drift <= 1e-8";
  return r;
}

// ---- picard ---------------------------------------------------------------------

Report run_picard(const json& P, const Context& ctx) {
  const SystemParams p = system_of(P);
  const Grid g = grid_of(P, p.d);
  const DataSpec ds = data_of(P);
  const double T = P.at("T").get<double>(), s = P.at("s").get<double>();
  const int n_iter = P.at("n_iter").get<int>(), n_t = P.at("n_t").get<int>();
  if (!(T > 0.0) || n_iter < 1 || n_t < 1) throw ParameterError("picard: needs T > 0, n_iter >= 1, n_t >= 1");
  if (ctx.dry_run) return dry();
  const PicardResult pr = picard_iterate(make_data(g, ds), p, T, n_iter, n_t, s, P.at("dealias").get<bool>());
  Report r;
  std::string csv = "iteration,delta\n";
  for (std::size_t i = 0; i < pr.deltas.size(); ++i) csv += fmt::format("{},{}\n", i + 1, g17(pr.deltas[i]));
  r.files["picard.csv"] = csv;
  double rate = 0.0;
  for (std::size_t i = 1; i < pr.deltas.size(); ++i)
    if (pr.deltas[i - 1] > 0.0) rate = std::max(rate, pr.deltas[i] / pr.deltas[i - 1]);
  r.summary = {{"deltas", pr.deltas}, {"diverged", pr.diverged}, {"max_contraction", rate}};
  r.line = fmt::format("picard: {} iterations, last delta {:.3e}, max contraction {:.3f}{}", pr.deltas.size(),
                       pr.deltas.empty() ? 0.0 : pr.deltas.back(), rate, pr.diverged ? " (diverged)" : "");
  r.band_ok = !pr.diverged;
  r.band_note = "iteration does not diverge";
  return r;
}

// ---- energy-scan ----------------------------------------------------------------

EnergyConfig energy_of(const json& P) {
  const json& j = P.at("energy");
  EnergyConfig c;
  c.s = j.at("s").get<double>();
  c.s_tilde = j.at("s_tilde").get<double>();
  c.C_tilde = j.at("C_tilde").get<double>();
  c.validate();
  return c;
}

json coercivity_json(const CoercivityResult& c) {
  return {{"C_tilde", c.C_tilde},         {"exponent", c.exponent},
          {"capped", c.capped},           {"required", c.required},
          {"empirical_constant", c.empirical_constant}, {"violations_at_C", c.violations_at_C}};
}

Report run_energy_scan(const json& P, const Context& ctx) {
  const SystemParams p = system_of(P);
  const Grid g = grid_of(P, p.d);
  const DataSpec ds = data_of(P);
  const EnergyConfig ec = energy_of(P);
  const auto scales = list_of<std::int64_t>(P.at("scales"), "energy-scan scales");
  const std::string mode = P.at("mode").get<std::string>();
  if (mode != "scan" && mode != "coercivity") throw ParameterError("energy-scan: mode is scan or coercivity");
  Report r;
  if (mode == "scan") {
    SolverConfig sc = solver_of(P);
    if (ctx.dry_run) return dry();
    const Trajectory traj = simulate(make_data(g, ds), p, sc);
    const EnergyReport er = energy_scan(traj, ec, p, scales);
    r.files["energy.csv"] = energy_csv(er);
    r.summary = er.summary;
    const double drift = er.drift.empty() ? 0.0 : *std::max_element(er.drift.begin(), er.drift.end());
    double cmin = kInf;
    for (const auto& row : er.rows)
      if (row.E_N != 0.0) cmin = std::min(cmin, row.coercivity_ratio);  // empty shells carry no information
    r.summary["max_drift"] = drift;
    r.summary["min_coercivity_ratio"] = cmin;
    r.line = fmt::format("energy-scan: {} rows, max drift {:.3e}, min E_N / (N^2s~ |P_N U|^2) {:.4f}", er.rows.size(),
                         drift, cmin);
    r.band_ok = cmin >= 0.5;
    r.band_note = "coercivity ratio >= 1/2 along the trajectory";
    return r;
  }
  const json& cj = P.at("coercivity");
  const int n = cj.at("ensemble").get<int>();
  const double lo = cj.at("amp_lo").get<double>(), hi = cj.at("amp_hi").get<double>();
  if (n < 1 || !(lo > 0.0 && hi >= lo)) throw ParameterError("energy-scan: bad coercivity ensemble");
  if (ctx.dry_run) return dry();
  const auto e1 = random_ensemble(g, n, ds, lo, hi);
  DataSpec ds2 = ds;
  ds2.seed = ds.seed + 1;
  const auto e2 = random_ensemble(g, n, ds2, lo, hi);
  EnergyConfig ec0 = ec;
  const CoercivityResult c = coercivity_search(e1, ec0, p, scales);
  const CoercivityResult c0 = difference_coercivity_search(e1, e2, 0.0, ec0, p, scales);
  const CoercivityResult cs = difference_coercivity_search(e1, e2, ec.s, ec0, p, scales);
  std::string csv = "energy,C_tilde,required,empirical_constant,violations\n";
  for (auto [name, res] : {std::pair<const char*, const CoercivityResult*>{"E", &c}, {"difference_r0", &c0},
                           {"difference_rs", &cs}})
    csv += fmt::format("{},{},{},{},{}\n", name, g17(res->C_tilde), g17(res->required), g17(res->empirical_constant),
                       res->violations_at_C);
  r.files["coercivity.csv"] = csv;
  r.summary = {{"E", coercivity_json(c)}, {"difference_r0", coercivity_json(c0)}, {"difference_rs", coercivity_json(cs)},
               {"ensemble", n}};
  const long viol = c.violations_at_C + c0.violations_at_C + cs.violations_at_C;
  const bool capped = c.capped || c0.capped || cs.capped;
  r.line = fmt::format("energy-scan coercivity: C~ = {:g} / {:g} / {:g}, violations {}{}", c.C_tilde, c0.C_tilde,
                       cs.C_tilde, viol, capped ? ", search capped" : "");
  r.band_ok = viol == 0 && !capped;
  r.band_note = "zero coercivity violations at the searched constant";
  return r;
}

// ---- energy-identity -------------------------------------------------------------

Report run_energy_identity(const json& P, const Context& ctx) {
  const SystemParams p = system_of(P);
  const Grid g = grid_of(P, p.d);
  const DataSpec ds = data_of(P);
  const SolverConfig base = solver_of(P);
  const auto dts = list_of<double>(P.at("dts"), "energy-identity dts");
  const auto scales = list_of<std::int64_t>(P.at("scales"), "energy-identity scales");
  const bool control = P.at("control").get<bool>();
  for (double dt : dts) {
    SolverConfig c = base;
    c.dt = dt;
    c.validate();
  }
  if (dts.size() < 2) throw ParameterError("energy-identity: needs at least two time steps");
  if (ctx.dry_run) return dry();
  const StateBundle data = make_data(g, ds);
  struct Row {
    std::int64_t N;
    double dt;
    std::string variant;
    double residual, scale;
  };
  std::vector<Row> rows;
  for (double dt : dts) {
    SolverConfig c = base;
    c.dt = dt;
    const Trajectory traj = simulate(data, p, c);
    for (auto N : scales) {
      auto ex = energy_identity_residual(traj, N, p, IdentityVariant::Exact, c.dealias);
      rows.push_back({N, dt, "exact", ex.max_residual, ex.max_scale});
      if (control) {
        auto ct = energy_identity_residual(traj, N, p, IdentityVariant::AlphaEqualsGamma, c.dealias);
        rows.push_back({N, dt, "alpha_eq_gamma", ct.max_residual, ct.max_scale});
      }
    }
  }
  Report r;
  std::string csv = "N,dt,variant,max_residual,max_abs_lhs,ratio\n";
  json ratios = json::object();
  bool ok = true;
  double worst_lo = kInf, worst_hi = 0.0;
  for (const auto& row : rows) {
    double ratio = std::nan("");
    for (const auto& prev : rows)
      if (prev.N == row.N && prev.variant == row.variant && prev.dt == 2.0 * row.dt && row.residual > 0.0)
        ratio = prev.residual / row.residual;
    csv += fmt::format("{},{},{},{},{},{}\n", row.N, g17(row.dt), row.variant, g17(row.residual), g17(row.scale),
                       std::isnan(ratio) ? "" : g17(ratio));
    if (std::isnan(ratio)) continue;
    ratios[fmt::format("{}/N={}", row.variant, row.N)].push_back(ratio);
    if (row.variant == "exact") {
      ok = ok && ratio >= 2.5 && ratio <= 6.0;
      worst_lo = std::min(worst_lo, ratio);
      worst_hi = std::max(worst_hi, ratio);
    }
  }
  // control: residual stays put under refinement and dwarfs the exact one
  double ctrl_gap = kInf;
  if (control)
    for (const auto& row : rows)
      if (row.variant == "exact" && row.dt == dts.back())
        for (const auto& c : rows)
          if (c.variant != "exact" && c.N == row.N && c.dt == row.dt)
            ctrl_gap = std::min(ctrl_gap, c.residual / std::max(row.residual, 1e-300));
  if (control) ok = ok && ctrl_gap >= 10.0;
  r.files["identity.csv"] = csv;
  r.summary = {{"halving_ratios", ratios}, {"min_exact_ratio", worst_lo}, {"max_exact_ratio", worst_hi}};
  if (control) r.summary["control_over_exact"] = ctrl_gap;
  r.line = fmt::format("energy-identity: exact halving ratios in [{:.3f}, {:.3f}]{}", worst_lo, worst_hi,
                       control ? fmt::format(", control/exact >= {:.1f}", ctrl_gap) : "");
  r.band_ok = ok;
  r.band_note = "halving ratios in [2.5, 6], control residual >= 10x exact";
  return r;
}

// ---- converge --------------------------------------------------------------------

Report run_converge(const json& P, const Context& ctx) {
  ConvergenceConfig c;
  c.params = system_of(P);
  c.grid = grid_of(P, c.params.d);
  c.data = data_of(P);
  c.solver = solver_of(P);
  c.solver.keep_snapshots = true;
  c.K = list_of<double>(P.at("Ks"), "converge Ks");
  c.monotone_tol = P.at("monotone_tol").get<double>();
  if (2.0 * c.K.back() > c.grid.dealias_cutoff())
    throw ParameterError(fmt::format("converge: reference K = {} exceeds the dealias cutoff {:.4g}", 2.0 * c.K.back(),
                                     c.grid.dealias_cutoff()));
  if (ctx.dry_run) return dry();
  const ConvergenceResult res = convergence_study(c);
  Report r;
  r.files["convergence.csv"] = convergence_csv(res);
  r.summary = {{"K", res.K},           {"error", res.error},   {"K_ref", res.K_ref},
               {"fit", to_json(res.fit)}, {"monotone", res.monotone}, {"smooth_regime", res.smooth_regime},
               {"predicted_slope", res.predicted_slope}, {"notes", res.notes}};
  r.line = fmt::format("converge: slope {:.3f} (bound {:.3f}), {}", res.fit.slope, res.predicted_slope,
                       res.monotone ? "monotone" : "NOT monotone");
  r.band_ok = res.monotone && res.fit.slope <= res.predicted_slope + 0.3;
  r.band_note = "errors monotone, slope <= -(s - (d+1)/2) + 0.3";
  return r;
}

// ---- continuity ------------------------------------------------------------------

Report run_continuity(const json& P, const Context& ctx) {
  const SystemParams p = system_of(P);
  const Grid g = grid_of(P, p.d);
  const DataSpec ds = data_of(P);
  const SolverConfig sc = solver_of(P);
  const auto eps = list_of<double>(P.at("eps"), "continuity eps");
  const auto J = list_of<double>(P.at("ladder"), "continuity ladder");
  const double s = P.at("s").get<double>();
  if (ctx.dry_run) return dry();
  const StateBundle data = make_data(g, ds);
  const ContinuityResult cr = flow_continuity_probe(data, eps, s, p, sc);
  const LadderResult lr = smoothing_ladder(data, J, s, p, sc);
  Report r;
  r.files["continuity.csv"] = continuity_csv(cr);
  r.files["ladder.csv"] = ladder_csv(lr);
  double amp = 0.0;
  for (const auto& row : cr.rows) amp = std::max(amp, row.amplification);
  r.summary = {{"monotone", cr.monotone}, {"max_amplification", amp}, {"ladder_partial_sum", lr.partial_sum},
               {"ladder_tail_ratio", lr.tail_ratio}};
  r.line = fmt::format("continuity: max amplification {:.4g}, ladder tail ratio {:.3e}", amp, lr.tail_ratio);
  bool ladder_shrinks = true;
  for (std::size_t i = 1; i < lr.distance.size(); ++i) ladder_shrinks = ladder_shrinks && lr.distance[i] <= lr.distance[i - 1];
  r.summary["ladder_nonincreasing"] = ladder_shrinks;
  r.band_ok = cr.monotone && ladder_shrinks;
  r.band_note = "distances shrink with eps, ladder rungs non-increasing";
  return r;
}

// ---- estimates ---------------------------------------------------------------------

void estimate_files(Report& r, const EstimateReport& e, const std::string& stem) {
  r.files[stem + ".csv"] = report_csv(e);
  r.summary = report_summary(e);
}

Report run_verify_bilinear(const json& P, const Context& ctx) {
  BilinearConfig c;
  c.N1 = list_of<std::int64_t>(P.at("N1"), "verify-bilinear N1");
  c.N2 = P.at("N2").get<std::int64_t>();
  c.j1 = P.at("j1").get<int>();
  c.j2 = P.at("j2").get<int>();
  c.sigma1 = P.at("sigma1").get<double>();
  c.sigma2 = P.at("sigma2").get<double>();
  c.ensemble = P.at("ensemble").get<int>();
  c.seed = P.at("seed").get<std::uint64_t>();
  c.bins = P.at("bins").get<int>();
  c.panels = P.at("panels").get<int>();
  c.interp_a = P.at("interp_a").get<double>();
  validate(c);
  if (ctx.dry_run) return dry();
  const EstimateReport e = bilinear_ratio_experiment(c);
  Report r;
  estimate_files(r, e, "bilinear");
  const double sl = slope_of(e);
  r.line = fmt::format("verify-bilinear: sup-ratio slope {:.4f} over {} scales", sl, e.scales.size());
  // the interpolated bound only has to hold, the plain one is sharp
  r.band_ok = e.fit && (c.interp_a == 0.0 ? std::abs(sl) <= 0.1 : sl <= 0.1);
  r.band_note = c.interp_a == 0.0 ? "|slope| <= 0.1" : "slope <= 0.1";
  return r;
}

Report run_verify_trilinear(const json& P, const Context& ctx) {
  const std::string est = P.at("estimate").get<std::string>();
  Report r;
  if (est == "trilinear") {
    TrilinearConfig c;
    c.params = system_of(P);
    c.T = P.at("T").get<double>();
    c.scales = list_of<std::int64_t>(P.at("scales"), "verify-trilinear scales");
    c.low = P.at("low").get<std::int64_t>();
    c.kind = trilinear_case_from_string(P.at("case").get<std::string>());
    c.ensemble = P.at("ensemble").get<int>();
    c.seed = P.at("seed").get<std::uint64_t>();
    c.window = P.at("window").get<int>();
    validate(c);
    if (ctx.dry_run) return dry();
    const EstimateReport e = trilinear_ratio_experiment(c);
    estimate_files(r, e, "trilinear");
    const double sl = slope_of(e);
    r.line = fmt::format("verify-trilinear ({}): sup-ratio slope {:.4f}", trilinear_case_name(c.kind), sl);
    r.band_ok = e.fit && std::abs(sl) <= 0.1;
    r.band_note = "|slope| <= 0.1";
    return r;
  }
  if (est != "quadratic") throw ParameterError("verify-trilinear: estimate is trilinear or quadratic");
  const json& q = P.at("quadratic");
  QuadraticConfig c;
  c.s = q.at("s").get<double>();
  c.s_tilde = q.at("s_tilde").get<double>();
  c.sigma1 = q.at("sigma1").get<double>();
  c.sigma2 = q.at("sigma2").get<double>();
  c.kind = quadratic_case_from_string(q.at("case").get<std::string>());
  c.n_t = q.at("n_t").get<int>();
  c.coherent = q.at("coherent").get<bool>();
  c.scales = list_of<std::int64_t>(P.at("scales"), "verify-trilinear scales");
  c.low = P.at("low").get<std::int64_t>();
  c.ensemble = P.at("ensemble").get<int>();
  c.seed = P.at("seed").get<std::uint64_t>();
  c.T = P.at("T").get<double>();
  validate(c);
  if (ctx.dry_run) return dry();
  const EstimateReport e = quadratic_estimate_experiment(c);
  estimate_files(r, e, "quadratic");
  const double sl = slope_of(e);
  r.line = fmt::format("verify-trilinear (quadratic {}): sup-ratio slope {:.4f}", quadratic_case_name(c.kind), sl);
  r.band_ok = e.fit && sl <= 0.1;
  r.band_note = "slope <= 0.1 (bounded ratio)";
  return r;
}

Report run_dichotomy(const json& P, const Context& ctx) {
  const SystemParams p = system_of(P);
  const int kmin = P.at("kmin").get<int>(), kmax = P.at("kmax").get<int>();
  const long fuzz = P.at("fuzz").get<long>();
  if (kmin > kmax || fuzz < 0) throw ParameterError("dichotomy: needs kmin <= kmax and fuzz >= 0");
  dichotomy_check(1.0, 0.0, p);  // parameter validation
  if (ctx.dry_run) return dry();
  const DichotomySweep sw = dichotomy_sweep(p, kmin, kmax, fuzz, P.at("seed").get<std::uint64_t>());
  Report r;
  r.files["dichotomy.csv"] = dichotomy_csv(sw);
  r.summary = {{"points", sw.points.size()},      {"uncovered", sw.uncovered},
               {"region_A", sw.region_A},          {"region_B", sw.region_B},
               {"min_margin", sw.min_margin},      {"fuzz_samples", sw.fuzz_samples},
               {"max_relative_residual", sw.max_relative_residual}};
  r.line = fmt::format("dichotomy: {} points, {} uncovered, resonance residual {:.2e} over {} samples", sw.points.size(),
                       sw.uncovered, sw.max_relative_residual, sw.fuzz_samples);
  r.band_ok = sw.uncovered == 0 && sw.max_relative_residual <= 1e-12;
  r.band_note = "every lattice point certified, residual <= 1e-12";
  return r;
}

Report run_counterexample_a1(const json& P, const Context& ctx) {
  A1Config c;
  c.params = system_of(P);
  c.d = c.params.d;
  c.a = P.at("a").get<double>();
  c.s = P.at("s").get<double>();
  c.T = P.at("T").get<double>();
  const auto K = list_of<double>(P.at("Ks"), "counterexample-a1 Ks");
  c.K = K.front();
  if (!(c.a > 0.0 && c.a < 1.0)) throw ParameterError("counterexample-a1: a in (0, 1)");
  a1_boxes(c.K, c.a, c.d, c.params);
  if (ctx.dry_run) return dry();
  const EstimateReport e = counterexample_a1_sweep(c, K);
  Report r;
  estimate_files(r, e, "a1");
  const double sl = slope_of(e), pred = e.extra.at("predicted_exponent").get<double>();
  const double pexp = e.extra.at("phase_exponent").get<double>();
  const double psl = e.extra.contains("phase_fit") ? e.extra.at("phase_fit").at("slope").get<double>() : std::nan("");
  r.line = fmt::format("counterexample-a1: slope {:.4f} (predicted {:.4f}), phase slope {:.4f} (predicted {:.4f})", sl,
                       pred, psl, pexp);
  r.band_ok = e.fit && std::abs(sl - pred) <= 0.03 && std::abs(psl - pexp) <= 0.05;
  r.band_note = "slope within 0.03 of (1-a)/4, phase slope within 0.05 of 1-a-delta";
  return r;
}

Report run_counterexample_a2(const json& P, const Context& ctx) {
  A2Config c;
  c.params = system_of(P);
  c.d = c.params.d;
  c.regime = a2_regime_from_string(P.at("regime").get<std::string>());
  c.p_exp = P.at("p_exp").get<double>();
  c.s = P.at("s").get<double>();
  c.T = P.at("T").get<double>();
  c.C_tilde = P.at("C_tilde").get<double>();
  c.C2 = P.at("C2").get<double>();
  c.C3 = P.at("C3").get<double>();
  const auto K = list_of<double>(P.at("Ks"), "counterexample-a2 Ks");
  c.K = K.front();
  a2_boxes(c);
  if (ctx.dry_run) return dry();
  const EstimateReport e = counterexample_a2_sweep(c, K);
  Report r;
  estimate_files(r, e, "a2");
  const double sl = slope_of(e), pred = e.extra.at("predicted_slope").get<double>();
  r.line = fmt::format("counterexample-a2 ({}): constant slope {:.4f} (predicted {:.4f})", a2_regime_name(c.regime), sl,
                       pred);
  r.band_ok = e.fit && std::abs(sl - pred) <= 0.1;
  r.band_note = "slope within 0.1 of (d-1)/2 - s";
  return r;
}

Report run_classify(const json& P, const Context& ctx) {
  const SystemParams p = system_of(P);
  if (ctx.dry_run) return dry();
  const ResonanceReport rr = resonance_quantities(p);
  Report r;
  r.summary = to_json(rr);
  r.summary["params"] = to_json(p);
  r.line = fmt::format("classify: regime {}, kappa_tilde = {:g}{}", regime_name(rr.regime), rr.kappa_tilde,
                       rr.flagged ? " (flagged)" : "");
  return r;
}

std::vector<Command> build() {
  const json seed{{"seed", 1}};
  std::vector<Command> c;
  c.push_back({"simulate", "integrate the truncated system and record diagnostics",
               with(with(with(with(with(system_defaults(), grid_defaults("64pi", 4096)), data_defaults(1.6, 8.0)),
                               solver_defaults(1.0 / 4096.0, 1.0, 256)),
                          json{{"seed", 7}}),
                    json{{"keep_snapshots", true}}),
               run_simulate});
  c.push_back({"picard", "Duhamel fixed-point iteration",
               with(with(with(system_defaults(), grid_defaults("2pi", 256)), data_defaults(1.6, 0.1)),
                    json{{"seed", 1}, {"T", 0.25}, {"n_iter", 6}, {"n_t", 32}, {"s", 1.0}, {"dealias", true}}),
               run_picard});
  c.push_back({"energy-scan", "modified energies along a run, or the coercivity constant search",
               with(with(with(with(system_defaults(), grid_defaults("2pi", 512)), data_defaults(1.6, 1.0)),
                         solver_defaults(1.0 / 1024.0, 0.25, 16)),
                    json{{"seed", 1},
                         {"mode", "scan"},
                         {"energy", {{"s", 1.6}, {"s_tilde", 1.6}, {"C_tilde", 1.0}}},
                         {"scales", int_pow2_range(1, 6)},
                         {"coercivity", {{"ensemble", 200}, {"amp_lo", 0.1}, {"amp_hi", 10.0}}}}),
               run_energy_scan});
  c.push_back({"energy-identity", "energy-derivative identity residual under time-step halving",
               with(with(with(with(system_defaults(1.5), grid_defaults("8pi", 256)), data_defaults(1.6, 1.0)),
                         solver_defaults(1.0 / 4096.0, 1.0 / 16.0, 2)),
                    json{{"seed", 3},
                         {"dts", {1.0 / 4096.0, 1.0 / 8192.0, 1.0 / 16384.0}},
                         {"scales", {2, 4, 8}},
                         {"control", true}}),
               run_energy_identity});
  c.push_back({"converge", "Galerkin truncation error against a reference run",
               with(with(with(with(system_defaults(1.0, 1.0, 1.0, "inf"), grid_defaults("2pi", 1024)),
                              data_defaults(1.6, 0.3)),
                         solver_defaults(1.0 / 1024.0, 1.0, 16)),
                    json{{"seed", 1}, {"Ks", pow2_range(3, 7)}, {"monotone_tol", 0.05}}),
               run_converge});
  c.push_back({"continuity", "flow-map continuity probe and smoothing ladder",
               with(with(with(with(system_defaults(1.0, 1.0, 1.0, "inf"), grid_defaults("2pi", 256)),
                              data_defaults(1.6, 1.0)),
                         solver_defaults(1.0 / 4096.0, 0.25, 16)),
                    json{{"seed", 1}, {"s", 1.6}, {"eps", {1e-1, 1e-2, 1e-3, 1e-4}}, {"ladder", {4, 8, 16, 32, 64}}}),
               run_continuity});
  c.push_back({"verify-bilinear", "bilinear Strichartz ratio ensembles",
               json{{"seed", 1},
                    {"N1", int_pow2_range(4, 9)},
                    {"N2", 2},
                    {"j1", 0},
                    {"j2", 0},
                    {"sigma1", 1.0},
                    {"sigma2", 1.0},
                    {"ensemble", 50},
                    {"bins", 4},
                    {"panels", 12},
                    {"interp_a", 0.0}},
               run_verify_bilinear});
  c.push_back({"verify-trilinear", "trilinear (or quadratic) estimate ratio ensembles",
               with(system_defaults(1.0, 1.0, 1.0, "inf"),
                    json{{"seed", 1},
                         {"estimate", "trilinear"},
                         {"T", 1.0},
                         {"scales", int_pow2_range(4, 9)},
                         {"low", 2},
                         {"case", "high_high_low"},
                         {"ensemble", 50},
                         {"window", 1},
                         {"quadratic",
                          {{"s", 1.6}, {"s_tilde", 1.6}, {"sigma1", 1.0}, {"sigma2", 1.0}, {"case", "high_low"},
                           {"n_t", 8}, {"coherent", true}}}}),
               run_verify_trilinear});
  c.push_back({"dichotomy", "modulation dichotomy lattice sweep and resonance-identity fuzz",
               with(system_defaults(1.0, 1.0, 1.0, "inf"), json{{"seed", 1}, {"kmin", -6}, {"kmax", 6}, {"fuzz", 10000}}),
               run_dichotomy});
  c.push_back({"counterexample-a1", "one-dimensional optimality construction",
               with(system_defaults(1.0, 1.0, 1.0, "inf"),
                    json{{"seed", 1}, {"a", 0.5}, {"s", 0.0}, {"T", 1.0 / 16.0}, {"Ks", pow2_range(4, 10)}}),
               run_counterexample_a1});
  c.push_back({"counterexample-a2", "resonant trilinear construction",
               with(system_defaults(1.0, 1.0, 1.0, "inf", 2),
                    json{{"seed", 1},
                         {"regime", "multiD"},
                         {"p_exp", 3.0},
                         {"s", 0.0},
                         {"T", 1.0},
                         {"C_tilde", 32.0},
                         {"C2", 64.0},
                         {"C3", 16.0},
                         {"Ks", pow2_range(3, 7)}}),
               run_counterexample_a2});
  c.push_back({"classify", "resonance quantities and well-posedness regime",
               with(system_defaults(1.0, 1.0, 1.0, "inf"), seed), run_classify});
  return c;
}

}  // namespace

const std::vector<Command>& commands() {
  static const std::vector<Command> c = build();
  return c;
}

}  // namespace ccnls::cli
