#include <algorithm>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "ccnls/experiments.hpp"
#include "ccnls/norms.hpp"
#include "ccnls/parallel.hpp"

namespace ccnls {

namespace {

double bundle_distance(const StateBundle& a, const StateBundle& b, double s) { return sobolev_norm(a - b, s); }

double sup_distance(const Trajectory& a, const Trajectory& b, double s) {
  if (a.snapshots.size() != b.snapshots.size())
    throw std::logic_error("studies: snapshot lattices differ");
  double best = 0.0;
  for (std::size_t i = 0; i < a.snapshots.size(); ++i)
    best = std::max(best, bundle_distance(a.snapshots[i], b.snapshots[i], s));
  return best;
}

}  // namespace

ConvergenceResult convergence_study(const ConvergenceConfig& cfg) {
  cfg.data.validate();
  cfg.params.validate();
  cfg.solver.validate();
  if (cfg.K.empty()) throw ParameterError("converge: empty K list");
  for (std::size_t i = 0; i < cfg.K.size(); ++i) {
    if (!(cfg.K[i] > 0.0) || std::isinf(cfg.K[i])) throw ParameterError("converge: K values must be finite and positive");
    if (i > 0 && !(cfg.K[i] > cfg.K[i - 1])) throw ParameterError("converge: K list must be increasing");
    if (!is_power_of_two(std::llround(cfg.K[i])) || cfg.K[i] != std::round(cfg.K[i]))
      throw ParameterError("converge: K list must be dyadic");
  }
  const Grid& g = cfg.grid;
  ConvergenceResult res;
  res.K_ref = 2.0 * cfg.K.back();
  if (res.K_ref > g.dealias_cutoff())
    throw ParameterError(fmt::format("converge: reference K = {} exceeds the dealiasing cutoff {:.4g} of the grid",
                                     res.K_ref, g.dealias_cutoff()));
  StateBundle data = make_data(g, cfg.data);

  SolverConfig run = cfg.solver;
  run.keep_snapshots = true;
  SolverConfig ref = run;
  ref.dt = run.dt / 4.0;
  ref.cadence = run.cadence * 4;

  // job 0 is the reference, the others the K list
  std::vector<Trajectory> trajs = parallel_map(cfg.K.size() + 1, [&](std::size_t i) {
    SystemParams p = cfg.params;
    p.K = i == 0 ? res.K_ref : cfg.K[i - 1];
    if (i > 0 && cfg.K[i - 1] == res.K_ref) return Trajectory{};
    return simulate(data, p, i == 0 ? ref : run);
  });
  const Trajectory& truth = trajs[0];
  for (std::size_t i = 0; i < cfg.K.size(); ++i) {
    res.K.push_back(cfg.K[i]);
    res.error.push_back(cfg.K[i] == res.K_ref ? 0.0 : sup_distance(trajs[i + 1], truth, 0.0));
  }
  for (std::size_t i = 1; i < res.error.size(); ++i)
    if (res.error[i] > (1.0 + cfg.monotone_tol) * res.error[i - 1]) {
      res.monotone = false;
      res.notes.push_back(fmt::format("error increases from K = {} ({:.6g}) to K = {} ({:.6g})", res.K[i - 1],
                                      res.error[i - 1], res.K[i], res.error[i]));
    }
  res.predicted_slope = -(cfg.data.s - 0.5 * (g.d + 1));
  std::vector<double> kx, ey;
  for (std::size_t i = 0; i < res.K.size(); ++i)
    if (res.error[i] > 0.0) {
      kx.push_back(res.K[i]);
      ey.push_back(res.error[i]);
    }
  if (kx.size() >= 4) {
    res.fit = rate_fit(kx, ey);
    if (res.fit.slope <= -3.0) {
      res.smooth_regime = true;
      res.notes.push_back("smooth regime, rate bound vacuous");
    }
  } else {
    res.notes.push_back("fewer than 4 nonzero errors: no slope reported");
  }
  return res;
}

std::string convergence_csv(const ConvergenceResult& r) {
  std::ostringstream os;
  os << "K,error\n";
  for (std::size_t i = 0; i < r.K.size(); ++i) os << fmt::format("{:.17g},{:.17g}\n", r.K[i], r.error[i]);
  return os.str();
}

ContinuityResult flow_continuity_probe(const StateBundle& data, const std::vector<double>& eps, double s,
                                       const SystemParams& p, const SolverConfig& cfg) {
  data.check();
  if (eps.empty()) throw ParameterError("continuity: empty perturbation list");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] >= 0.0)) throw ParameterError("continuity: perturbation sizes must be >= 0");
    if (i > 0 && !(eps[i] < eps[i - 1])) throw ParameterError("continuity: perturbation sizes must decrease");
  }
  const Grid& g = data.grid();
  DataSpec dir_spec;
  dir_spec.s = std::max(s, 0.5);
  dir_spec.seed = 0x5eedULL;
  StateBundle dir = sobolev_random_data(g, dir_spec);
  dir *= 1.0 / sobolev_norm(dir, s);
  SolverConfig run = cfg;
  run.keep_snapshots = true;

  std::vector<Trajectory> trajs = parallel_map(eps.size() + 1, [&](std::size_t i) {
    StateBundle d0 = data;
    if (i > 0) d0.axpy(eps[i - 1], dir);
    return simulate(d0, p, run);
  });
  ContinuityResult res;
  const StateBundle& base0 = trajs[0].snapshots.front();
  double hi = sobolev_norm(base0, 2.0 * s);
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const Trajectory& t = trajs[i + 1];
    ContinuityRow row;
    row.eps = eps[i];
    row.initial_distance = bundle_distance(t.snapshots.front(), base0, s);
    row.sup_distance = sup_distance(t, trajs[0], s);
    row.amplification = row.initial_distance > 0.0 ? row.sup_distance / row.initial_distance : 0.0;
    row.sqrt_loss_shape = std::sqrt(bundle_distance(t.snapshots.front(), base0, 0.0)) * std::sqrt(hi);
    if (!res.rows.empty() && !(row.sup_distance < res.rows.back().sup_distance || row.sup_distance == 0.0))
      res.monotone = false;
    res.rows.push_back(row);
  }
  return res;
}

LadderResult smoothing_ladder(const StateBundle& data, const std::vector<double>& J, double s,
                              const SystemParams& p, const SolverConfig& cfg) {
  data.check();
  if (J.size() < 2) throw ParameterError("ladder: need at least two J values");
  for (std::size_t i = 0; i < J.size(); ++i) {
    if (!is_power_of_two(std::llround(J[i])) || J[i] != std::round(J[i]))
      throw ParameterError("ladder: J values must be dyadic");
    if (i > 0 && !(J[i] > J[i - 1])) throw ParameterError("ladder: J values must increase");
  }
  SolverConfig run = cfg;
  run.keep_snapshots = true;
  std::vector<Trajectory> trajs = parallel_map(J.size(), [&](std::size_t i) {
    StateBundle d0(project_low(data.u, std::llround(J[i])), project_low(data.v, std::llround(J[i])),
                   project_low(data.w, std::llround(J[i])), data.time);
    return simulate(d0, p, run);
  });
  LadderResult res;
  res.J = J;
  for (std::size_t i = 0; i + 1 < J.size(); ++i) {
    res.distance.push_back(sup_distance(trajs[i + 1], trajs[i], s));
    res.partial_sum += res.distance.back();
  }
  res.tail_ratio = res.distance.front() > 0.0 ? res.distance.back() / res.distance.front() : 0.0;
  return res;
}

std::string continuity_csv(const ContinuityResult& r) {
  std::ostringstream os;
  os << "eps,initial_distance,sup_distance,amplification,sqrt_loss_shape\n";
  for (const auto& x : r.rows)
    os << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", x.eps, x.initial_distance, x.sup_distance,
                      x.amplification, x.sqrt_loss_shape);
  return os.str();
}

std::string ladder_csv(const LadderResult& r) {
  std::ostringstream os;
  os << "J,J_next,distance\n";
  for (std::size_t i = 0; i < r.distance.size(); ++i)
    os << fmt::format("{:.17g},{:.17g},{:.17g}\n", r.J[i], r.J[i + 1], r.distance[i]);
  return os.str();
}

}  // namespace ccnls
