#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "ccnls/norms.hpp"
#include "ccnls/solver.hpp"

namespace ccnls {

Integrator integrator_from_string(const std::string& s) {
  if (s == "InteractionRK4") return Integrator::InteractionRK4;
  if (s == "StrangSplit") return Integrator::StrangSplit;
  throw ParameterError("unknown integrator '" + s + "' (InteractionRK4 | StrangSplit)");
}

const char* integrator_name(Integrator i) {
  return i == Integrator::InteractionRK4 ? "InteractionRK4" : "StrangSplit";
}

void SolverConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ParameterError("solver: dt must be positive");
  if (!(T >= 0.0) || !std::isfinite(T)) throw ParameterError("solver: T must be nonnegative");
  if (cadence < 1) throw ParameterError("solver: cadence must be >= 1");
  (void)steps();
}

long SolverConfig::steps() const {
  double r = T / dt;
  long n = std::lround(r);
  if (std::abs(r - static_cast<double>(n)) > 1e-9 * std::max(1.0, r))
    throw ParameterError("solver: T must be an integer multiple of dt");
  return n;
}

Field linear_flow(const Field& f, double sigma, double t) {
  Field out = f.spectral();
  std::vector<double> xi2 = out.grid.xi_squared();
  for (auto& c : out.comp)
    for (std::size_t i = 0; i < c.size(); ++i) c[i] *= std::polar(1.0, -sigma * xi2[i] * t);
  return out;
}

StateBundle linear_flow(const StateBundle& s, const SystemParams& p, double t) {
  return StateBundle(linear_flow(s.u, p.alpha, t), linear_flow(s.v, p.beta, t), linear_flow(s.w, p.gamma, t),
                     s.time + t);
}

StateBundle nonlinear_rhs(const StateBundle& s, const SystemParams& p, bool dealias) {
  Nonlinearity n = nonlinearity(s, p, dealias);
  n.Nu *= cplx(0.0, 1.0);
  n.Nv *= cplx(0.0, 1.0);
  n.Nw *= cplx(0.0, -1.0);
  return StateBundle(std::move(n.Nu), std::move(n.Nv), std::move(n.Nw), s.time);
}

Conserved conserved_quantities(const StateBundle& s) {
  double u = l2_norm_squared(s.u), v = l2_norm_squared(s.v), w = l2_norm_squared(s.w);
  return {u + v, v - w};
}

namespace {

// Cached exponential multipliers for one step size.
struct Propagator {
  std::vector<cplx> e[3];
  Propagator(const Grid& g, const SystemParams& p, double t) {
    std::vector<double> xi2 = g.xi_squared();
    const double sig[3] = {p.alpha, p.beta, p.gamma};
    for (int k = 0; k < 3; ++k) {
      e[k].resize(xi2.size());
      for (std::size_t i = 0; i < xi2.size(); ++i) e[k][i] = std::polar(1.0, -sig[k] * xi2[i] * t);
    }
  }
  StateBundle apply(StateBundle s) const {
    s.to_spectral();
    Field* fs[3] = {&s.u, &s.v, &s.w};
    for (int k = 0; k < 3; ++k)
      for (auto& c : fs[k]->comp)
        for (std::size_t i = 0; i < c.size(); ++i) c[i] *= e[k][i];
    return s;
  }
};

class Stepper {
 public:
  Stepper(const Grid& g, const SystemParams& p, const SolverConfig& cfg)
      : p_(p), cfg_(cfg), full_(g, p, cfg.dt), half_(g, p, 0.5 * cfg.dt) {}

  StateBundle advance(const StateBundle& U) const {
    if (!cfg_.nonlinear) return full_.apply(U);
    const double h = cfg_.dt;
    if (cfg_.integrator == Integrator::InteractionRK4) {
      StateBundle k1 = F(U);
      StateBundle a = U;
      a.axpy(0.5 * h, k1);
      StateBundle k2 = F(half_.apply(a));
      StateBundle EU = half_.apply(U);
      StateBundle b = EU;
      b.axpy(0.5 * h, k2);
      StateBundle k3 = F(b);
      StateBundle c = half_.apply(EU);
      c.axpy(h, half_.apply(k3));
      StateBundle k4 = F(c);
      // U_{n+1} = E(h)U + h/6 (E(h)k1 + 2E(h/2)(k2 + k3) + k4)
      StateBundle acc = U;
      acc.axpy(h / 6.0, k1);
      StateBundle out = full_.apply(acc);
      StateBundle mid = k2;
      mid += k3;
      out.axpy(h / 3.0, half_.apply(mid));
      out.axpy(h / 6.0, k4);
      out.time = U.time + h;
      return out;
    }
    StateBundle U1 = half_.apply(U);
    StateBundle m = U1;
    m.axpy(0.5 * h, F(U1));
    U1.axpy(h, F(m));
    StateBundle out = half_.apply(U1);
    out.time = U.time + h;
    return out;
  }

 private:
  StateBundle F(const StateBundle& s) const { return nonlinear_rhs(s, p_, cfg_.dealias); }

  SystemParams p_;
  SolverConfig cfg_;
  Propagator full_, half_;
};

void require_truncated(const StateBundle& s, double K) {
  if (std::isinf(K)) return;
  StateBundle sp = s.spectral();
  const Grid& g = sp.grid();
  const Field* fs[3] = {&sp.u, &sp.v, &sp.w};
  for (const Field* f : fs)
    for (const auto& c : f->comp)
      for (std::size_t i = 0; i < c.size(); ++i)
        if (g.xi_abs(i) > K && c[i] != cplx(0.0))
          throw ParameterError("step: state is not J_{<=K}-truncated");
}

// Cheap sup-norm bound (1/M^d) sum |coef| before paying for an exact sup.
double spectral_l1_bound(const StateBundle& s) {
  double acc = 0.0;
  const Field* fs[3] = {&s.u, &s.v, &s.w};
  for (const Field* f : fs)
    for (const auto& c : f->comp)
      for (const auto& z : c) acc += std::abs(z);
  return acc / static_cast<double>(s.grid().size());
}

Diagnostics diagnose(const StateBundle& s, double s_idx, const Conserved& c0, double scale2) {
  Diagnostics d;
  d.t = s.time;
  Conserved c = conserved_quantities(s);
  d.Q1 = c.Q1;
  d.Q2 = c.Q2;
  d.Hs_u = sobolev_norm(s.u, s_idx);
  d.Hs_v = sobolev_norm(s.v, s_idx);
  d.Hs_w = sobolev_norm(s.w, s_idx);
  d.drift1 = c0.Q1 > 0.0 ? std::abs(c.Q1 - c0.Q1) / c0.Q1 : std::abs(c.Q1 - c0.Q1);
  d.drift2 = scale2 > 0.0 ? std::abs(c.Q2 - c0.Q2) / scale2 : std::abs(c.Q2 - c0.Q2);
  for (std::int64_t N : dyadic_scales(s.grid())) d.shell_mass.push_back(l2_norm_squared(project_dyadic(s, N)));
  return d;
}

}  // namespace

StateBundle step(const StateBundle& state, const SystemParams& p, const SolverConfig& cfg) {
  state.check();
  p.validate();
  cfg.validate();
  require_truncated(state, p.effective_K(state.grid(), cfg.dealias));
  Stepper st(state.grid(), p, cfg);
  StateBundle out = st.advance(state.spectral());
  if (!all_finite(out.u) || !all_finite(out.v) || !all_finite(out.w))
    throw InstabilityError("step: non-finite values after one step", Trajectory{}, 1);
  return out;
}

Trajectory simulate(const StateBundle& data, const SystemParams& p, const SolverConfig& cfg) {
  data.check();
  p.validate();
  cfg.validate();
  const Grid& g = data.grid();
  if (p.d != g.d) throw ParameterError("simulate: parameter dimension does not match grid");
  const double K = p.effective_K(g, cfg.dealias);
  StateBundle U = sharp_truncate(data, K);
  U.time = data.time;

  Trajectory traj;
  traj.snapshot_dt = cfg.dt * cfg.cadence;
  const Conserved c0 = conserved_quantities(U);
  const double scale2 = l2_norm_squared(U.v) + l2_norm_squared(U.w);
  auto record = [&](const StateBundle& s) {
    traj.diagnostics.push_back(diagnose(s, cfg.diag_s, c0, scale2));
    if (cfg.keep_snapshots) traj.snapshots.push_back(s);
  };
  record(U);

  const long n = cfg.steps();
  Stepper st(g, p, cfg);
  const double kmax = std::isinf(K) ? g.xi_max() : K;
  const double smax = std::max({std::abs(p.alpha), std::abs(p.beta), std::abs(p.gamma)});
  for (long k = 1; k <= n; ++k) {
    U = st.advance(U);
    bool bad = !all_finite(U.u) || !all_finite(U.v) || !all_finite(U.w);
    if (!bad && spectral_l1_bound(U) > 1e6)
      bad = std::max({sup_norm(U.u), sup_norm(U.v), sup_norm(U.w)}) > 1e6;
    if (bad) {
      traj.final_state = U;
      throw InstabilityError(
          fmt::format("simulate: instability at step {} (t = {:.6g}); dt*max|sigma|*K^2 = {:.3g}, dt*K = {:.3g}", k,
                      U.time, cfg.dt * smax * kmax * kmax, cfg.dt * kmax),
          std::move(traj), k);
    }
    if (k % cfg.cadence == 0) record(U);
  }
  traj.final_state = U;
  return traj;
}

std::string diagnostics_csv(const Trajectory& traj) {
  std::ostringstream os;
  os << "t,Q1,Q2,Hs_u,Hs_v,Hs_w,drift1,drift2\n";
  for (const auto& d : traj.diagnostics)
    os << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", d.t, d.Q1, d.Q2, d.Hs_u,
                      d.Hs_v, d.Hs_w, d.drift1, d.drift2);
  return os.str();
}

void export_trajectory(const Trajectory& traj, const std::filesystem::path& stem) {
  std::vector<StateBundle> frames = traj.snapshots;
  if (frames.empty()) frames.push_back(traj.final_state);
  nlohmann::json meta{{"kind", "trajectory"}, {"t0", frames.front().time}};
  write_container(stem.string() + ".bin", to_container(frames, traj.snapshot_dt), meta);
  std::ofstream os(stem.string() + ".csv", std::ios::trunc);
  if (!os) throw std::runtime_error("export_trajectory: cannot write " + stem.string() + ".csv");
  os << diagnostics_csv(traj);
}

}  // namespace ccnls
