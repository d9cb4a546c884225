#include <cmath>

#include "ccnls/norms.hpp"
#include "ccnls/solver.hpp"

namespace ccnls {

namespace {

double bundle_sup(const StateBundle& s) {
  return std::max({sup_norm(s.u), sup_norm(s.v), sup_norm(s.w)});
}

Diagnostics light_diag(const StateBundle& s, double s_idx) {
  Diagnostics d;
  d.t = s.time;
  Conserved c = conserved_quantities(s);
  d.Q1 = c.Q1;
  d.Q2 = c.Q2;
  d.Hs_u = sobolev_norm(s.u, s_idx);
  d.Hs_v = sobolev_norm(s.v, s_idx);
  d.Hs_w = sobolev_norm(s.w, s_idx);
  return d;
}

}  // namespace

PicardResult picard_iterate(const StateBundle& data, const SystemParams& p, double T, int n_iter, int n_t, double s,
                            bool dealias) {
  data.check();
  p.validate();
  if (std::isinf(p.K)) throw ParameterError("picard: requires a finite truncation K");
  if (!(T > 0.0 && T <= 1.0)) throw ParameterError("picard: T must lie in (0, 1]");
  if (n_iter < 0 || n_t < 1) throw ParameterError("picard: need n_iter >= 0 and n_t >= 1");
  const Grid& g = data.grid();
  const double K = p.effective_K(g, dealias);
  const double h = T / n_t;
  StateBundle U0 = sharp_truncate(data, K);
  U0.time = 0.0;

  // lag[k] = e^{i k h Lap}-type propagators for k = 0..n_t
  std::vector<StateBundle> free(n_t + 1);
  for (int m = 0; m <= n_t; ++m) free[m] = linear_flow(U0, p, m * h);

  PicardResult res;
  auto pack = [&](const std::vector<StateBundle>& frames) {
    Trajectory tr;
    tr.snapshot_dt = h;
    tr.snapshots = frames;
    tr.final_state = frames.back();
    for (const auto& f : frames) tr.diagnostics.push_back(light_diag(f, s));
    return tr;
  };
  std::vector<StateBundle> cur = free;
  res.iterates.push_back(pack(cur));

  for (int it = 0; it < n_iter; ++it) {
    std::vector<StateBundle> rhs(n_t + 1);
    for (int l = 0; l <= n_t; ++l) rhs[l] = nonlinear_rhs(cur[l], p, dealias);
    std::vector<StateBundle> next(n_t + 1);
    double delta = 0.0;
    for (int m = 0; m <= n_t; ++m) {
      StateBundle acc = free[m];
      for (int l = 0; l <= m && m > 0; ++l) {
        double wgt = (l == 0 || l == m) ? 0.5 * h : h;
        acc.axpy(wgt, linear_flow(rhs[l], p, (m - l) * h));
      }
      acc.time = m * h;
      delta = std::max(delta, sobolev_norm(acc - cur[m], s));
      next[m] = std::move(acc);
    }
    res.deltas.push_back(delta);
    cur = std::move(next);
    res.iterates.push_back(pack(cur));
    double sup = 0.0;
    for (const auto& f : cur) sup = std::max(sup, bundle_sup(f));
    if (!std::isfinite(sup) || sup > 1e6) {
      res.diverged = true;
      break;
    }
  }
  return res;
}

}  // namespace ccnls
