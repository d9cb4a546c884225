#include <cmath>

#include "ccnls/energy.hpp"
#include "ccnls/norms.hpp"

namespace ccnls {

namespace {

// Grid quadrature of a * b for scalar fields (no implicit conjugation).
cplx integral(const Field& a, const Field& b) {
  Field x = a.physical(), y = b.physical();
  if (x.ncomp() != 1 || y.ncomp() != 1) throw std::logic_error("integral: scalar fields expected");
  cplx acc = 0.0;
  for (std::size_t i = 0; i < x.comp[0].size(); ++i) acc += x.comp[0][i] * y.comp[0][i];
  return acc * a.grid.cell_volume();
}

double im_int(const Field& a, const Field& b) { return integral(a, b).imag(); }

}  // namespace

double identity_functional(const StateBundle& s, DyadicScale N, const SystemParams& p) {
  double bg = p.beta + p.gamma;
  if (bg == 0.0) throw ParameterError("energy identity: beta + gamma = 0");
  return 0.5 * (l2_norm_squared(project_dyadic(s, N)) + 4.0 / bg * correction_M_N(s.u, s.v, s.w, N));
}

IdentityTerms identity_rhs(const StateBundle& s, DyadicScale N, const SystemParams& p, IdentityVariant variant,
                           bool dealias) {
  if (N.N < 2) throw ParameterError("energy identity: N must be >= 2");
  double bg = p.beta + p.gamma;
  if (bg == 0.0) throw ParameterError("energy identity: beta + gamma = 0");
  const Grid& g = s.grid();
  const double K = p.effective_K(g, dealias);
  const Field& u = s.u;
  const Field& v = s.v;
  const Field& w = s.w;
  Field Pu = project_dyadic(u, N), Pv = project_dyadic(v, N), Pw = project_dyadic(w, N);
  Field conjPu = conj(Pu), conjPv = conj(Pv);
  Field divw = divergence(w);
  Field divPw = divergence(Pw);
  Field D = divergence(inverse_laplacian(Pw));  // div Lap^{-1} P_N w
  Field conjD = conj(D);

  IdentityTerms out;
  // commutator terms
  auto one = [&] {
    Field f(g, 1, Rep::Physical);
    for (auto& z : f.comp[0]) z = 1.0;
    return f;
  }();
  double rhs1 = -im_int(dot(commutator_pn(v, divw, N), conjPu), one);
  double rhs2 = -im_int(dot(commutator_pn(u, conj(divw), N), conjPv), one);
  double rhs3 = -im_int(double_commutator(u, conj(v), N), conj(divPw));
  out.rhs123 = rhs1 + rhs2 + rhs3;

  Nonlinearity nl = nonlinearity(s, p, dealias);
  double X = im_int(dot(laplacian(u), conjPv), conjD);
  out.laplacian_pair = X;
  double alpha_used = variant == IdentityVariant::Exact ? p.alpha : p.gamma;
  double rhs5 = -alpha_used * X - im_int(dot(nl.Nu, conjPv), conjD);
  Field uvbarJ = sharp_truncate(dot(u, conj(v)), K);
  double rhs6 = -im_int(dot(u, conjPv), conj(project_dyadic(uvbarJ, N)));
  double grad_terms = 0.0;
  for (int j = 0; j < g.d; ++j) grad_terms += im_int(dot(partial(u, j), conjPv), conj(partial(D, j)));
  double rhs7 = p.beta * X + 2.0 * p.beta * grad_terms + im_int(dot(u, conj(project_dyadic(nl.Nv, N))), conjD);
  out.rhs567 = rhs5 + rhs6 + rhs7;
  out.rhs = out.rhs123 + 2.0 / bg * out.rhs567;
  return out;
}

IdentityResidual energy_identity_residual(const Trajectory& traj, DyadicScale N, const SystemParams& p,
                                          IdentityVariant variant, bool dealias) {
  const auto& S = traj.snapshots;
  if (S.size() < 5) throw ParameterError("energy identity: need at least 5 snapshots (cadence too coarse)");
  if (!(traj.snapshot_dt > 0.0)) throw ParameterError("energy identity: snapshot spacing must be positive");
  std::vector<double> psi(S.size());
  for (std::size_t i = 0; i < S.size(); ++i) psi[i] = identity_functional(S[i], N, p);
  IdentityResidual res;
  for (std::size_t i = 1; i + 1 < S.size(); ++i) {
    IdentityTerms t = identity_rhs(S[i], N, p, variant, dealias);
    t.lhs = (psi[i + 1] - psi[i - 1]) / (2.0 * traj.snapshot_dt);
    t.residual = std::abs(t.lhs - t.rhs);
    res.t.push_back(S[i].time);
    res.max_residual = std::max(res.max_residual, t.residual);
    res.max_scale = std::max(res.max_scale, std::abs(t.lhs));
    res.terms.push_back(t);
  }
  return res;
}

}  // namespace ccnls
