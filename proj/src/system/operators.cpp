#include <cmath>

#include "ccnls/system.hpp"

namespace ccnls {

Field partial(const Field& f, int axis) {
  if (axis < 0 || axis >= f.grid.d) throw ParameterError("partial: axis out of range");
  Field out = f.spectral();
  const Grid& g = out.grid;
  for (auto& c : out.comp)
    for (std::size_t i = 0; i < c.size(); ++i) c[i] *= cplx(0.0, g.xi_axis(i, axis));
  return out;
}

Field divergence(const Field& f) {
  if (f.ncomp() != f.grid.d) throw ParameterError("divergence: need a d-component field");
  Field s = f.spectral();
  const Grid& g = s.grid;
  Field out(g, 1, Rep::Spectral);
  for (int a = 0; a < g.d; ++a)
    for (std::size_t i = 0; i < g.size(); ++i) out.comp[0][i] += cplx(0.0, g.xi_axis(i, a)) * s.comp[a][i];
  return out;
}

Field gradient(const Field& scalar) {
  if (scalar.ncomp() != 1) throw ParameterError("gradient: need a scalar field");
  Field s = scalar.spectral();
  const Grid& g = s.grid;
  Field out(g, g.d, Rep::Spectral);
  for (int a = 0; a < g.d; ++a)
    for (std::size_t i = 0; i < g.size(); ++i) out.comp[a][i] = cplx(0.0, g.xi_axis(i, a)) * s.comp[0][i];
  return out;
}

Field laplacian(const Field& f) {
  Field out = f.spectral();
  std::vector<double> xi2 = out.grid.xi_squared();
  for (auto& c : out.comp)
    for (std::size_t i = 0; i < c.size(); ++i) c[i] *= -xi2[i];
  return out;
}

Field inverse_laplacian(const Field& f) {
  Field out = f.spectral();
  std::vector<double> xi2 = out.grid.xi_squared();
  for (auto& c : out.comp)
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = xi2[i] == 0.0 ? cplx(0.0) : c[i] / (-xi2[i]);
  return out;
}

Field multiply(const Field& f, const Field& g) {
  require_same_grid(f.grid, g.grid, "multiply");
  Field a = f.physical(), b = g.physical();
  int na = a.ncomp(), nb = b.ncomp();
  if (na != nb && na != 1 && nb != 1) throw ParameterError("multiply: incompatible component counts");
  int n = std::max(na, nb);
  Field out(a.grid, n, Rep::Physical);
  for (int c = 0; c < n; ++c) {
    const auto& x = a.comp[na == 1 ? 0 : c];
    const auto& y = b.comp[nb == 1 ? 0 : c];
    auto& z = out.comp[c];
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = x[i] * y[i];
  }
  return out;
}

Field dot(const Field& f, const Field& g) {
  require_same_grid(f.grid, g.grid, "dot");
  if (f.ncomp() != g.ncomp()) throw ParameterError("dot: component count mismatch");
  Field a = f.physical(), b = g.physical();
  Field out(a.grid, 1, Rep::Physical);
  auto& z = out.comp[0];
  for (int c = 0; c < a.ncomp(); ++c)
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += a.comp[c][i] * b.comp[c][i];
  return out;
}

Nonlinearity nonlinearity(const StateBundle& s, const SystemParams& p, bool dealias) {
  s.check();
  const Grid& g = s.grid();
  if (p.d != g.d) throw ParameterError("nonlinearity: parameter dimension does not match grid");
  double K = p.effective_K(g, dealias);
  Field Ju = sharp_truncate(s.u, K).to_physical();
  Field Jv = sharp_truncate(s.v, K).to_physical();
  Field divw = divergence(sharp_truncate(s.w, K)).to_physical();
  Nonlinearity out;
  out.Nu = sharp_truncate(multiply(divw, Jv), K);
  out.Nv = sharp_truncate(multiply(conj(divw), Ju), K);
  out.Nw = gradient(sharp_truncate(dot(Ju, conj(Jv)), K));
  return out;
}

Field commutator_pn(const Field& f, const Field& g, DyadicScale N) {
  Field out = project_dyadic(multiply(f, g), N);
  out -= multiply(f, project_dyadic(g, N)).to_spectral();
  return out;
}

Field double_commutator(const Field& f, const Field& g, DyadicScale N) {
  Field out = project_dyadic(dot(f, g), N);
  out -= dot(project_dyadic(f, N), g).to_spectral();
  out -= dot(f, project_dyadic(g, N)).to_spectral();
  return out;
}

StateBundle scaling_transform(const StateBundle& s, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ParameterError("scaling: lambda must be positive");
  int e = 0;
  double m = std::frexp(lambda, &e);
  if (m != 0.5) throw ParameterError("scaling: lambda must be a power of two for an exact lattice map");
  const Grid& g = s.grid();
  Grid h(g.d, g.L * lambda, g.M);
  auto rescale = [&](const Field& f) {
    Field p = f.physical();
    Field out(h, p.ncomp(), Rep::Physical);
    for (int c = 0; c < p.ncomp(); ++c)
      for (std::size_t i = 0; i < h.size(); ++i) out.comp[c][i] = p.comp[c][i] / lambda;
    return out;
  };
  return StateBundle(rescale(s.u), rescale(s.v), rescale(s.w), s.time * lambda * lambda);
}

}  // namespace ccnls
