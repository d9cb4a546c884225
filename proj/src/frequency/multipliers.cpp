#include "ccnls/multipliers.hpp"

#include <cmath>

#include "ccnls/fft.hpp"

namespace ccnls {

double eta(double x) {
  double a = std::abs(x);
  if (a <= 4.0 / 3.0) return 1.0;
  if (a >= 5.0 / 3.0) return 0.0;
  double t = 3.0 * (5.0 / 3.0 - a);  // 0 at the outer edge, 1 at the inner one
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double eta_j(double x, int j) {
  if (j < 0) throw ParameterError("eta_j: j must be nonnegative");
  if (j == 0) return eta(x);
  return eta(std::ldexp(x, -j)) - eta(std::ldexp(x, -(j - 1)));
}

double psi_N(double xi_abs, DyadicScale N) {
  double n = static_cast<double>(N.N);
  if (N.N == 1) return eta(xi_abs);
  return eta(xi_abs / n) - eta(2.0 * xi_abs / n);
}

double psi_N(std::span<const double> xi, DyadicScale N) {
  double s = 0.0;
  for (double x : xi) s += x * x;
  return psi_N(std::sqrt(s), N);
}

Field apply_radial_multiplier(const Field& f, const std::function<double(double)>& m) {
  Field out = f.spectral();
  const Grid& g = out.grid;
  std::vector<double> sym(g.size());
  for (std::size_t i = 0; i < sym.size(); ++i) sym[i] = m(g.xi_abs(i));
  for (auto& c : out.comp)
    for (std::size_t i = 0; i < c.size(); ++i) c[i] *= sym[i];
  return out;
}

Field project_dyadic(const Field& f, DyadicScale N) {
  return apply_radial_multiplier(f, [N](double r) { return psi_N(r, N); });
}

Field project_low(const Field& f, DyadicScale N) {
  double n = static_cast<double>(N.N);
  return apply_radial_multiplier(f, [n](double r) { return eta(r / n); });
}

Field sharp_truncate(const Field& f, double K) {
  if (!(K > 0.0)) throw ParameterError("sharp_truncate: K must be positive");
  if (std::isinf(K)) return f.spectral();
  return apply_radial_multiplier(f, [K](double r) { return r <= K ? 1.0 : 0.0; });
}

Field sharp_band(const Field& f, double K1, double K2) {
  if (!(K1 > 0.0) || !(K2 >= K1)) throw ParameterError("sharp_band: need 0 < K1 <= K2");
  return apply_radial_multiplier(f, [K1, K2](double r) { return (r > K1 && r <= K2) ? 1.0 : 0.0; });
}

StateBundle project_dyadic(const StateBundle& s, DyadicScale N) {
  return StateBundle(project_dyadic(s.u, N), project_dyadic(s.v, N), project_dyadic(s.w, N), s.time);
}

StateBundle sharp_truncate(const StateBundle& s, double K) {
  return StateBundle(sharp_truncate(s.u, K), sharp_truncate(s.v, K), sharp_truncate(s.w, K), s.time);
}

int modulation_merge_level(const SpaceTimeSample& F) {
  double dtau = 2.0 * kPi / (F.Q * F.dt);
  if (dtau <= 1.0) return 0;
  return static_cast<int>(std::floor(std::log2(dtau)));
}

double modulation_weight(double m, int j, int merge_level) {
  if (j == 0) return eta(std::ldexp(m, -merge_level));
  if (j <= merge_level) return 0.0;
  return eta_j(m, j);
}

int modulation_top_level(const SpaceTimeSample& F, double sigma) {
  double tau_max = kPi / F.dt;
  double xi_top = F.grid.xi_max() * (F.grid.d == 2 ? std::sqrt(2.0) : 1.0);
  double m_max = tau_max + std::abs(sigma) * xi_top * xi_top;
  // eta_j vanishes for |m| <= 2^j * 2/3
  int j = 0;
  while (std::ldexp(2.0 / 3.0, j) < m_max) ++j;
  return j;
}

namespace {

template <class Fn>
SpaceTimeSample spacetime_multiply(const SpaceTimeSample& F, Fn&& sym) {
  F.check();
  SpaceTimeSample out = F;
  const Grid& g = F.grid;
  std::size_t S = g.size();
  std::vector<double> xi2 = g.xi_squared();
  for (auto& c : out.values) {
    fft_spacetime_forward(g, F.Q, c);
    for (int q = 0; q < F.Q; ++q) {
      double tau = tau_of(q, F.Q, F.dt);
      for (std::size_t x = 0; x < S; ++x) c[q * S + x] *= sym(tau, xi2[x], x);
    }
    fft_spacetime_inverse(g, F.Q, c);
  }
  return out;
}

}  // namespace

SpaceTimeSample modulation_project(const SpaceTimeSample& F, int j, double sigma) {
  if (F.Q < 4) throw ParameterError("modulation_project: need at least 4 time samples");
  if (sigma == 0.0) throw ParameterError("modulation_project: sigma must be nonzero");
  if (j < 0) throw ParameterError("modulation_project: j must be nonnegative");
  int merge = modulation_merge_level(F);
  return spacetime_multiply(F, [&](double tau, double xi2, std::size_t) {
    return modulation_weight(tau + sigma * xi2, j, merge);
  });
}

SpaceTimeSample project_dyadic(const SpaceTimeSample& F, DyadicScale N) {
  const Grid& g = F.grid;
  return spacetime_multiply(F, [&](double, double, std::size_t x) { return psi_N(g.xi_abs(x), N); });
}

}  // namespace ccnls
