#include "ccnls/norms.hpp"

#include <algorithm>
#include <cmath>

#include "ccnls/fft.hpp"

namespace ccnls {

namespace {

double spectral_weight(const Grid& g) {
  double m = static_cast<double>(g.size());
  return std::pow(g.L, g.d) / (m * m);
}

template <class W>
double weighted_spectral_sum(const Field& f, W&& w) {
  Field s = f.spectral();
  const Grid& g = s.grid;
  double acc = 0.0;
  for (const auto& c : s.comp)
    for (std::size_t i = 0; i < c.size(); ++i) acc += w(i) * std::norm(c[i]);
  return acc * spectral_weight(g);
}

}  // namespace

double l2_norm_squared(const Field& f) {
  Field p = f.physical();
  double acc = 0.0;
  for (const auto& c : p.comp)
    for (const auto& z : c) acc += std::norm(z);
  return acc * p.grid.cell_volume();
}

double l2_norm(const Field& f) { return std::sqrt(l2_norm_squared(f)); }

double sobolev_norm(const Field& f, double s) {
  const Grid& g = f.grid;
  std::vector<double> xi2 = g.xi_squared();
  if (s == 0.0) return std::sqrt(weighted_spectral_sum(f, [](std::size_t) { return 1.0; }));
  return std::sqrt(weighted_spectral_sum(f, [&](std::size_t i) { return std::pow(1.0 + xi2[i], s); }));
}

double homogeneous_sobolev_norm(const Field& f, double s) {
  std::vector<double> xi2 = f.grid.xi_squared();
  return std::sqrt(weighted_spectral_sum(f, [&](std::size_t i) {
    return xi2[i] == 0.0 ? 0.0 : std::pow(xi2[i], s);
  }));
}

double sobolev_norm(const StateBundle& b, double s) {
  double a = sobolev_norm(b.u, s), c = sobolev_norm(b.v, s), e = sobolev_norm(b.w, s);
  return std::sqrt(a * a + c * c + e * e);
}

double l2_norm_squared(const StateBundle& b) {
  return l2_norm_squared(b.u) + l2_norm_squared(b.v) + l2_norm_squared(b.w);
}

namespace {

// sups[c][n] = sup over frames of ||P_N f_c||^2, accumulated in place.
void accumulate_shell_sups(const Field& frame, const std::vector<std::int64_t>& scales,
                           std::vector<std::vector<double>>& sups, std::size_t offset) {
  Field s = frame.spectral();
  const Grid& g = s.grid;
  double wgt = spectral_weight(g);
  for (int c = 0; c < s.ncomp(); ++c) {
    auto& row = sups[offset + c];
    for (std::size_t n = 0; n < scales.size(); ++n) {
      double acc = 0.0;
      for (std::size_t i = 0; i < s.comp[c].size(); ++i) {
        double p = psi_N(g.xi_abs(i), scales[n]);
        if (p != 0.0) acc += p * p * std::norm(s.comp[c][i]);
      }
      row[n] = std::max(row[n], acc * wgt);
    }
  }
}

double combine(const std::vector<std::int64_t>& scales, const std::vector<std::vector<double>>& sups,
               double s) {
  double total = 0.0;
  for (const auto& row : sups)
    for (std::size_t n = 0; n < scales.size(); ++n)
      total += std::pow(static_cast<double>(scales[n]), 2.0 * s) * row[n];
  return std::sqrt(total);
}

}  // namespace

double dyadic_energy_norm(std::span<const StateBundle> traj, double s) {
  if (traj.empty()) throw ParameterError("dyadic_energy_norm: empty trajectory");
  const Grid& g = traj.front().grid();
  auto scales = dyadic_scales(g);
  std::vector<std::vector<double>> sups(3 * g.d, std::vector<double>(scales.size(), 0.0));
  for (const auto& b : traj) {
    accumulate_shell_sups(b.u, scales, sups, 0);
    accumulate_shell_sups(b.v, scales, sups, g.d);
    accumulate_shell_sups(b.w, scales, sups, 2 * g.d);
  }
  return combine(scales, sups, s);
}

double dyadic_energy_norm(std::span<const Field> traj, double s) {
  if (traj.empty()) throw ParameterError("dyadic_energy_norm: empty trajectory");
  const Grid& g = traj.front().grid;
  auto scales = dyadic_scales(g);
  std::vector<std::vector<double>> sups(traj.front().ncomp(), std::vector<double>(scales.size(), 0.0));
  for (const auto& f : traj) accumulate_shell_sups(f, scales, sups, 0);
  return combine(scales, sups, s);
}

double spacetime_l2_norm(const SpaceTimeSample& F) {
  double acc = 0.0;
  for (const auto& c : F.values)
    for (const auto& z : c) acc += std::norm(z);
  return std::sqrt(acc * F.dt * F.grid.cell_volume());
}

namespace {

// Space-time spectra of every component.
std::vector<cvec> spacetime_spectra(const SpaceTimeSample& F) {
  std::vector<cvec> out = F.values;
  for (auto& c : out) fft_spacetime_forward(F.grid, F.Q, c);
  return out;
}

double plancherel_factor(const SpaceTimeSample& F) {
  return F.dt * F.grid.cell_volume() / (static_cast<double>(F.Q) * static_cast<double>(F.grid.size()));
}

double xns_from_spectra(const SpaceTimeSample& F, const std::vector<cvec>& spec, DyadicScale N,
                        double sigma) {
  if (sigma == 0.0) throw ParameterError("xns_norm: sigma must be nonzero");
  const Grid& g = F.grid;
  std::size_t S = g.size();
  std::vector<double> xi2 = g.xi_squared();
  std::vector<char> inside(S);
  for (std::size_t x = 0; x < S; ++x) inside[x] = N.in_shell(std::sqrt(xi2[x])) ? 1 : 0;

  double total = 0.0, outside = 0.0;
  for (const auto& c : spec)
    for (int q = 0; q < F.Q; ++q)
      for (std::size_t x = 0; x < S; ++x) {
        double m = std::norm(c[q * S + x]);
        total += m;
        if (!inside[x]) outside += m;
      }
  if (total > 0.0 && std::sqrt(outside / total) > 1e-8) {
    double mass = std::sqrt(outside * plancherel_factor(F));
    throw SupportError("xns_norm: sample not supported in the dyadic shell (spectral mass " +
                           std::to_string(mass) + " outside)",
                       mass);
  }
  if (total == 0.0) return 0.0;

  int merge = modulation_merge_level(F);
  int top = modulation_top_level(F, sigma);
  double pf = plancherel_factor(F);
  double sum_sq = 0.0;
  for (const auto& c : spec) {
    double x_c = 0.0;
    for (int j = 0; j <= top; ++j) {
      if (j > 0 && j <= merge) continue;
      double acc = 0.0;
      for (int q = 0; q < F.Q; ++q) {
        double tau = tau_of(q, F.Q, F.dt);
        for (std::size_t x = 0; x < S; ++x) {
          if (!inside[x]) continue;
          double wj = modulation_weight(tau + sigma * xi2[x], j, merge);
          if (wj != 0.0) acc += wj * wj * std::norm(c[q * S + x]);
        }
      }
      x_c += std::sqrt(std::ldexp(1.0, j)) * std::sqrt(acc * pf);
    }
    sum_sq += x_c * x_c;
  }
  return std::sqrt(sum_sq);
}

SpaceTimeSample windowed(const SpaceTimeSample& F, DyadicScale N, double T, double tc) {
  SpaceTimeSample out = F;
  std::size_t S = F.grid.size();
  double n = static_cast<double>(N.N);
  for (auto& c : out.values)
    for (int q = 0; q < F.Q; ++q) {
      double w = eta(n * (F.time(q) - tc) / T);
      for (std::size_t x = 0; x < S; ++x) c[q * S + x] *= w;
    }
  out.window = WindowDescriptor{tc, T / n};
  return out;
}

void check_T(double T) {
  if (!(T > 0.0 && T <= 1.0)) throw ParameterError("norm proxy: T must lie in (0, 1]");
}

}  // namespace

double xns_norm(const SpaceTimeSample& F, DyadicScale N, double sigma) {
  F.check();
  return xns_from_spectra(F, spacetime_spectra(F), N, sigma);
}

std::vector<double> window_centers(const SpaceTimeSample& F, DyadicScale N, double T) {
  check_T(T);
  double step = T / (4.0 * static_cast<double>(N.N));
  double first = F.time(0), last = F.time(F.Q - 1);
  std::vector<double> out;
  for (long k = 0;; ++k) {
    double tc = first + k * step;
    if (tc > last + 1e-12 * step) break;
    out.push_back(tc);
  }
  if (out.empty()) throw ParameterError("norm proxy: empty window-centre lattice");
  return out;
}

double f_norm_proxy(const SpaceTimeSample& F, DyadicScale N, double sigma, double T) {
  F.check();
  double best = 0.0;
  for (double tc : window_centers(F, N, T)) best = std::max(best, xns_norm(windowed(F, N, T, tc), N, sigma));
  return best;
}

double g_norm_proxy(const SpaceTimeSample& F, DyadicScale N, double sigma, double T) {
  F.check();
  const Grid& g = F.grid;
  std::size_t S = g.size();
  std::vector<double> xi2 = g.xi_squared();
  double shift = static_cast<double>(N.N) / T;
  double best = 0.0;
  for (double tc : window_centers(F, N, T)) {
    SpaceTimeSample W = windowed(F, N, T, tc);
    auto spec = spacetime_spectra(W);
    for (auto& c : spec)
      for (int q = 0; q < F.Q; ++q) {
        double tau = tau_of(q, F.Q, F.dt);
        for (std::size_t x = 0; x < S; ++x) c[q * S + x] /= cplx(tau + sigma * xi2[x], shift);
      }
    best = std::max(best, xns_from_spectra(W, spec, N, sigma));
  }
  return best;
}

SpaceTimeSample sample_from_fields(std::span<const Field> frames, double t0, double dt) {
  if (frames.size() < 2) throw ParameterError("sample_from_fields: need at least two frames");
  const Field& f0 = frames.front();
  SpaceTimeSample out(f0.grid, t0, dt, static_cast<int>(frames.size()), f0.ncomp());
  std::size_t S = f0.grid.size();
  for (std::size_t q = 0; q < frames.size(); ++q) {
    Field p = frames[q].physical();
    require_same_grid(p.grid, f0.grid, "sample_from_fields");
    for (int c = 0; c < out.ncomp(); ++c) std::copy(p.comp[c].begin(), p.comp[c].end(), out.values[c].begin() + q * S);
  }
  return out;
}

}  // namespace ccnls
