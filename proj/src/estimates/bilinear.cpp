#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "ccnls/estimates.hpp"
#include "ccnls/fft.hpp"
#include "ccnls/parallel.hpp"

// Continuum model (d = 1): F_k(tau, xi) = a_k(xi) eta_{j_k}(tau + sigma_k xi^2) with a_k
// piecewise constant on bins of the shell plateau.  Writing G = eta_{j1} * eta_{j2} and
// R(x) = int G(u + x) G(u) du,
//   ||F1 * F2||^2 = int dxi dxi1 dxi1' a1 a2 conj(a1' a2') R(phi - phi'),
// and the substitution xi1 = p + D/2, xi1' = p - D/2, xi - xi1 = m - D/2, xi - xi1' = m + D/2
// (unit Jacobian) turns phi - phi' into 2 D (sigma1 p - sigma2 m).  The D-integral is
// closed form through the antiderivative of R; (p, m) are integrated by Gauss panels.

namespace ccnls {

namespace {

struct Bin {
  double lo, hi;
};

std::vector<Bin> shell_bins(std::int64_t N, int nb) {
  std::vector<Bin> out;
  if (N == 1) {
    const double a = 4.0 / 3.0, w = 2.0 * a / (2 * nb);
    for (int i = 0; i < 2 * nb; ++i) out.push_back({-a + i * w, -a + (i + 1) * w});
    return out;
  }
  const double lo = 5.0 * N / 6.0, hi = 4.0 * N / 3.0, w = (hi - lo) / nb;
  for (int i = nb - 1; i >= 0; --i) out.push_back({-(lo + (i + 1) * w), -(lo + i * w)});
  for (int i = 0; i < nb; ++i) out.push_back({lo + i * w, lo + (i + 1) * w});
  return out;
}

// Autocorrelation of eta_{j1} * eta_{j2} and its running integral, on a uniform grid.
struct RTable {
  double h = 0.0, x0 = 0.0;  // R sampled at x0 + k h
  std::vector<double> R, CR;
  double norm1 = 0.0, norm2 = 0.0;  // ||eta_j||_{L^2}

  RTable(int j1, int j2) {
    h = std::ldexp(1.0, std::max(j1, j2)) / 512.0;
    auto sample = [&](int j, double& nrm) {
      const double S = 5.0 / 3.0 * std::ldexp(1.0, j);
      const int n = static_cast<int>(std::ceil(S / h));
      std::vector<double> v(2 * n + 1);
      double acc = 0.0;
      for (int i = 0; i <= 2 * n; ++i) {
        v[i] = eta_j((i - n) * h, j);
        acc += v[i] * v[i];
      }
      nrm = std::sqrt(acc * h);
      return v;
    };
    std::vector<double> e1 = sample(j1, norm1), e2 = sample(j2, norm2);
    std::vector<double> G(e1.size() + e2.size() - 1, 0.0);
    for (std::size_t i = 0; i < e1.size(); ++i)
      if (e1[i] != 0.0)
        for (std::size_t l = 0; l < e2.size(); ++l) G[i + l] += h * e1[i] * e2[l];
    const long nG = static_cast<long>(G.size());
    R.assign(2 * nG - 1, 0.0);
    for (long m = 0; m < nG; ++m) {
      double acc = 0.0;
      for (long k = 0; k + m < nG; ++k) acc += G[k + m] * G[k];
      R[nG - 1 + m] = R[nG - 1 - m] = h * acc;
    }
    x0 = -(nG - 1) * h;
    CR.assign(R.size(), 0.0);
    for (std::size_t k = 1; k < R.size(); ++k) CR[k] = CR[k - 1] + 0.5 * h * (R[k] + R[k - 1]);
  }

  double r0() const { return R[R.size() / 2]; }

  double cumulative(double x) const {
    double q = (x - x0) / h;
    if (q <= 0.0) return 0.0;
    if (q >= static_cast<double>(CR.size() - 1)) return CR.back();
    std::size_t k = static_cast<std::size_t>(q);
    double f = q - k;
    return (1.0 - f) * CR[k] + f * CR[k + 1];
  }
};

constexpr int kGaussOrder = 6;

// Omega(i, i', k, k') for every bin quadruple, flattened as ((i nb1 + i') nb2 + k) nb2 + k'.
std::vector<double> omega_table(const std::vector<Bin>& B1, const std::vector<Bin>& B2, const RTable& rt,
                                double s1, double s2, int panels) {
  std::vector<double> gx, gw;
  gauss_legendre(kGaussOrder, gx, gw);
  const std::size_t n1 = B1.size(), n2 = B2.size();
  std::vector<double> om(n1 * n1 * n2 * n2, 0.0);

  auto nodes = [&](double lo, double hi, std::vector<double> cuts, std::vector<double>& x, std::vector<double>& w) {
    x.clear();
    w.clear();
    cuts.push_back(lo);
    cuts.push_back(hi);
    for (int q = 1; q < panels; ++q) cuts.push_back(lo + (hi - lo) * q / panels);
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      double a = std::max(lo, cuts[c]), b = std::min(hi, cuts[c + 1]);
      if (b <= a) continue;
      for (int g = 0; g < kGaussOrder; ++g) {
        x.push_back(0.5 * (a + b) + 0.5 * (b - a) * gx[g]);
        w.push_back(0.5 * (b - a) * gw[g]);
      }
    }
  };

  std::vector<double> px, pw, mx, mw;
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t ip = 0; ip < n1; ++ip) {
      const Bin &a = B1[i], &ap = B1[ip];
      const double dlo1 = a.lo - ap.hi, dhi1 = a.hi - ap.lo;  // range of xi1 - xi1'
      nodes(0.5 * (a.lo + ap.lo), 0.5 * (a.hi + ap.hi), {0.5 * (a.lo + ap.hi), 0.5 * (a.hi + ap.lo)}, px, pw);
      for (std::size_t k = 0; k < n2; ++k)
        for (std::size_t kp = 0; kp < n2; ++kp) {
          const Bin &b = B2[k], &bp = B2[kp];
          const double dlo2 = bp.lo - b.hi, dhi2 = bp.hi - b.lo;  // range of xi2' - xi2
          if (std::max(dlo1, dlo2) >= std::min(dhi1, dhi2)) continue;
          nodes(0.5 * (b.lo + bp.lo), 0.5 * (b.hi + bp.hi), {0.5 * (b.lo + bp.hi), 0.5 * (b.hi + bp.lo)}, mx, mw);
          double acc = 0.0;
          for (std::size_t u = 0; u < px.size(); ++u) {
            const double p = px[u];
            const double plo = std::max(2.0 * (a.lo - p), 2.0 * (p - ap.hi));
            const double phi = std::min(2.0 * (a.hi - p), 2.0 * (p - ap.lo));
            if (plo >= phi) continue;
            double row = 0.0;
            for (std::size_t v = 0; v < mx.size(); ++v) {
              const double m = mx[v];
              const double lo = std::max({plo, 2.0 * (m - b.hi), 2.0 * (bp.lo - m)});
              const double hi = std::min({phi, 2.0 * (m - b.lo), 2.0 * (bp.hi - m)});
              if (lo >= hi) continue;
              const double c = 2.0 * (s1 * p - s2 * m);
              double val;
              if (std::abs(c) * (hi - lo) < 1e-9 * rt.h) {
                val = rt.r0() * (hi - lo);
              } else {
                double a0 = c * lo, a1 = c * hi;
                val = (rt.cumulative(std::max(a0, a1)) - rt.cumulative(std::min(a0, a1))) / std::abs(c);
              }
              row += mw[v] * val;
            }
            acc += pw[u] * row;
          }
          om[((i * n1 + ip) * n2 + k) * n2 + kp] = acc;
        }
    }
  return om;
}

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<cplx> member_coefficients(std::uint64_t seed, std::size_t scale, int member, int which, std::size_t n) {
  std::mt19937_64 rng(mix(seed ^ mix(scale * 1000003ULL + static_cast<std::uint64_t>(member) * 31ULL + which)));
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<cplx> c(n);
  for (auto& z : c) {
    double re = nd(rng);
    z = {re, nd(rng)};
  }
  return c;
}

double weighted_norm(const std::vector<cplx>& c, const std::vector<Bin>& B) {
  double s = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) s += std::norm(c[i]) * (B[i].hi - B[i].lo);
  return std::sqrt(s);
}

double quadratic_form(const std::vector<double>& om, const std::vector<cplx>& c, const std::vector<cplx>& e) {
  const std::size_t n1 = c.size(), n2 = e.size();
  cplx q = 0.0;
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t ip = 0; ip < n1; ++ip) {
      const cplx cc = c[i] * std::conj(c[ip]);
      for (std::size_t k = 0; k < n2; ++k)
        for (std::size_t kp = 0; kp < n2; ++kp) {
          double o = om[((i * n1 + ip) * n2 + k) * n2 + kp];
          if (o != 0.0) q += cc * e[k] * std::conj(e[kp]) * o;
        }
    }
  return std::max(q.real(), 0.0);
}

struct ScaleData {
  std::vector<Bin> B1, B2;
  std::vector<double> om;
};

ScaleData scale_data(const BilinearConfig& cfg, std::size_t k, const RTable& rt) {
  ScaleData sd;
  sd.B1 = shell_bins(cfg.N1[k], cfg.bins);
  sd.B2 = shell_bins(cfg.N2, cfg.bins);
  sd.om = omega_table(sd.B1, sd.B2, rt, cfg.sigma1, cfg.sigma2, cfg.panels);
  return sd;
}

double semi_ratio(const BilinearConfig& cfg, std::size_t k, int member, const ScaleData& sd, const RTable& rt) {
  auto c = member_coefficients(cfg.seed, k, member, 1, sd.B1.size());
  auto e = member_coefficients(cfg.seed, k, member, 2, sd.B2.size());
  double q = quadratic_form(sd.om, c, e);
  double nf = rt.norm1 * rt.norm2 * weighted_norm(c, sd.B1) * weighted_norm(e, sd.B2);
  double bound = bilinear_bound(static_cast<double>(cfg.N1[k]), static_cast<double>(cfg.N2), cfg.j1, cfg.j2, 1,
                                cfg.interp_a);
  return std::sqrt(q) / (2.0 * kPi * nf * bound);
}

}  // namespace

void validate(const BilinearConfig& cfg) {
  if (cfg.N1.empty()) throw ParameterError("bilinear: empty N1 list");
  if (!is_power_of_two(cfg.N2)) throw ParameterError("bilinear: N2 must be dyadic");
  for (auto n : cfg.N1) {
    if (!is_power_of_two(n)) throw ParameterError("bilinear: N1 values must be dyadic");
    if (n < 4 * cfg.N2) throw ParameterError(fmt::format("bilinear: needs N1 >= 4 N2, got N1 = {}, N2 = {}", n, cfg.N2));
  }
  if (cfg.j1 < 0 || cfg.j2 < 0 || cfg.j1 > 12 || cfg.j2 > 12) throw ParameterError("bilinear: j in [0, 12]");
  if (cfg.ensemble < 1) throw ParameterError("bilinear: ensemble must be >= 1");
  if (cfg.bins < 1 || cfg.panels < 1) throw ParameterError("bilinear: bins and panels must be >= 1");
  if (!(cfg.interp_a >= 0.0 && cfg.interp_a < 1.0)) throw ParameterError("bilinear: interp_a in [0, 1)");
  if (cfg.sigma1 == 0.0 || cfg.sigma2 == 0.0) throw ParameterError("bilinear: sigma must be nonzero");
}

double bilinear_bound(double N1, double N2, int j1, int j2, int d, double a) {
  if (!(a >= 0.0 && a < 1.0)) throw ParameterError("bilinear bound: a in [0, 1)");
  if (a == 0.0)
    return std::pow(N2, 0.5 * (d - 1)) * std::pow(N1, -0.5) * std::pow(2.0, 0.5 * j1) * std::pow(2.0, 0.5 * j2);
  return std::pow(N2, 0.5 * (d - 1) * (1.0 - a)) * std::pow(N1, -0.5 * (1.0 - a) + 0.5 * d * a) *
         std::pow(2.0, 0.5 * j1) * std::pow(2.0, 0.5 * j2 * (1.0 - a));
}

EstimateReport bilinear_ratio_experiment(const BilinearConfig& cfg) {
  validate(cfg);
  const RTable rt(cfg.j1, cfg.j2);
  EstimateReport rep;
  rep.name = "verify-bilinear";
  rep.descriptors = {{"N1", cfg.N1},         {"N2", cfg.N2},     {"j1", cfg.j1},         {"j2", cfg.j2},
                     {"sigma1", cfg.sigma1}, {"sigma2", cfg.sigma2}, {"ensemble", cfg.ensemble},
                     {"seed", cfg.seed},     {"bins", cfg.bins}, {"interp_a", cfg.interp_a}, {"d", 1}};
  if (cfg.ensemble < 20) rep.warnings.push_back(fmt::format("ensemble of {} members is below 20", cfg.ensemble));
  std::vector<std::vector<double>> ratios = parallel_map(cfg.N1.size(), [&](std::size_t k) {
    ScaleData sd = scale_data(cfg, k, rt);
    std::vector<double> r(cfg.ensemble);
    for (int m = 0; m < cfg.ensemble; ++m) r[m] = semi_ratio(cfg, k, m, sd, rt);
    return r;
  });
  for (std::size_t k = 0; k < cfg.N1.size(); ++k)
    for (int m = 0; m < cfg.ensemble; ++m) rep.samples.push_back({static_cast<double>(cfg.N1[k]), m, ratios[k][m]});
  rep.finalize();
  if (!rep.sup_ratio.empty()) {
    auto [lo, hi] = std::minmax_element(rep.sup_ratio.begin(), rep.sup_ratio.end());
    rep.extra["sup_ratio_spread"] = *lo > 0.0 ? *hi / *lo : 0.0;
  }
  return rep;
}

double bilinear_ratio_sampled(const SpaceTimeSample& f1, const SpaceTimeSample& f2, double N1, double N2, int j1,
                              int j2, double a) {
  f1.check();
  f2.check();
  require_same_grid(f1.grid, f2.grid, "bilinear");
  if (f1.Q != f2.Q || f1.dt != f2.dt || f1.t0 != f2.t0) throw ParameterError("bilinear: time lattices differ");
  if (f1.ncomp() != 1 || f2.ncomp() != 1) throw ParameterError("bilinear: scalar samples expected");
  const double w = f1.dt * f1.grid.cell_volume();
  double p = 0.0, n1 = 0.0, n2 = 0.0;
  for (std::size_t i = 0; i < f1.values[0].size(); ++i) {
    const cplx x = f1.values[0][i], y = f2.values[0][i];
    p += std::norm(x * y);
    n1 += std::norm(x);
    n2 += std::norm(y);
  }
  if (n1 == 0.0 || n2 == 0.0) return 0.0;
  return std::sqrt(p * w) / (bilinear_bound(N1, N2, j1, j2, f1.grid.d, a) * std::sqrt(n1 * w) * std::sqrt(n2 * w));
}

std::array<double, 2> bilinear_crosscheck(const BilinearConfig& cfg, std::size_t k, int member) {
  validate(cfg);
  if (k >= cfg.N1.size()) throw ParameterError("bilinear crosscheck: scale index out of range");
  const RTable rt(cfg.j1, cfg.j2);
  const ScaleData sd = scale_data(cfg, k, rt);
  const double semi = semi_ratio(cfg, k, member, sd, rt);

  auto c = member_coefficients(cfg.seed, k, member, 1, sd.B1.size());
  auto e = member_coefficients(cfg.seed, k, member, 2, sd.B2.size());
  const double N1 = static_cast<double>(cfg.N1[k]), N2 = static_cast<double>(cfg.N2);
  // lattice spacing fine against the narrowest bin; Nyquist above the product's band
  const double wmin = std::min(sd.B1[0].hi - sd.B1[0].lo, sd.B2[0].hi - sd.B2[0].lo);
  double L = 2.0 * kPi * 64.0 / wmin;
  L = std::ldexp(1.0, static_cast<int>(std::ceil(std::log2(L))));
  const double xi_top = 4.0 / 3.0 * (N1 + N2);
  int M = 1;
  while (M * kPi / L < 1.1 * xi_top) M *= 2;
  const Grid g(1, L, M);
  auto lattice = [&](const std::vector<Bin>& B, const std::vector<cplx>& coef) {
    cvec hat(M, 0.0);
    for (int i = 0; i < M; ++i) {
      const double xi = g.wavenumber(i) * g.dxi();
      for (std::size_t b = 0; b < B.size(); ++b)
        if (xi >= B[b].lo && xi < B[b].hi) hat[i] = coef[b] * (M / L);
    }
    return hat;
  };
  const cvec h1 = lattice(sd.B1, c), h2 = lattice(sd.B2, e);
  // time-profile inverse transforms of eta_j
  auto eta_check = [](int j, double t) {
    const double S = 5.0 / 3.0 * std::ldexp(1.0, j);
    const int n = 4096;
    const double h = 2.0 * S / n;
    cplx acc = 0.0;
    for (int i = 0; i <= n; ++i) {
      double tau = -S + i * h;
      acc += (i == 0 || i == n ? 0.5 : 1.0) * eta_j(tau, j) * std::exp(cplx(0.0, t * tau));
    }
    return acc * h / (2.0 * kPi);
  };
  const double rate = cfg.sigma1 * xi_top * xi_top + std::abs(cfg.sigma2) * 4.0 * N2 * N2 +
                      5.0 / 3.0 * (std::ldexp(1.0, cfg.j1) + std::ldexp(1.0, cfg.j2));
  const double Tmax = 12.0;  // |check eta|^2 keeps < 0.5% of its mass beyond
  const int Q = 2 * static_cast<int>(std::ceil(Tmax * rate / kPi));
  const double dt = 2.0 * Tmax / Q;
  struct Acc {
    double p = 0.0, n1 = 0.0, n2 = 0.0;
  };
  std::vector<Acc> parts = parallel_map(static_cast<std::size_t>(Q + 1), [&](std::size_t q) {
    const double t = -Tmax + q * dt;
    const cplx e1 = eta_check(cfg.j1, t), e2 = eta_check(cfg.j2, t);
    cvec u1(M), u2(M);
    for (int i = 0; i < M; ++i) {
      const double xi = g.wavenumber(i) * g.dxi();
      u1[i] = h1[i] == 0.0 ? 0.0 : h1[i] * std::exp(cplx(0.0, -t * cfg.sigma1 * xi * xi));
      u2[i] = h2[i] == 0.0 ? 0.0 : h2[i] * std::exp(cplx(0.0, -t * cfg.sigma2 * xi * xi));
    }
    fft_inverse(g, u1);
    fft_inverse(g, u2);
    Acc a;
    for (int i = 0; i < M; ++i) {
      a.p += std::norm(u1[i] * u2[i]);
      a.n1 += std::norm(u1[i]);
      a.n2 += std::norm(u2[i]);
    }
    const double w = (q == 0 || q == static_cast<std::size_t>(Q) ? 0.5 : 1.0) * dt * g.dx();
    a.p *= w * std::norm(e1 * e2);
    a.n1 *= w * std::norm(e1);
    a.n2 *= w * std::norm(e2);
    return a;
  });
  Acc tot;
  for (const auto& a : parts) {
    tot.p += a.p;
    tot.n1 += a.n1;
    tot.n2 += a.n2;
  }
  const double bound = bilinear_bound(N1, N2, cfg.j1, cfg.j2, 1, cfg.interp_a);
  const double quad = std::sqrt(tot.p) / (bound * std::sqrt(tot.n1) * std::sqrt(tot.n2));
  return {semi, quad};
}

}  // namespace ccnls
