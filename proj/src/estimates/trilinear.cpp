#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "ccnls/estimates.hpp"
#include "ccnls/parallel.hpp"

// Free waves on the 2 pi torus, u(t, x) = sum_k a_k e^{i(k x - alpha k^2 t)} (v, w with beta,
// gamma).  Then int_{t0}^{t1} int conj(u) v w = 2 pi sum_{k1 = k2 + k3} conj(a1) a2 a3 E(Phi)
// with Phi = alpha k1^2 - beta k2^2 - gamma k3^2 and E the exact time integral of e^{i t Phi}.

namespace ccnls {

namespace {

cplx time_factor(double phi, double t0, double t1) {
  if (phi == 0.0) return t1 - t0;
  return (std::exp(cplx(0.0, t1 * phi)) - std::exp(cplx(0.0, t0 * phi))) / cplx(0.0, phi);
}

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

long shell_reach(std::int64_t N) { return static_cast<long>(std::ceil(5.0 * N / 3.0)); }

// psi_N-weighted Gaussian coefficients on the lattice, k in [-reach, reach].
LatticeData shell_data(std::int64_t N, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  LatticeData d;
  const long r = shell_reach(N);
  d.k0 = -r;
  d.a.assign(2 * r + 1, 0.0);
  for (long i = 0; i <= 2 * r; ++i) {
    double re = nd(rng), im = nd(rng);
    d.a[i] = psi_N(std::abs(static_cast<double>(d.k0 + i)), N) * cplx(re, im);
  }
  return d;
}

}  // namespace

TrilinearCase trilinear_case_from_string(const std::string& s) {
  if (s == "high_high_low") return TrilinearCase::HighHighLow;
  if (s == "high_low_high") return TrilinearCase::HighLowHigh;
  if (s == "all_comparable") return TrilinearCase::AllComparable;
  throw ParameterError("unknown trilinear case '" + s + "' (high_high_low, high_low_high, all_comparable)");
}

const char* trilinear_case_name(TrilinearCase c) {
  switch (c) {
    case TrilinearCase::HighHighLow: return "high_high_low";
    case TrilinearCase::HighLowHigh: return "high_low_high";
    case TrilinearCase::AllComparable: return "all_comparable";
  }
  return "?";
}

double LatticeData::norm() const {
  double s = 0.0;
  for (const auto& z : a) s += std::norm(z);
  return std::sqrt(2.0 * kPi * s);
}

cplx trilinear_time_integral(const LatticeData& u, const LatticeData& v, const LatticeData& w, const SystemParams& p,
                             double t0, double t1) {
  cplx acc = 0.0;
  const long nu = static_cast<long>(u.a.size());
  for (std::size_t i = 0; i < v.a.size(); ++i) {
    if (v.a[i] == 0.0) continue;
    const double k2 = static_cast<double>(v.k0 + static_cast<long>(i));
    for (std::size_t l = 0; l < w.a.size(); ++l) {
      if (w.a[l] == 0.0) continue;
      const double k3 = static_cast<double>(w.k0 + static_cast<long>(l));
      const long idx = static_cast<long>(k2 + k3) - u.k0;
      if (idx < 0 || idx >= nu || u.a[idx] == 0.0) continue;
      const double k1 = k2 + k3;
      const double phi = p.alpha * k1 * k1 - p.beta * k2 * k2 - p.gamma * k3 * k3;
      acc += std::conj(u.a[idx]) * v.a[i] * w.a[l] * time_factor(phi, t0, t1);
    }
  }
  return 2.0 * kPi * acc;
}

void validate(const TrilinearConfig& cfg) {
  const SystemParams& p = cfg.params;
  if (p.gamma == 0.0 || std::abs(p.alpha - p.gamma) > 1e-14 * std::abs(p.gamma))
    throw ParameterError("trilinear: needs alpha = gamma != 0");
  if (p.beta + p.gamma == 0.0) throw ParameterError("trilinear: needs beta + gamma != 0");
  if (!(cfg.T > 0.0 && cfg.T <= 1.0)) throw ParameterError("trilinear: needs T in (0, 1]");
  if (cfg.ensemble < 1) throw ParameterError("trilinear: ensemble must be >= 1");
  if (cfg.scales.empty()) throw ParameterError("trilinear: empty scale list");
  if (!is_power_of_two(cfg.low)) throw ParameterError("trilinear: low scale must be dyadic");
  for (auto n : cfg.scales) {
    if (!is_power_of_two(n)) throw ParameterError("trilinear: scales must be dyadic");
    if (cfg.kind != TrilinearCase::AllComparable && n < 4 * cfg.low)
      throw ParameterError(fmt::format("trilinear: scale {} is not >= 4 x low scale {}", n, cfg.low));
  }
  for (auto n : cfg.scales)
    if (cfg.window < 1 || cfg.window > n) throw ParameterError("trilinear: window index must lie in [1, N1*]");
}

EstimateReport trilinear_ratio_experiment(const TrilinearConfig& cfg) {
  validate(cfg);
  const SystemParams& p = cfg.params;

  EstimateReport rep;
  rep.name = "verify-trilinear";
  rep.descriptors = {{"case", trilinear_case_name(cfg.kind)}, {"scales", cfg.scales}, {"low", cfg.low},
                     {"T", cfg.T}, {"ensemble", cfg.ensemble}, {"seed", cfg.seed}, {"window", cfg.window},
                     {"params", to_json(p)}, {"d", 1}};
  if (cfg.ensemble < 20) rep.warnings.push_back(fmt::format("ensemble of {} members is below 20", cfg.ensemble));

  std::vector<std::vector<double>> ratios = parallel_map(cfg.scales.size(), [&](std::size_t s) {
    const std::int64_t N = cfg.scales[s];
    std::int64_t N1 = N, N2 = N, N3 = N;
    if (cfg.kind == TrilinearCase::HighHighLow) N3 = cfg.low;
    if (cfg.kind == TrilinearCase::HighLowHigh) N2 = cfg.low;
    const double Nstar = static_cast<double>(std::max({N1, N2, N3}));
    const double t0 = (cfg.window - 1) * cfg.T / Nstar, t1 = cfg.window * cfg.T / Nstar;
    const long r1 = shell_reach(N1);
    std::vector<double> out(cfg.ensemble);
    for (int m = 0; m < cfg.ensemble; ++m) {
      std::mt19937_64 rng(mix(cfg.seed ^ mix(static_cast<std::uint64_t>(N) * 7919ULL + m)));
      LatticeData v = shell_data(N2, rng), w = shell_data(N3, rng);
      // W(k1) = sum_{k2 + k3 = k1} a2 a3 E(Phi); the optimal a1 is W on the shell of N1
      LatticeData u;
      u.k0 = -r1;
      u.a.assign(2 * r1 + 1, 0.0);
      for (std::size_t i = 0; i < v.a.size(); ++i) {
        if (v.a[i] == 0.0) continue;
        const double k2 = static_cast<double>(v.k0 + static_cast<long>(i));
        for (std::size_t l = 0; l < w.a.size(); ++l) {
          if (w.a[l] == 0.0) continue;
          const double k3 = static_cast<double>(w.k0 + static_cast<long>(l));
          const double k1 = k2 + k3;
          if (psi_N(std::abs(k1), N1) == 0.0) continue;
          const double phi = p.alpha * k1 * k1 - p.beta * k2 * k2 - p.gamma * k3 * k3;
          u.a[static_cast<long>(k1) - u.k0] += v.a[i] * w.a[l] * time_factor(phi, t0, t1);
        }
      }
      const double nu = u.norm();
      if (nu == 0.0) {
        out[m] = 0.0;
        continue;
      }
      double I = 0.0;
      for (const auto& z : u.a) I += std::norm(z);
      I *= 2.0 * kPi;
      out[m] = I * Nstar / (nu * v.norm() * w.norm());
    }
    return out;
  });
  for (std::size_t s = 0; s < cfg.scales.size(); ++s) {
    bool all_zero = true;
    for (int m = 0; m < cfg.ensemble; ++m) {
      rep.samples.push_back({static_cast<double>(cfg.scales[s]), m, ratios[s][m]});
      all_zero = all_zero && ratios[s][m] == 0.0;
    }
    if (all_zero) rep.flags.push_back(fmt::format("scale {}: frequency constraint never met, ratio 0", cfg.scales[s]));
  }
  rep.finalize();
  return rep;
}

}  // namespace ccnls
