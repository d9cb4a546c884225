#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "ccnls/estimates.hpp"
#include "ccnls/norms.hpp"
#include "ccnls/parallel.hpp"

namespace ccnls {

namespace {

Field free_flow(const Field& f, double sigma, double t) {
  Field out = f.spectral();
  const auto xi2 = out.grid.xi_squared();
  for (auto& c : out.comp)
    for (std::size_t i = 0; i < c.size(); ++i) c[i] *= std::exp(cplx(0.0, -sigma * xi2[i] * t));
  return out;
}

double dyadic_norm(const Field& f, double s) { return dyadic_energy_norm(std::span<const Field>(&f, 1), s); }

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Field shell_field(const Grid& g, std::int64_t N, double s, bool coherent, double x0, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Field f(g, 1, Rep::Spectral);
  for (std::size_t i = 0; i < g.size(); ++i) {
    double re = nd(rng), im = nd(rng);
    cplx c = coherent ? (1.0 + 0.5 * std::tanh(re)) * std::exp(cplx(0.0, -g.xi_axis(i, 0) * x0)) : cplx(re, im);
    f.comp[0][i] = psi_N(g.xi_abs(i), N) * c;
  }
  double n = dyadic_norm(f, s);
  if (n > 0.0) f *= 1.0 / n;
  return f;
}

}  // namespace

QuadraticCase quadratic_case_from_string(const std::string& s) {
  if (s == "high_low") return QuadraticCase::HighLow;
  if (s == "low_high") return QuadraticCase::LowHigh;
  if (s == "high_high") return QuadraticCase::HighHigh;
  throw ParameterError("unknown quadratic case '" + s + "' (high_low, low_high, high_high)");
}

const char* quadratic_case_name(QuadraticCase c) {
  switch (c) {
    case QuadraticCase::HighLow: return "high_low";
    case QuadraticCase::LowHigh: return "low_high";
    case QuadraticCase::HighHigh: return "high_high";
  }
  return "?";
}

QuadraticTerms quadratic_terms(const Field& f1, const Field& f2, DyadicScale N, const QuadraticConfig& cfg) {
  require_same_grid(f1.grid, f2.grid, "quadratic");
  if (f1.grid.d != 1 || f1.ncomp() != 1 || f2.ncomp() != 1)
    throw ParameterError("quadratic: scalar fields on a one-dimensional grid expected");
  if (cfg.n_t < 1) throw ParameterError("quadratic: n_t must be >= 1");
  const double n = static_cast<double>(N.N);
  QuadraticTerms q;
  double sup = 0.0;
  for (int i = 0; i < cfg.n_t; ++i) {
    const double t = cfg.n_t == 1 ? 0.0 : cfg.T * i / (cfg.n_t - 1);
    Field a = free_flow(f1, cfg.sigma1, t), b = free_flow(f2, cfg.sigma2, t);
    sup = std::max(sup, l2_norm(project_dyadic(multiply(partial(a, 0), b), N)));
  }
  q.lhs = std::pow(n, cfg.s_tilde - 1.0) * sup;
  const double f2s = dyadic_norm(f2, cfg.s);
  double near = 0.0;
  for (std::int64_t M : {N.N / 2, N.N, 2 * N.N}) {
    if (M < 1) continue;
    near += std::pow(static_cast<double>(M), cfg.s_tilde) * l2_norm(project_dyadic(f1, M));
  }
  q.near_shell = f2s * near;
  q.tail = std::pow(n, -(cfg.s - 0.5)) * dyadic_norm(f1, cfg.s_tilde) * f2s;
  return q;
}

void validate(const QuadraticConfig& cfg) {
  if (cfg.s < 1.0) throw ParameterError("quadratic: needs s >= (d+1)/2 = 1");
  if (cfg.s_tilde < 0.0) throw ParameterError("quadratic: needs s_tilde >= 0");
  if (cfg.ensemble < 1 || cfg.n_t < 1) throw ParameterError("quadratic: ensemble and n_t must be >= 1");
  if (!(cfg.T > 0.0)) throw ParameterError("quadratic: needs T > 0");
  if (cfg.scales.empty()) throw ParameterError("quadratic: empty scale list");
  if (!is_power_of_two(cfg.low)) throw ParameterError("quadratic: low scale must be dyadic");
  for (auto n : cfg.scales) {
    if (!is_power_of_two(n)) throw ParameterError("quadratic: scales must be dyadic");
    if (cfg.kind != QuadraticCase::HighHigh && n < 4 * cfg.low)
      throw ParameterError(fmt::format("quadratic: scale {} is not >= 4 x low scale {}", n, cfg.low));
  }
}

EstimateReport quadratic_estimate_experiment(const QuadraticConfig& cfg) {
  validate(cfg);
  EstimateReport rep;
  rep.name = "quadratic";
  rep.descriptors = {{"case", quadratic_case_name(cfg.kind)}, {"s", cfg.s}, {"s_tilde", cfg.s_tilde},
                     {"sigma1", cfg.sigma1}, {"sigma2", cfg.sigma2}, {"scales", cfg.scales}, {"low", cfg.low},
                     {"ensemble", cfg.ensemble}, {"seed", cfg.seed}, {"T", cfg.T}, {"n_t", cfg.n_t}, {"coherent", cfg.coherent}};
  std::vector<std::vector<double>> ratios = parallel_map(cfg.scales.size(), [&](std::size_t k) {
    const std::int64_t N = cfg.scales[k];
    int M = 16;
    while (M < 8 * N) M *= 2;
    const Grid g(1, 2.0 * kPi, M);
    std::int64_t N1 = N, N2 = N;
    if (cfg.kind == QuadraticCase::HighLow) N2 = cfg.low;
    if (cfg.kind == QuadraticCase::LowHigh) N1 = cfg.low;
    std::vector<double> out(cfg.ensemble);
    for (int m = 0; m < cfg.ensemble; ++m) {
      std::mt19937_64 rng(mix(cfg.seed ^ mix(static_cast<std::uint64_t>(N) * 104729ULL + m)));
      const double x0 = std::uniform_real_distribution<double>(-0.5 * g.L, 0.5 * g.L)(rng);
      Field f1 = shell_field(g, N1, cfg.s_tilde, cfg.coherent, x0, rng);
      Field f2 = shell_field(g, N2, cfg.s, cfg.coherent, x0, rng);
      QuadraticTerms q = quadratic_terms(f1, f2, N, cfg);
      double rhs = cfg.kind == QuadraticCase::HighLow    ? q.near_shell
                   : cfg.kind == QuadraticCase::HighHigh ? q.tail
                                                         : q.near_shell + q.tail;
      out[m] = rhs > 0.0 ? q.lhs / rhs : 0.0;
    }
    return out;
  });
  for (std::size_t k = 0; k < cfg.scales.size(); ++k)
    for (int m = 0; m < cfg.ensemble; ++m) rep.samples.push_back({static_cast<double>(cfg.scales[k]), m, ratios[k][m]});
  rep.finalize();
  return rep;
}

}  // namespace ccnls
