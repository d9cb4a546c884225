#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "ccnls/energy.hpp"
#include "ccnls/norms.hpp"

namespace ccnls {

void EnergyConfig::validate() const {
  if (!(s_tilde >= s)) throw ParameterError("energy: s_tilde must be >= s");
  if (!(C_tilde > 0.0)) throw ParameterError("energy: C_tilde must be positive");
}

namespace {

void require_shell(DyadicScale N) {
  if (N.N < 2) throw ParameterError("M_N: N must be >= 2 (inverse Laplacian undefined on the N = 1 shell)");
}

double correction_coefficient(const SystemParams& p) {
  double bg = p.beta + p.gamma;
  if (bg == 0.0) throw ParameterError("energy: beta + gamma = 0 (ill-posed line), correction undefined");
  return 4.0 / bg;
}

double npow(DyadicScale N, double e) { return std::pow(static_cast<double>(N.N), e); }

}  // namespace

cplx correction_M_N_complex(const Field& f, const Field& g, const Field& h, DyadicScale N) {
  require_shell(N);
  require_same_grid(f.grid, g.grid, "M_N");
  require_same_grid(f.grid, h.grid, "M_N");
  Field a = dot(f, conj(project_dyadic(g, N)));
  Field D = divergence(inverse_laplacian(project_dyadic(h, N))).to_physical();
  cplx acc = 0.0;
  for (std::size_t i = 0; i < a.comp[0].size(); ++i) acc += a.comp[0][i] * std::conj(D.comp[0][i]);
  return acc * f.grid.cell_volume();
}

double correction_M_N(const Field& f, const Field& g, const Field& h, DyadicScale N) {
  return correction_M_N_complex(f, g, h, N).real();
}

double modified_energy(const StateBundle& s, DyadicScale N, const EnergyConfig& cfg, const SystemParams& p) {
  cfg.validate();
  require_shell(N);
  double c = correction_coefficient(p);
  double H = std::pow(sobolev_norm(s, cfg.s0(s.grid().d)), 2);
  double P = l2_norm_squared(project_dyadic(s, N));
  double M = correction_M_N(s.u, s.v, s.w, N);
  double w = npow(N, 2.0 * cfg.s_tilde);
  return w * (1.0 + cfg.C_tilde * H / static_cast<double>(N.N)) * P + c * w * M;
}

double difference_energy(const StateBundle& s1, const StateBundle& s2, DyadicScale N, double r,
                         const EnergyConfig& cfg, const SystemParams& p) {
  cfg.validate();
  require_shell(N);
  if (r != 0.0 && r != cfg.s) throw ParameterError("difference_energy: r must be 0 or s");
  double c = correction_coefficient(p);
  StateBundle d = s1 - s2;
  int dim = s1.grid().d;
  double H = std::pow(sobolev_norm(s1, cfg.s0(dim)), 2) + std::pow(sobolev_norm(s2, cfg.s0(dim)), 2);
  double P = l2_norm_squared(project_dyadic(d, N));
  double Mdiff = correction_M_N(d.u, d.v, d.w, N) - correction_M_N(s1.u, d.v, d.w, N);
  double w = npow(N, 2.0 * r);
  return w * (1.0 + cfg.C_tilde * H / static_cast<double>(N.N)) * P - c * w * Mdiff;
}

namespace {

struct Sample {
  double P, H, M;  // shell mass, H^{s0} mass, signed correction (already times the coefficient)
  double N;
};

CoercivityResult search(const std::vector<Sample>& samples, double empirical) {
  CoercivityResult res;
  res.empirical_constant = empirical;
  double req = 0.0;
  for (const auto& x : samples) {
    if (x.P <= 0.0) continue;
    // (1 + C H / N) P + M >= P / 2
    double need = -(0.5 * x.P + x.M) * x.N / (x.H * x.P);
    req = std::max(req, need);
  }
  res.required = req;
  int k = kCoercivityMinExponent;
  while (k <= kCoercivityMaxExponent && std::ldexp(1.0, k) < req) ++k;
  if (k > kCoercivityMaxExponent) {
    res.capped = true;
    k = kCoercivityMaxExponent;
  }
  res.exponent = k;
  res.C_tilde = std::ldexp(1.0, k);
  for (const auto& x : samples)
    if ((1.0 + res.C_tilde * x.H / x.N) * x.P + x.M < 0.5 * x.P) ++res.violations_at_C;
  return res;
}

}  // namespace

CoercivityResult coercivity_search(std::span<const StateBundle> ensemble, const EnergyConfig& cfg,
                                   const SystemParams& p, std::span<const std::int64_t> scales) {
  if (ensemble.empty()) throw ParameterError("coercivity_search: empty ensemble");
  double c = correction_coefficient(p);
  std::vector<Sample> samples;
  double emp = 0.0;
  for (const auto& s : ensemble) {
    double H = std::pow(sobolev_norm(s, cfg.s0(s.grid().d)), 2);
    for (std::int64_t n : scales) {
      DyadicScale N(n);
      require_shell(N);
      double P = l2_norm_squared(project_dyadic(s, N));
      double M = correction_M_N(s.u, s.v, s.w, N);
      samples.push_back({P, H, c * M, static_cast<double>(n)});
      if (P > 0.0 && H > 0.0) emp = std::max(emp, std::abs(M) * static_cast<double>(n) / (std::sqrt(H) * P));
    }
  }
  return search(samples, emp);
}

CoercivityResult difference_coercivity_search(std::span<const StateBundle> s1, std::span<const StateBundle> s2,
                                              double r, const EnergyConfig& cfg, const SystemParams& p,
                                              std::span<const std::int64_t> scales) {
  if (s1.empty() || s1.size() != s2.size()) throw ParameterError("difference_coercivity_search: bad ensembles");
  if (r != 0.0 && r != cfg.s) throw ParameterError("difference_coercivity_search: r must be 0 or s");
  double c = correction_coefficient(p);
  std::vector<Sample> samples;
  double emp = 0.0;
  for (std::size_t i = 0; i < s1.size(); ++i) {
    StateBundle d = s1[i] - s2[i];
    int dim = d.grid().d;
    double H = std::pow(sobolev_norm(s1[i], cfg.s0(dim)), 2) + std::pow(sobolev_norm(s2[i], cfg.s0(dim)), 2);
    for (std::int64_t n : scales) {
      DyadicScale N(n);
      require_shell(N);
      double P = l2_norm_squared(project_dyadic(d, N));
      double Md = correction_M_N(d.u, d.v, d.w, N) - correction_M_N(s1[i].u, d.v, d.w, N);
      samples.push_back({P, H, -c * Md, static_cast<double>(n)});
      if (P > 0.0 && H > 0.0) emp = std::max(emp, std::abs(Md) * static_cast<double>(n) / (std::sqrt(H) * P));
    }
  }
  return search(samples, emp);
}

EnergyReport energy_scan(const Trajectory& traj, const EnergyConfig& cfg, const SystemParams& p,
                         std::span<const std::int64_t> scales) {
  cfg.validate();
  std::vector<StateBundle> frames = traj.snapshots;
  if (frames.empty()) frames.push_back(traj.final_state);
  EnergyReport rep;
  std::vector<double> e0;
  double min_ratio = kInf;
  for (std::size_t q = 0; q < frames.size(); ++q) {
    const StateBundle& s = frames[q];
    double drift = 0.0;
    for (std::size_t k = 0; k < scales.size(); ++k) {
      DyadicScale N(scales[k]);
      EnergyRow row;
      row.t = s.time;
      row.N = N.N;
      row.M_N = correction_M_N(s.u, s.v, s.w, N);
      row.E_N = modified_energy(s, N, cfg, p);
      double base = npow(N, 2.0 * cfg.s_tilde) * l2_norm_squared(project_dyadic(s, N));
      row.coercivity_ratio = base > 0.0 ? row.E_N / base : 0.0;
      if (base > 0.0) min_ratio = std::min(min_ratio, row.coercivity_ratio);
      if (q == 0) e0.push_back(row.E_N);
      double ref = std::abs(e0[k]);
      drift = std::max(drift, ref > 0.0 ? std::abs(row.E_N - e0[k]) / ref : std::abs(row.E_N - e0[k]));
      rep.rows.push_back(row);
    }
    rep.drift.push_back(drift);
  }
  double max_drift = 0.0;
  for (double d : rep.drift) max_drift = std::max(max_drift, d);
  rep.summary = {{"snapshots", frames.size()}, {"scales", std::vector<std::int64_t>(scales.begin(), scales.end())},
                 {"C_tilde", cfg.C_tilde}, {"s", cfg.s}, {"s_tilde", cfg.s_tilde},
                 {"max_relative_drift", max_drift},
                 {"min_coercivity_ratio", std::isinf(min_ratio) ? nlohmann::json(nullptr) : nlohmann::json(min_ratio)}};
  return rep;
}

std::string energy_csv(const EnergyReport& r) {
  std::ostringstream os;
  os << "t,N,M_N,E_N,coercivity_ratio\n";
  for (const auto& row : r.rows)
    os << fmt::format("{:.17g},{},{:.17g},{:.17g},{:.17g}\n", row.t, row.N, row.M_N, row.E_N, row.coercivity_ratio);
  return os.str();
}

}  // namespace ccnls
