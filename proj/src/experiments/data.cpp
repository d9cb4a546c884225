#include <cmath>
#include <random>

#include "ccnls/experiments.hpp"

namespace ccnls {

DataKind data_kind_from_string(const std::string& s) {
  if (s == "SobolevRandom") return DataKind::SobolevRandom;
  if (s == "Gaussian") return DataKind::Gaussian;
  if (s == "SingleMode") return DataKind::SingleMode;
  if (s == "BoxData") return DataKind::BoxData;
  throw ParameterError("unknown data kind '" + s + "' (SobolevRandom | Gaussian | SingleMode | BoxData)");
}

const char* data_kind_name(DataKind k) {
  switch (k) {
    case DataKind::SobolevRandom: return "SobolevRandom";
    case DataKind::Gaussian: return "Gaussian";
    case DataKind::SingleMode: return "SingleMode";
    case DataKind::BoxData: return "BoxData";
  }
  return "?";
}

void DataSpec::validate() const {
  if (kind == DataKind::SobolevRandom && !(s > 0.0)) throw ParameterError("data: SobolevRandom needs s > 0");
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) throw ParameterError("data: amplitude must be >= 0");
  if (kind == DataKind::Gaussian && !(width > 0.0)) throw ParameterError("data: width must be positive");
  if (kind == DataKind::BoxData && !(lo >= 0.0 && hi > lo)) throw ParameterError("data: need 0 <= lo < hi");
}

nlohmann::json to_json(const DataSpec& s) {
  return {{"kind", data_kind_name(s.kind)}, {"s", s.s},         {"seed", s.seed}, {"amplitude", s.amplitude},
          {"width", s.width},               {"mode", s.mode},   {"lo", s.lo},     {"hi", s.hi}};
}

DataSpec data_spec_from_json(const nlohmann::json& j) {
  DataSpec s;
  try {
    if (j.contains("kind")) s.kind = data_kind_from_string(j.at("kind").get<std::string>());
    s.s = j.value("s", s.s);
    s.seed = j.value("seed", s.seed);
    s.amplitude = j.value("amplitude", s.amplitude);
    s.width = j.value("width", s.width);
    s.mode = j.value("mode", s.mode);
    s.lo = j.value("lo", s.lo);
    s.hi = j.value("hi", s.hi);
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("data spec: ") + e.what());
  }
  s.validate();
  return s;
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform phase keyed by wavenumber, independent of M.
double phase_of(std::uint64_t seed, int field, int comp, long k0, long k1) {
  std::uint64_t h = splitmix(seed);
  h = splitmix(h ^ static_cast<std::uint64_t>(field * 8 + comp));
  h = splitmix(h ^ static_cast<std::uint64_t>(k0));
  h = splitmix(h ^ static_cast<std::uint64_t>(k1));
  return 2.0 * kPi * (static_cast<double>(h >> 11) * 0x1.0p-53);
}

// Orthonormal-coefficient spectral field: f^_k = M^d / L^{d/2} c_k.
template <class Amp>
Field spectral_field(const Grid& g, std::uint64_t seed, int field, Amp amp) {
  Field f(g, g.d, Rep::Spectral);
  const double scale = static_cast<double>(g.size()) / std::pow(g.L, 0.5 * g.d);
  for (std::size_t i = 0; i < g.size(); ++i) {
    double a = amp(i);
    if (a == 0.0) continue;
    long k0 = g.wavenumber(static_cast<int>(g.d == 1 ? i : i / g.M));
    long k1 = g.d == 1 ? 0 : g.wavenumber(static_cast<int>(i % g.M));
    for (int c = 0; c < g.d; ++c) f.comp[c][i] = std::polar(scale * a, phase_of(seed, field, c, k0, k1));
  }
  return f;
}

}  // namespace

StateBundle sobolev_random_data(const Grid& g, const DataSpec& spec) {
  DataSpec sp = spec;
  sp.kind = DataKind::SobolevRandom;
  sp.validate();
  auto amp = [&](std::size_t i) {
    double br = std::sqrt(1.0 + g.xi_abs(i) * g.xi_abs(i));
    return sp.amplitude * std::pow(br, -(sp.s + 0.5 * g.d)) / (1.0 + std::log(br));
  };
  return StateBundle(spectral_field(g, sp.seed, 0, amp), spectral_field(g, sp.seed, 1, amp),
                     spectral_field(g, sp.seed, 2, amp), 0.0);
}

StateBundle make_data(const Grid& g, const DataSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case DataKind::SobolevRandom:
      return sobolev_random_data(g, spec);
    case DataKind::Gaussian: {
      StateBundle out = StateBundle::zeros(g, Rep::Physical);
      Field* fs[3] = {&out.u, &out.v, &out.w};
      for (int f = 0; f < 3; ++f)
        for (int c = 0; c < g.d; ++c) {
          cplx ph = std::polar(spec.amplitude, phase_of(spec.seed, f, c, 0, 0));
          for (std::size_t i = 0; i < g.size(); ++i) {
            double r2 = 0.0;
            for (int a = 0; a < g.d; ++a) r2 += g.x_axis(i, a) * g.x_axis(i, a);
            fs[f]->comp[c][i] = ph * std::exp(-r2 / (2.0 * spec.width * spec.width));
          }
        }
      return out.to_spectral();
    }
    case DataKind::SingleMode: {
      long k = std::lround(spec.mode);
      if (std::abs(k) >= g.M / 2) throw ParameterError("data: single mode outside the grid");
      std::size_t idx = static_cast<std::size_t>(k < 0 ? k + g.M : k);
      if (g.d == 2) idx *= static_cast<std::size_t>(g.M);
      auto amp = [&](std::size_t i) { return i == idx ? spec.amplitude : 0.0; };
      return StateBundle(spectral_field(g, spec.seed, 0, amp), spectral_field(g, spec.seed, 1, amp),
                         spectral_field(g, spec.seed, 2, amp), 0.0);
    }
    case DataKind::BoxData: {
      auto amp = [&](std::size_t i) {
        double x = g.xi_abs(i);
        return x >= spec.lo && x <= spec.hi ? spec.amplitude : 0.0;
      };
      return StateBundle(spectral_field(g, spec.seed, 0, amp), spectral_field(g, spec.seed, 1, amp),
                         spectral_field(g, spec.seed, 2, amp), 0.0);
    }
  }
  throw ParameterError("data: unknown kind");
}

std::vector<StateBundle> random_ensemble(const Grid& g, int n, const DataSpec& base, double amp_lo, double amp_hi) {
  if (n < 1) throw ParameterError("ensemble: size must be >= 1");
  if (!(amp_lo > 0.0 && amp_hi >= amp_lo)) throw ParameterError("ensemble: needs 0 < amp_lo <= amp_hi");
  std::mt19937_64 rng(base.seed);
  std::uniform_real_distribution<double> U(std::log(amp_lo), std::log(amp_hi));
  std::vector<StateBundle> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    DataSpec m = base;
    m.seed = rng();
    m.amplitude = std::exp(U(rng));
    out.push_back(make_data(g, m));
  }
  return out;
}

}  // namespace ccnls
