#pragma once

#include <random>

#include "ccnls/grid.hpp"
#include "ccnls/multipliers.hpp"

namespace testing {

using namespace ccnls;

// Gaussian spectral coefficients with <xi>^{-decay} envelope, n components.
inline Field random_field(const Grid& g, std::uint64_t seed, int ncomp = -1, double decay = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Field f(g, ncomp, Rep::Spectral);
  for (auto& c : f.comp)
    for (std::size_t i = 0; i < c.size(); ++i) {
      double re = nd(rng), im = nd(rng);
      c[i] = cplx(re, im) * std::pow(1.0 + g.xi_abs(i) * g.xi_abs(i), -0.5 * decay) * static_cast<double>(g.size());
    }
  return f;
}

// Random field restricted to |xi| <= K.
inline Field random_band_limited(const Grid& g, std::uint64_t seed, double K, int ncomp = -1) {
  return sharp_truncate(random_field(g, seed, ncomp), K);
}

// e^{i k . x} with lattice index k along axis 0 (physical representation), every component.
inline Field plane_wave(const Grid& g, int k, int ncomp = -1) {
  Field f(g, ncomp, Rep::Physical);
  const double xi = k * g.dxi();
  for (auto& c : f.comp)
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = std::exp(cplx(0.0, xi * g.x_axis(i, 0)));
  return f;
}

inline double max_abs_diff(const Field& a, const Field& b) {
  Field x = a.spectral(), y = b.spectral();
  double m = 0.0;
  for (std::size_t c = 0; c < x.comp.size(); ++c)
    for (std::size_t i = 0; i < x.comp[c].size(); ++i) m = std::max(m, std::abs(x.comp[c][i] - y.comp[c][i]));
  return m;
}

inline double max_abs(const Field& a) {
  Field x = a.spectral();
  double m = 0.0;
  for (const auto& c : x.comp)
    for (const auto& z : c) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace testing
