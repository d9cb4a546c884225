#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "ccnls/estimates.hpp"
#include "ccnls/parallel.hpp"

namespace ccnls {

namespace {

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

void require_alpha_eq_gamma(const SystemParams& p, const char* who) {
  if (p.gamma == 0.0) throw ParameterError(fmt::format("{}: gamma must be nonzero", who));
  if (std::abs(p.alpha - p.gamma) > 1e-14 * std::abs(p.gamma))
    throw ParameterError(fmt::format("{}: needs alpha = gamma", who));
  if (p.beta + p.gamma == 0.0) throw ParameterError(fmt::format("{}: needs beta + gamma != 0", who));
}

// Phi = alpha|x|^2 - beta|y|^2 - gamma|z|^2 with x = y + z, alpha = gamma:
//     = 2 gamma y.z + (gamma - beta)|y|^2.
// The reduced form avoids cancelling the large |x|^2 terms, so intervals stay tight.
Interval phase_interval(const BoxRegion& Y, const BoxRegion& Z, const SystemParams& p) {
  Interval yz{0.0, 0.0}, yy{0.0, 0.0};
  for (int i = 0; i < Y.dim(); ++i) {
    yz = interval_add(yz, interval_mul(Y.axes[i], Z.axes[i]));
    const Interval& a = Y.axes[i];
    Interval sq = interval_mul(a, a);
    if (a.lo <= 0.0 && a.hi >= 0.0) sq.lo = 0.0;
    else sq.lo = std::max(sq.lo, 0.0);
    yy = interval_add(yy, sq);
  }
  return interval_add(interval_scale(yz, 2.0 * p.gamma), interval_scale(yy, p.gamma - p.beta));
}

long double phase_value(std::span<const double> y, std::span<const double> z, const SystemParams& p) {
  long double xx = 0, yy = 0, zz = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    long double x = static_cast<long double>(y[i]) + z[i];
    xx += x * x;
    yy += static_cast<long double>(y[i]) * y[i];
    zz += static_cast<long double>(z[i]) * z[i];
  }
  return p.alpha * xx - p.beta * yy - p.gamma * zz;
}

std::vector<std::vector<double>> corners(const BoxRegion& B) {
  std::vector<std::vector<double>> out;
  const int d = B.dim();
  for (int m = 0; m < (1 << d); ++m) {
    std::vector<double> c(d);
    for (int i = 0; i < d; ++i) c[i] = (m >> i & 1) ? B.axes[i].hi : B.axes[i].lo;
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<double> uniform_point(const BoxRegion& B, std::mt19937_64& rng) {
  std::vector<double> x(B.dim());
  for (int i = 0; i < B.dim(); ++i) x[i] = std::uniform_real_distribution<double>(B.axes[i].lo, B.axes[i].hi)(rng);
  return x;
}

// Smallest dyadic N with the whole box inside the shell I_N.
double containing_scale(const BoxRegion& B) {
  double lo = B.min_abs(), hi = B.max_abs();
  for (std::int64_t N = 1; N < (std::int64_t{1} << 60); N *= 2) {
    DyadicScale s(N);
    if (s.lo() > lo) break;
    if (s.hi() >= hi) return static_cast<double>(N);
  }
  throw ParameterError(fmt::format("box with |xi| in [{:.6g}, {:.6g}] fits in no dyadic shell", lo, hi));
}

}  // namespace

// ---- one-dimensional construction ----------------------------------------

A1Boxes a1_boxes(double K, double a, int d, const SystemParams& p) {
  if (!(a > 0.0 && a < 1.0)) throw ParameterError("a1: needs 0 < a < 1");
  if (d < 1 || d > 3) throw ParameterError("a1: d in {1, 2, 3}");
  if (!(K > 1.0) || !std::isfinite(K)) throw ParameterError("a1: needs K > 1");
  require_alpha_eq_gamma(p, "a1");
  A1Boxes b;
  b.delta = 1.5 * (1.0 - a);
  b.M = -(p.beta + p.gamma) / (2.0 * p.gamma);
  const double e = std::pow(K, -b.delta);
  std::vector<Interval> d1{{K, K + 3.0 * e}}, d2{{e, 2.0 * e}}, dd{{K - e, K + e}};
  for (int i = 1; i < d; ++i) {
    d1.push_back({0.0, 1.0});
    d2.push_back({0.0, 0.5});
    dd.push_back({0.0, 0.5});
  }
  b.D1 = BoxRegion(d1);
  b.D2 = BoxRegion(d2);
  b.D = BoxRegion(dd);
  return b;
}

PhaseSmallness phase_smallness_a1(const BoxRegion& D, const BoxRegion& D2, const SystemParams& p, double t_max,
                                  long samples, std::uint64_t seed) {
  require_alpha_eq_gamma(p, "phase smallness");
  if (!(t_max >= 0.0)) throw ParameterError("phase smallness: t_max must be >= 0");
  if (D.dim() != D2.dim()) throw ParameterError("phase smallness: dimension mismatch");
  PhaseSmallness r;
  if (t_max == 0.0) return r;
  // eta ranges over -D2
  const BoxRegion E = D2.reflected();
  auto phi = [&](const std::vector<double>& xi, const std::vector<double>& eta) {
    long double aa = 0, bb = 0, cc = 0;
    for (std::size_t i = 0; i < xi.size(); ++i) {
      long double m = static_cast<long double>(xi[i]) - eta[i];
      aa += m * m;
      bb += static_cast<long double>(eta[i]) * eta[i];
      cc += static_cast<long double>(xi[i]) * xi[i];
    }
    return static_cast<double>(std::fabs(p.alpha * aa - p.beta * bb - p.gamma * cc));
  };
  double sup = 0.0;
  for (const auto& x : corners(D))
    for (const auto& y : corners(E)) sup = std::max(sup, phi(x, y));
  std::mt19937_64 rng(seed);
  for (long n = 0; n < samples; ++n) sup = std::max(sup, phi(uniform_point(D, rng), uniform_point(E, rng)));
  r.sup = t_max * sup;
  // alpha = gamma: Phi = -2 gamma xi.eta + (gamma - beta)|eta|^2
  Interval xe{0.0, 0.0}, ee{0.0, 0.0};
  for (int i = 0; i < D.dim(); ++i) {
    xe = interval_add(xe, interval_mul(D.axes[i], E.axes[i]));
    Interval sq = interval_mul(E.axes[i], E.axes[i]);
    sq.lo = (E.axes[i].lo <= 0.0 && E.axes[i].hi >= 0.0) ? 0.0 : std::max(sq.lo, 0.0);
    ee = interval_add(ee, sq);
  }
  Interval ph = interval_add(interval_scale(xe, -2.0 * p.gamma), interval_scale(ee, p.gamma - p.beta));
  r.certified = t_max * interval_abs_max(ph);
  return r;
}

A1Result counterexample_a1(const A1Config& cfg) {
  if (!(cfg.T > 0.0)) throw ParameterError("a1: needs T > 0");
  A1Boxes bx = a1_boxes(cfg.K, cfg.a, cfg.d, cfg.params);
  A1Result r;
  r.predicted_exponent = 0.25 * (1.0 - cfg.a);
  r.phase_exponent = 1.0 - cfg.a - bx.delta;
  r.t0 = cfg.T * std::pow(cfg.K, -cfg.a);
  BoxConvolution conv = box_convolution(bx.D1, bx.D2.reflected());
  r.conv_min_on_D = conv.min_on(bx.D);
  r.conv_claim = std::pow(2.0, -(cfg.d - 1)) * std::pow(cfg.K, -bx.delta);
  r.phase_bound = phase_smallness_a1(bx.D, bx.D2, cfg.params, r.t0, 0).certified;
  r.sinc_regime = r.phase_bound <= kPi;
  if (!r.sinc_regime) return r;  // real part of the time integral no longer bounded below
  const double s = cfg.s;
  double I = weighted_square_integral(conv, bx.D, [s](std::span<const double> xi) {
    double n2 = 1.0;
    for (double x : xi) n2 += x * x;
    return std::pow(n2, s) * xi[0] * xi[0];
  });
  double lower = r.t0 * sinc(r.phase_bound) * std::sqrt(I);
  double norms = std::sqrt(bx.D1.volume()) * std::sqrt(bx.D2.volume());
  r.ratio = lower / (std::pow(1.0 + cfg.K * cfg.K, 0.5 * s) * norms);
  return r;
}

EstimateReport counterexample_a1_sweep(A1Config cfg, const std::vector<double>& K) {
  EstimateReport rep;
  rep.name = "counterexample-a1";
  rep.descriptors = {{"a", cfg.a}, {"s", cfg.s}, {"T", cfg.T}, {"d", cfg.d}, {"params", to_json(cfg.params)}};
  std::vector<A1Result> res = parallel_map(K.size(), [&](std::size_t i) {
    A1Config c = cfg;
    c.K = K[i];
    return counterexample_a1(c);
  });
  nlohmann::json rows = nlohmann::json::array();
  std::vector<double> px, py;
  for (std::size_t i = 0; i < K.size(); ++i) {
    const A1Result& r = res[i];
    A1Boxes bx = a1_boxes(K[i], cfg.a, cfg.d, cfg.params);
    PhaseSmallness ph = phase_smallness_a1(bx.D, bx.D2, cfg.params, r.t0, 4096, 1000 + i);
    rep.samples.push_back({K[i], 0, r.ratio});
    if (!r.sinc_regime) rep.flags.push_back(fmt::format("K = {}: phase bound {:.3g} > pi, lower bound void", K[i], r.phase_bound));
    if (r.conv_min_on_D < r.conv_claim * (1.0 - 1e-9))
      rep.flags.push_back(fmt::format("K = {}: convolution minimum below the claimed plateau", K[i]));
    rows.push_back({{"K", K[i]}, {"ratio", r.ratio}, {"t0", r.t0}, {"phase_bound", r.phase_bound},
                    {"phase_sup", ph.sup}, {"conv_min_on_D", r.conv_min_on_D}, {"conv_claim", r.conv_claim}});
    if (ph.sup > 0.0) {
      px.push_back(K[i]);
      py.push_back(ph.sup);
    }
  }
  rep.finalize();
  rep.extra["rows"] = rows;
  rep.extra["predicted_exponent"] = 0.25 * (1.0 - cfg.a);
  rep.extra["phase_exponent"] = 1.0 - cfg.a - 1.5 * (1.0 - cfg.a);
  if (px.size() >= 5) rep.extra["phase_fit"] = to_json(rate_fit(px, py, 5));
  return rep;
}

// ---- resonant trilinear construction -------------------------------------

A2Regime a2_regime_from_string(const std::string& s) {
  if (s == "b_pos") return A2Regime::BPos;
  if (s == "b_neg") return A2Regime::BNeg;
  if (s == "b_zero") return A2Regime::BZero;
  if (s == "multiD" || s == "multid") return A2Regime::MultiD;
  throw ParameterError("unknown a2 regime '" + s + "' (b_pos, b_neg, b_zero, multiD)");
}

const char* a2_regime_name(A2Regime r) {
  switch (r) {
    case A2Regime::BPos: return "b_pos";
    case A2Regime::BNeg: return "b_neg";
    case A2Regime::BZero: return "b_zero";
    case A2Regime::MultiD: return "multiD";
  }
  return "?";
}

A2Boxes a2_boxes(const A2Config& cfg) {
  const SystemParams& p = cfg.params;
  require_alpha_eq_gamma(p, "a2");
  if (!(cfg.K >= 1.0) || !std::isfinite(cfg.K)) throw ParameterError("a2: needs K >= 1");
  const double K = cfg.K;
  const double b = p.beta / p.gamma - 1.0;
  A2Boxes bx;
  switch (cfg.regime) {
    case A2Regime::MultiD: {
      if (cfg.d != 2) throw ParameterError("a2: the multiD regime is implemented for d = 2");
      if (!(cfg.p_exp >= 2.0)) throw ParameterError("a2: needs p_exp >= 2");
      if (!(cfg.C_tilde > 0.0)) throw ParameterError("a2: needs C_tilde > 0");
      const double Kt = std::pow(K, cfg.p_exp), c = 1.0 / cfg.C_tilde;
      bx.D1 = BoxRegion({{Kt + c, Kt + 2.0 * c}, {1.5 * K, 2.0 * K}});
      bx.D2 = BoxRegion({{0.0, c}, {0.5 * K, K}});
      bx.D3 = BoxRegion({{Kt, Kt + 2.0 * c}, {0.5 * K, 1.5 * K}});
      break;
    }
    case A2Regime::BPos:
    case A2Regime::BNeg: {
      if (cfg.d != 1) throw ParameterError("a2: the b regimes are one-dimensional");
      if (cfg.regime == A2Regime::BPos && !(b > 0.0)) throw ParameterError("a2: b_pos needs beta > gamma sign-wise (b > 0)");
      if (cfg.regime == A2Regime::BNeg && !(b < 0.0)) throw ParameterError("a2: b_neg needs b < 0");
      if (!(cfg.C2 > 0.0 && cfg.C3 > 0.0)) throw ParameterError("a2: needs C2, C3 > 0");
      const double ab = std::abs(b);
      bx.C3_used = cfg.C3;
      if (cfg.C3 >= 0.5 * ab * cfg.C2) {
        bx.C3_used = 0.25 * ab * cfg.C2;
        bx.C3_adjusted = true;
      }
      const double w2 = 1.0 / cfg.C2, w3 = ab / (2.0 * bx.C3_used), c1 = (0.5 * b + 1.0) * K;
      bx.D1 = BoxRegion({{c1 + w2, c1 + w3}});
      bx.D2 = BoxRegion({{K, K + w2}});
      bx.D3 = BoxRegion({{0.5 * b * K, 0.5 * b * K + w3}});
      break;
    }
    case A2Regime::BZero: {
      if (cfg.d != 1) throw ParameterError("a2: the b = 0 regime is one-dimensional");
      if (std::abs(b) > 1e-14) throw ParameterError("a2: b_zero needs beta = gamma");
      if (!(cfg.C2 > cfg.C3 && cfg.C3 > 0.0)) throw ParameterError("a2: b_zero needs C2 > C3 > 0");
      bx.C3_used = cfg.C3;
      bx.D1 = BoxRegion({{2.0 * K + 1.0 / cfg.C2, 2.0 * K + 1.0 / cfg.C3}});
      bx.D2 = BoxRegion({{K, K + 1.0 / cfg.C2}});
      bx.D3 = BoxRegion({{K, K + 1.0 / cfg.C3}});
      break;
    }
  }
  bx.N = {containing_scale(bx.D1), containing_scale(bx.D2), containing_scale(bx.D3)};
  return bx;
}

PhaseSmallness phase_smallness_a2(const BoxRegion& D1, const BoxRegion& D2, const BoxRegion& D3,
                                  const SystemParams& p, double t_max, long samples, std::uint64_t seed) {
  require_alpha_eq_gamma(p, "phase smallness");
  if (!(t_max >= 0.0)) throw ParameterError("phase smallness: t_max must be >= 0");
  PhaseSmallness r;
  if (t_max == 0.0) return r;
  double sup = 0.0;
  std::vector<double> x1(D1.dim());
  auto visit = [&](const std::vector<double>& y, const std::vector<double>& z) {
    for (int i = 0; i < D1.dim(); ++i) x1[i] = y[i] + z[i];
    if (!D1.contains(x1)) return;
    sup = std::max(sup, static_cast<double>(std::fabs(phase_value(y, z, p))));
  };
  for (const auto& y : corners(D2))
    for (const auto& z : corners(D3)) visit(y, z);
  std::mt19937_64 rng(seed);
  for (long n = 0; n < samples; ++n) visit(uniform_point(D2, rng), uniform_point(D3, rng));
  r.sup = t_max * sup;
  r.certified = t_max * interval_abs_max(phase_interval(D2, D3, p));
  return r;
}

A2Result counterexample_a2(const A2Config& cfg) {
  if (!(cfg.T > 0.0 && cfg.T <= 1.0)) throw ParameterError("a2: needs T in (0, 1]");
  A2Boxes bx = a2_boxes(cfg);
  A2Result r;
  if (bx.C3_adjusted)
    r.flags.push_back(fmt::format("C3 lowered to {:.6g} so that D1 is nondegenerate", bx.C3_used));
  BoxConvolution conv = box_convolution(bx.D2, bx.D3);
  r.conv_min_on_D1 = conv.min_on(bx.D1);
  r.conv_claim = cfg.regime == A2Regime::MultiD ? std::pow(cfg.K, cfg.d - 1) : 1.0;
  std::array<double, 3> Ns = bx.N;
  std::sort(Ns.begin(), Ns.end(), std::greater<>());
  r.window = cfg.T / Ns[0];
  r.phase_bound = r.window * interval_abs_max(phase_interval(bx.D2, bx.D3, cfg.params));
  r.sinc_regime = r.phase_bound <= kPi;
  if (!r.sinc_regime) {
    r.flags.push_back(fmt::format("phase bound {:.4g} exceeds pi on the window: no lower bound", r.phase_bound));
    return r;
  }
  r.lower_bound = r.window * sinc(r.phase_bound) * conv.integral_on(bx.D1);
  double norms = std::sqrt(bx.D1.volume() * bx.D2.volume() * bx.D3.volume());
  r.constant = r.lower_bound * Ns[0] / (std::pow(Ns[2], cfg.s) * norms);
  return r;
}

EstimateReport counterexample_a2_sweep(A2Config cfg, const std::vector<double>& K) {
  EstimateReport rep;
  rep.name = "counterexample-a2";
  rep.descriptors = {{"regime", a2_regime_name(cfg.regime)}, {"d", cfg.d}, {"p_exp", cfg.p_exp}, {"s", cfg.s},
                     {"T", cfg.T}, {"C_tilde", cfg.C_tilde}, {"C2", cfg.C2}, {"C3", cfg.C3},
                     {"params", to_json(cfg.params)}};
  std::vector<A2Result> res = parallel_map(K.size(), [&](std::size_t i) {
    A2Config c = cfg;
    c.K = K[i];
    return counterexample_a2(c);
  });
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < K.size(); ++i) {
    const A2Result& r = res[i];
    rep.samples.push_back({K[i], 0, r.constant});
    for (const auto& f : r.flags) rep.flags.push_back(fmt::format("K = {}: {}", K[i], f));
    rows.push_back({{"K", K[i]}, {"constant", r.constant}, {"lower_bound", r.lower_bound},
                    {"conv_min_on_D1", r.conv_min_on_D1}, {"conv_claim", r.conv_claim},
                    {"conv_ratio", r.conv_min_on_D1 / r.conv_claim}, {"phase_bound", r.phase_bound},
                    {"window", r.window}});
  }
  rep.finalize();
  rep.extra["rows"] = rows;
  rep.extra["predicted_slope"] = 0.5 * (cfg.d - 1) - cfg.s;
  return rep;
}

}  // namespace ccnls
