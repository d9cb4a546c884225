#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "ccnls/estimates.hpp"
#include "ccnls/norms.hpp"

using namespace ccnls;

namespace {

SystemParams params(double a, double b, double c, int d = 1) {
  SystemParams p;
  p.alpha = a;
  p.beta = b;
  p.gamma = c;
  p.d = d;
  return p;
}

double spread(const EstimateReport& r) {
  auto [lo, hi] = std::minmax_element(r.sup_ratio.begin(), r.sup_ratio.end());
  return *hi / *lo;
}

}  // namespace

// ---- dichotomy ----------------------------------------------------------------

TEST_CASE("dichotomy worked examples") {
  // b = 0: xi2 = 2, xi3 = 1 sits on the boundary and both conclusions hold with equality
  DichotomyResult r = dichotomy_check(2.0, 1.0, params(1, 1, 1));
  CHECK(r.b == 0.0);
  CHECK(r.threshold == 0.5);
  CHECK(r.deviation == 0.5);
  CHECK(r.A_lhs == 1.0);
  CHECK(r.A_bound == 1.0);
  CHECK(r.B_lhs == 4.0);
  CHECK(r.B_bound == 4.0);
  CHECK(r.A_holds);
  CHECK(r.B_holds);
  CHECK(r.certified != '-');

  // b = 2, xi3 = xi2: deep inside A
  r = dichotomy_check(1.0, 1.0, params(1, 3, 1));
  CHECK(r.b == 2.0);
  CHECK(r.in_A);
  CHECK_FALSE(r.in_B);
  CHECK(r.certified == 'A');
  CHECK(r.margin == doctest::Approx(1.0));

  // far from the resonant ratio: B
  r = dichotomy_check(1.0, 5.0, params(1, 1, 1));
  CHECK(r.certified == 'B');
  CHECK(r.B_lhs == 10.0);

  CHECK_THROWS_AS(dichotomy_check(0.0, 1.0, params(1, 1, 1)), ParameterError);
  CHECK_THROWS_AS(dichotomy_check(1.0, 1.0, params(2, 1, 1)), ParameterError);
  CHECK_THROWS_AS(dichotomy_check(1.0, 1.0, params(1, -1, 1)), ParameterError);
}

TEST_CASE("resonance identity") {
  ResonanceIdentity r = resonance_identity({0, 0, 0}, {3, 2, 1}, params(1, 1, 1));
  CHECK(r.lhs == 4.0);
  CHECK(r.rhs == 4.0);
  CHECK(r.residual == 0.0);
  r = resonance_identity({1.5, 1.0, 0.5}, {-1, 2, -3}, params(2, 5, 2));
  CHECK(r.residual <= 1e-12 * r.lhs);
  CHECK_THROWS_AS(resonance_identity({1, 0, 0}, {3, 2, 1}, params(1, 1, 1)), ParameterError);
  CHECK_THROWS_AS(resonance_identity({0, 0, 0}, {3, 2, 2}, params(1, 1, 1)), ParameterError);
}

TEST_CASE("dichotomy sweep covers the lattice") {
  for (auto p : {params(1, 1, 1), params(1, 3, 1), params(2, 0.5, 2), params(-1, -4, -1)}) {
    DichotomySweep s = dichotomy_sweep(p, -4, 4, 2000, 3);
    CHECK(s.points.size() == 18 * 18);
    CHECK(s.uncovered == 0);
    CHECK(s.region_A + s.region_B >= static_cast<long>(s.points.size()));
    CHECK(s.min_margin >= -kDichotomySlack);
    CHECK(s.max_relative_residual <= 1e-12);
  }
  CHECK(dichotomy_csv(dichotomy_sweep(params(1, 1, 1), 0, 0, 0)).rfind("xi2,xi3,deviation,threshold,in_A,in_B,certified,margin\n", 0) == 0);
}

// ---- boxes ----------------------------------------------------------------

TEST_CASE("interval and box convolution") {
  PiecewisePoly1D t = interval_convolution({0, 1}, {0, 1});
  CHECK(t(1.0) == doctest::Approx(1.0));
  CHECK(t(0.5) == doctest::Approx(0.5));
  CHECK(t(2.5) == 0.0);
  CHECK(t.integral(0, 2) == doctest::Approx(1.0));
  CHECK(t.min_on(0.5, 1.5) == doctest::Approx(0.5));
  CHECK(t.max_on(0.0, 2.0) == doctest::Approx(1.0));
  CHECK(t.nonnegative());

  BoxRegion a({{0, 2}, {1, 1.5}}), b({{-1, 0.5}, {0, 3}});
  BoxConvolution c = box_convolution(a, b);
  BoxRegion all({{-1, 2.5}, {1, 4.5}});
  CHECK(c.integral_on(all) == doctest::Approx(a.volume() * b.volume()).epsilon(1e-12));
  for (auto xi : {std::vector<double>{0.3, 2.0}, std::vector<double>{1.9, 1.2}, std::vector<double>{-0.5, 4.0}}) {
    McEstimate mc = box_convolution_mc(a, b, xi, 200000, 5);
    CHECK(std::abs(mc.mean - c(xi)) <= 4.0 * mc.stderr_ + 1e-12);
  }
  BoxRegion sub({{0.0, 1.0}, {2.0, 3.0}});
  CHECK(c.min_on(sub) <= c.max_on(sub));
  CHECK(c.min_on(sub) == doctest::Approx(std::min({c(std::vector<double>{0, 2}), c(std::vector<double>{1, 2}),
                                                   c(std::vector<double>{0, 3}), c(std::vector<double>{1, 3})})));
  CHECK(a.reflected().axes[0].lo == -2.0);
  CHECK(b.min_abs() == 0.0);
}

// ---- optimality constructions ----------------------------------------------

TEST_CASE("first construction at one scale") {
  A1Config cfg;
  cfg.K = 256;
  A1Result r = counterexample_a1(cfg);
  CHECK(r.sinc_regime);
  CHECK(r.conv_min_on_D >= r.conv_claim * (1.0 - 1e-12));
  CHECK(r.ratio > 0.0);
  CHECK(r.predicted_exponent == doctest::Approx(0.125));

  // t0 scales with T while the phase stays well below pi
  A1Config c2 = cfg;
  c2.T = 2.0 * cfg.T;
  A1Result r2 = counterexample_a1(c2);
  CHECK(r2.ratio / r.ratio >= 1.9);
  CHECK(r2.ratio / r.ratio <= 2.0);

  A1Boxes bx = a1_boxes(256, 0.5, 1, cfg.params);
  CHECK(phase_smallness_a1(bx.D, bx.D2, cfg.params, 0.0, 100).sup == 0.0);
  PhaseSmallness ph = phase_smallness_a1(bx.D, bx.D2, cfg.params, r.t0, 2000);
  CHECK(ph.sup <= ph.certified * (1.0 + 1e-12));
  CHECK_THROWS_AS(counterexample_a1(A1Config{.T = 0.0}), ParameterError);
}

TEST_CASE("first construction sweep") {
  A1Config cfg;
  std::vector<double> K;
  for (int k = 5; k <= 11; ++k) K.push_back(std::ldexp(1.0, k));
  EstimateReport r = counterexample_a1_sweep(cfg, K);
  REQUIRE(r.fit);
  MESSAGE("slope " << r.fit->slope << ", phase slope " << r.extra["phase_fit"]["slope"].get<double>());
  CHECK(r.flags.empty());
  CHECK(r.fit->slope == doctest::Approx(0.125).epsilon(0.03 / 0.125));
  CHECK(std::abs(r.extra["phase_fit"]["slope"].get<double>() - r.extra["phase_exponent"].get<double>()) <= 0.05);
}

TEST_CASE("second construction") {
  A2Config cfg;
  cfg.params = params(1, 1, 1, 2);
  // the convolution floor grows like K^{d-1}, with constant 1 / (2 C~) from the thin axis
  for (double K : {8.0, 32.0, 128.0}) {
    cfg.K = K;
    A2Result r = counterexample_a2(cfg);
    CHECK(r.sinc_regime);
    CHECK(r.conv_min_on_D1 == doctest::Approx(r.conv_claim / (2.0 * cfg.C_tilde)).epsilon(1e-9));
    CHECK(r.constant > 0.0);
  }

  A2Config one;
  one.regime = A2Regime::BPos;
  one.d = 1;
  one.params = params(1, 2, 1);
  one.K = 64;
  A2Result r = counterexample_a2(one);
  CHECK(r.phase_bound <= 0.1);
  CHECK(r.constant > 0.0);
  A2Boxes bx = a2_boxes(one);
  CHECK(phase_smallness_a2(bx.D1, bx.D2, bx.D3, one.params, r.window, 4000).sup <= r.phase_bound * (1 + 1e-12));

  one.regime = A2Regime::BNeg;
  CHECK_THROWS_AS(counterexample_a2(one), ParameterError);
  one.regime = A2Regime::BZero;
  one.params = params(1, 1, 1);
  one.C3 = 64.0;
  CHECK_THROWS_AS(a2_boxes(one), ParameterError);
  CHECK(a2_regime_from_string(a2_regime_name(A2Regime::MultiD)) == A2Regime::MultiD);
}

// ---- bilinear ------------------------------------------------------------------

TEST_CASE("sampled bilinear ratio") {
  Grid g(1, 2.0 * kPi, 64);
  SpaceTimeSample f(g, 0.0, 0.1, 10), h(g, 0.0, 0.1, 10);
  for (auto& z : f.values[0]) z = 1.0;
  for (auto& z : h.values[0]) z = 1.0;
  double r = bilinear_ratio_sampled(f, h, 16, 2, 0, 0);
  CHECK(r * bilinear_bound(16, 2, 0, 0, 1) * std::sqrt(10 * 0.1 * 2.0 * kPi) == doctest::Approx(1.0).epsilon(1e-12));
  // disjoint spatial supports
  for (int q = 0; q < 10; ++q)
    for (std::size_t x = 0; x < g.size(); ++x) {
      f.at(0, q, x) = x < 32 ? 1.0 : 0.0;
      h.at(0, q, x) = x < 32 ? 0.0 : 1.0;
    }
  CHECK(bilinear_ratio_sampled(f, h, 16, 2, 0, 0) == 0.0);
  CHECK(bilinear_bound(64, 2, 1, 1, 1) == doctest::Approx(0.125 * 2.0));
  CHECK_THROWS_AS(bilinear_bound(64, 2, 0, 0, 1, 1.0), ParameterError);
}

TEST_CASE("bilinear experiment") {
  BilinearConfig cfg;
  cfg.N1 = {16, 32, 64, 128, 256};
  cfg.ensemble = 6;
  EstimateReport r = bilinear_ratio_experiment(cfg);
  REQUIRE(r.fit);
  CHECK(r.samples.size() == 30);
  CHECK(spread(r) <= 3.0);
  auto cc = bilinear_crosscheck(cfg, 0, 1);
  MESSAGE("semi-analytic " << cc[0] << ", quadrature " << cc[1]);
  CHECK(cc[1] == doctest::Approx(cc[0]).epsilon(0.05));
  cfg.N1 = {4};
  CHECK_THROWS_AS(validate(cfg), ParameterError);
}

// ---- trilinear -------------------------------------------------------------------

TEST_CASE("trilinear time integral oracle") {
  SystemParams p = params(1, 1, 1);
  LatticeData u{3, {1.0}}, v{1, {1.0}}, w{2, {1.0}};
  // Phi = 9 - 1 - 4 = 4
  cplx I = trilinear_time_integral(u, v, w, p, 0.0, 1.0);
  CHECK(std::abs(I) == doctest::Approx(2.0 * kPi * std::abs(2.0 * std::sin(2.0) / 4.0)).epsilon(1e-12));
  CHECK(std::abs(trilinear_time_integral(LatticeData{4, {1.0}}, v, w, p, 0.0, 1.0)) == 0.0);
  CHECK(std::abs(trilinear_time_integral(u, LatticeData{1, {0.0}}, w, p, 0.0, 1.0)) == 0.0);
  CHECK(u.norm() == doctest::Approx(std::sqrt(2.0 * kPi)));
}

TEST_CASE("trilinear experiment") {
  TrilinearConfig cfg;
  cfg.scales = {16, 32, 64, 128, 256};
  cfg.ensemble = 6;
  EstimateReport r = trilinear_ratio_experiment(cfg);
  REQUIRE(r.fit);
  CHECK(r.samples.size() == 30);
  for (const auto& s : r.samples) CHECK(std::isfinite(s.ratio));
  CHECK(report_csv(r).rfind("scale,member,ratio\n", 0) == 0);
  CHECK(report_summary(r)["slope"].get<double>() == r.fit->slope);
  cfg.params = params(2, 1, 1);
  CHECK_THROWS_AS(validate(cfg), ParameterError);
  CHECK(trilinear_case_from_string(trilinear_case_name(TrilinearCase::HighLowHigh)) == TrilinearCase::HighLowHigh);
}

// ---- quadratic ---------------------------------------------------------------------

TEST_CASE("quadratic terms of zero data vanish") {
  Grid g(1, 2.0 * kPi, 128);
  Field z(g, 1, Rep::Spectral);
  QuadraticTerms t = quadratic_terms(z, z, DyadicScale(16), QuadraticConfig{});
  CHECK(t.lhs == 0.0);
}

TEST_CASE("quadratic experiment, high-high case") {
  QuadraticConfig cfg;
  cfg.kind = QuadraticCase::HighHigh;
  cfg.scales = {16, 32, 64, 128, 256};
  cfg.ensemble = 4;
  EstimateReport r = quadratic_estimate_experiment(cfg);
  REQUIRE(r.fit);
  MESSAGE("slope " << r.fit->slope << ", spread " << spread(r));
  CHECK(spread(r) <= 3.0);
  CHECK(quadratic_case_from_string("high_high") == QuadraticCase::HighHigh);
}

// ---- reports ---------------------------------------------------------------------------

TEST_CASE("report finalize") {
  EstimateReport r;
  for (int k = 0; k < 4; ++k) r.samples.push_back({std::ldexp(1.0, k + 1), 0, 1.0});
  r.finalize();
  CHECK_FALSE(r.fit);
  CHECK(r.warnings.size() == 1);
  r.samples.push_back({32.0, 0, 1.0});
  r.samples.push_back({32.0, 1, 3.0});
  r.warnings.clear();
  r.finalize();
  REQUIRE(r.fit);
  CHECK(r.sup_ratio.back() == 3.0);
  CHECK(report_summary(r)["n_points"] == 5);
}
