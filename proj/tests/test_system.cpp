#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ccnls/norms.hpp"
#include "ccnls/system.hpp"
#include "support.hpp"

using namespace ccnls;
using testing::max_abs;
using testing::max_abs_diff;
using testing::plane_wave;
using testing::random_band_limited;
using testing::random_field;

namespace {

SystemParams params(double a, double b, double c, double K = kInf, int d = 1) {
  SystemParams p;
  p.alpha = a;
  p.beta = b;
  p.gamma = c;
  p.K = K;
  p.d = d;
  return p;
}

}  // namespace

TEST_CASE("resonance classification") {
  auto r = resonance_quantities(params(1, 1, 1));
  CHECK(r.kappa_tilde == 0.0);
  CHECK(r.b.value() == 0.0);
  CHECK(r.regime == Regime::ShortTime);

  r = resonance_quantities(params(2, 1, 1));
  CHECK(r.kappa_tilde == 2.0);
  CHECK(r.kappa == doctest::Approx((2.0 - 1.0) * (2.0 - 1.0) * 2.0));
  CHECK(r.mu == doctest::Approx(2.0 * (0.5 - 1.0 - 1.0)));
  CHECK(r.regime == Regime::Iteration);

  r = resonance_quantities(params(1, -1, 1));
  CHECK(r.regime == Regime::IllPosedLine);
  CHECK(r.b.value() == -2.0);
  CHECK(r.flagged);

  // beta = gamma (b + 1)
  r = resonance_quantities(params(1.5, 3.0, 1.5));
  CHECK(r.b.value() == doctest::Approx(1.0));
  CHECK(std::string(regime_name(Regime::ShortTime)) == "ShortTime");
}

TEST_CASE("parameter json round trip") {
  SystemParams p = params(1.5, 2.0, 1.5, 16.0, 2);
  SystemParams q = params_from_json(to_json(p));
  CHECK(q.alpha == p.alpha);
  CHECK(q.beta == p.beta);
  CHECK(q.K == 16.0);
  CHECK(q.d == 2);
  CHECK(std::isinf(params_from_json({{"K", "inf"}}).K));
  CHECK_THROWS_AS(params_from_json({{"K", "big"}}), ParameterError);
}

TEST_CASE("nonlinearity of the zero state vanishes") {
  Grid g(1, 2.0 * kPi, 64);
  Nonlinearity n = nonlinearity(StateBundle::zeros(g), params(1, 1, 1));
  CHECK(max_abs(n.Nu) == 0.0);
  CHECK(max_abs(n.Nv) == 0.0);
  CHECK(max_abs(n.Nw) == 0.0);
}

TEST_CASE("nonlinearity with v = 0") {
  Grid g(1, 2.0 * kPi, 64);
  Field u = plane_wave(g, 3), v(g), w = random_band_limited(g, 2, 8.0);
  Nonlinearity n = nonlinearity(StateBundle(u, v, w), params(1, 1, 1));
  CHECK(max_abs(n.Nu) <= 1e-12 * g.size());
  CHECK(max_abs(n.Nw) <= 1e-12 * g.size());
  // v is driven by conj(div w) u, which does not vanish
  Field expect = multiply(conj(divergence(w)), u);
  CHECK(max_abs_diff(n.Nv, sharp_truncate(expect, g.dealias_cutoff())) <= 1e-10 * max_abs(expect.spectral()));
}

TEST_CASE("single-mode product oracle") {
  // w = e^{iax}, v = e^{icx}: (div w) v = i a e^{i(a+c)x}
  Grid g(1, 2.0 * kPi, 64);
  const int a = 3, c = 5;
  Field w = plane_wave(g, a), v = plane_wave(g, c), u(g);
  Nonlinearity n = nonlinearity(StateBundle(u, v, w), params(1, 1, 1));
  Field expect = cplx(0.0, a) * plane_wave(g, a + c);
  CHECK(max_abs_diff(n.Nu, expect) <= 1e-12 * max_abs(expect.spectral()));
  // truncation removes modes above K
  Nonlinearity t = nonlinearity(StateBundle(u, v, w), params(1, 1, 1, 6.0));
  CHECK(max_abs(t.Nu) <= 1e-12 * g.size());
}

TEST_CASE("truncated nonlinearity is supported in the ball of radius K") {
  Grid g(2, 2.0 * kPi, 32);
  StateBundle s(random_field(g, 1), random_field(g, 2), random_field(g, 3));
  Nonlinearity n = nonlinearity(s, params(1, 2, 1, 5.0, 2));
  for (const Field* f : {&n.Nu, &n.Nv, &n.Nw})
    for (const auto& c : f->comp)
      for (std::size_t i = 0; i < g.size(); ++i)
        if (g.xi_abs(i) > 5.0) CHECK(c[i] == cplx(0.0));
}

TEST_CASE("commutator with P_N") {
  Grid g(1, 2.0 * kPi, 256);
  Field one(g, 1, Rep::Physical);
  for (auto& z : one.comp[0]) z = 2.5;
  Field h = random_field(g, 4, 1);
  CHECK(max_abs(commutator_pn(one, h, 8)) <= 1e-12 * max_abs(h));

  // plateau of P_32 is [80/3, 128/3]: g on [30, 36], f up to 2 keeps f g on [28, 38]
  Field gp = sharp_band(random_field(g, 5, 1), 29.5, 36.0);
  Field fl = sharp_truncate(random_field(g, 6, 1), 2.0);
  CHECK(max_abs(commutator_pn(fl, gp, 32)) <= 1e-10 * max_abs(multiply(fl, gp).spectral()));

  Field f1 = random_field(g, 7, 1), f2 = random_field(g, 8, 1), g1 = random_field(g, 9, 1);
  const cplx a(0.3, -1.2);
  Field lhs = commutator_pn(f1 + a * f2, g1, 8);
  Field rhs = commutator_pn(f1, g1, 8) + a * commutator_pn(f2, g1, 8);
  CHECK(max_abs_diff(lhs, rhs) <= 1e-10 * max_abs(lhs));
}

TEST_CASE("double commutator") {
  Grid g(1, 2.0 * kPi, 256);
  Field f = random_field(g, 1, 1), h = random_field(g, 2, 1), z(g, 1, Rep::Spectral);
  CHECK(max_abs_diff(double_commutator(z, h, 8), -1.0 * multiply(z, project_dyadic(h, 8))) == 0.0);
  CHECK(max_abs(double_commutator(z, z, 8)) == 0.0);
  CHECK(max_abs_diff(double_commutator(f, h, 8), double_commutator(h, f, 8)) <= 1e-12 * max_abs(multiply(f, h)));

  // both factors far below the shell: every piece vanishes
  Field lo1 = sharp_truncate(random_field(g, 3, 1), 0.32), lo2 = sharp_truncate(random_field(g, 4, 1), 0.32);
  CHECK(max_abs(double_commutator(lo1, lo2, 32)) <= 1e-10);
}

TEST_CASE("scaling transform") {
  for (int d : {1, 2}) {
    Grid g(d, 2.0 * kPi, d == 1 ? 128 : 32);
    StateBundle s(random_field(g, 1), random_field(g, 2), random_field(g, 3), 0.25);
    StateBundle one = scaling_transform(s, 1.0);
    CHECK(max_abs_diff(one.u, s.u) <= 1e-12 * max_abs(s.u));  // one FFT round trip
    StateBundle big = scaling_transform(s, 4.0);
    CHECK(big.grid().L == doctest::Approx(4.0 * g.L));
    CHECK(big.time == doctest::Approx(16.0 * 0.25));
    const double sc = 0.5 * d - 1.0;
    for (auto [a, b] : {std::pair{&s.u, &big.u}, {&s.v, &big.v}, {&s.w, &big.w}})
      CHECK(homogeneous_sobolev_norm(*b, sc) == doctest::Approx(homogeneous_sobolev_norm(*a, sc)).epsilon(1e-10));
    StateBundle twice = scaling_transform(scaling_transform(s, 2.0), 4.0);
    StateBundle once = scaling_transform(s, 8.0);
    CHECK(max_abs_diff(twice.w, once.w) <= 1e-12 * max_abs(once.w));
    CHECK(twice.time == once.time);
  }
  Grid g(1, 2.0 * kPi, 16);
  CHECK_THROWS_AS(scaling_transform(StateBundle::zeros(g), 3.0), ParameterError);
}
