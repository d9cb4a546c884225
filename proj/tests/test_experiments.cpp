#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ccnls/experiments.hpp"
#include "ccnls/norms.hpp"
#include "support.hpp"

using namespace ccnls;
using testing::max_abs;
using testing::max_abs_diff;

namespace {

DataSpec sobolev(double s, std::uint64_t seed, double amp = 1.0) {
  DataSpec d;
  d.s = s;
  d.seed = seed;
  d.amplitude = amp;
  return d;
}

SolverConfig solver(double dt, double T, int cadence) {
  SolverConfig c;
  c.dt = dt;
  c.T = T;
  c.cadence = cadence;
  return c;
}

bool identical(const StateBundle& a, const StateBundle& b) {
  return max_abs_diff(a.u, b.u) == 0.0 && max_abs_diff(a.v, b.v) == 0.0 && max_abs_diff(a.w, b.w) == 0.0;
}

}  // namespace

TEST_CASE("data spec parsing") {
  DataSpec d = data_spec_from_json({{"kind", "BoxData"}, {"lo", 2.0}, {"hi", 5.0}, {"seed", 9}});
  CHECK(d.kind == DataKind::BoxData);
  CHECK(d.seed == 9);
  CHECK(data_spec_from_json(to_json(d)).hi == 5.0);
  CHECK_THROWS_AS(data_spec_from_json({{"kind", "Noise"}}), ParameterError);
  CHECK_THROWS_AS(data_spec_from_json({{"kind", "Gaussian"}, {"width", 0.0}}), ParameterError);
  CHECK_THROWS_AS(data_spec_from_json({{"amplitude", "big"}}), ParameterError);
}

TEST_CASE("random data is a function of the seed") {
  Grid g(1, 2.0 * kPi, 128);
  CHECK(identical(make_data(g, sobolev(1.6, 4)), make_data(g, sobolev(1.6, 4))));
  CHECK_FALSE(identical(make_data(g, sobolev(1.6, 4)), make_data(g, sobolev(1.6, 5))));
  Grid g2(2, 2.0 * kPi, 16);
  CHECK(identical(make_data(g2, sobolev(1.6, 4)), make_data(g2, sobolev(1.6, 4))));
}

TEST_CASE("refining the grid keeps low modes and the H^s norm") {
  Grid coarse(1, 2.0 * kPi, 256), fine(1, 2.0 * kPi, 512);
  StateBundle a = make_data(coarse, sobolev(1.6, 2)), b = make_data(fine, sobolev(1.6, 2));
  Field ac = a.u.spectral(), bc = b.u.spectral();
  for (int k = 0; k < 100; ++k) {
    CHECK(std::abs(ac.comp[0][k] / 256.0 - bc.comp[0][k] / 512.0) <= 1e-14);
    CHECK(std::abs(ac.comp[0][256 - k - 1] / 256.0 - bc.comp[0][512 - k - 1] / 512.0) <= 1e-14);
  }
  double hs = sobolev_norm(a, 1.6), hs_f = sobolev_norm(b, 1.6);
  CHECK(hs_f / hs == doctest::Approx(1.0).epsilon(0.2));
  // one derivative above the target regularity keeps growing
  double up = sobolev_norm(a, 2.6), up_f = sobolev_norm(b, 2.6);
  MESSAGE("H^s ratio " << hs_f / hs << ", H^{s+1} ratio " << up_f / up);
  CHECK(up_f / up >= 1.5);
}

TEST_CASE("structured data kinds") {
  Grid g(1, 2.0 * kPi, 64);
  DataSpec m;
  m.kind = DataKind::SingleMode;
  m.mode = 5;
  m.amplitude = 2.0;
  StateBundle s = make_data(g, m);
  Field u = s.u.spectral();
  for (std::size_t i = 0; i < g.size(); ++i)
    CHECK(std::abs(u.comp[0][i]) == doctest::Approx(i == 5 ? 2.0 * 64 / std::sqrt(2.0 * kPi) : 0.0));
  m.mode = 40;
  CHECK_THROWS_AS(make_data(g, m), ParameterError);

  DataSpec box;
  box.kind = DataKind::BoxData;
  box.lo = 3.0;
  box.hi = 6.0;
  Field w = make_data(g, box).w.spectral();
  for (std::size_t i = 0; i < g.size(); ++i)
    CHECK((std::abs(w.comp[0][i]) > 0.0) == (g.xi_abs(i) >= 3.0 && g.xi_abs(i) <= 6.0));

  DataSpec gs;
  gs.kind = DataKind::Gaussian;
  gs.width = 0.5;
  StateBundle g1 = make_data(g, gs);
  gs.amplitude = 3.0;
  StateBundle g3 = make_data(g, gs);
  CHECK(sobolev_norm(g3, 1.0) == doctest::Approx(3.0 * sobolev_norm(g1, 1.0)).epsilon(1e-12));
}

TEST_CASE("random ensembles") {
  Grid g(1, 2.0 * kPi, 64);
  auto e1 = random_ensemble(g, 5, sobolev(1.0, 3), 0.1, 10.0);
  auto e2 = random_ensemble(g, 5, sobolev(1.0, 3), 0.1, 10.0);
  REQUIRE(e1.size() == 5);
  for (std::size_t i = 0; i < e1.size(); ++i) CHECK(identical(e1[i], e2[i]));
  CHECK_FALSE(identical(e1[0], e1[1]));
  // amplitudes are drawn inside the band: compare against unit-amplitude data of the same shape
  double unit = sobolev_norm(make_data(g, sobolev(1.0, 3)), 1.0);
  for (const auto& s : e1) {
    double r = sobolev_norm(s, 1.0) / unit;
    CHECK(r >= 0.1 * 0.5);
    CHECK(r <= 10.0 * 2.0);
  }
  CHECK_THROWS_AS(random_ensemble(g, 0, sobolev(1.0, 3), 0.1, 1.0), ParameterError);
  CHECK_THROWS_AS(random_ensemble(g, 2, sobolev(1.0, 3), 0.0, 1.0), ParameterError);
}

TEST_CASE("rate fit") {
  std::vector<double> x = {2, 4, 8, 16, 32}, y;
  for (double v : x) y.push_back(3.0 * std::pow(v, -1.5));
  RateFit f = rate_fit(x, y);
  CHECK(f.slope == doctest::Approx(-1.5).epsilon(1e-12));
  CHECK(std::exp(f.intercept) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(f.residual <= 1e-12);

  RateFit c = rate_fit(x, std::vector<double>(5, 2.0));
  CHECK(std::abs(c.slope) <= 1e-15);
  CHECK(to_json(c)["n_points"] == 5);

  CHECK_THROWS_AS(rate_fit({1, 2, 3}, {1, 2, 3}), ParameterError);
  CHECK_THROWS_AS(rate_fit({1, 2, 3, 4}, {1, 2, -3, 4}), ParameterError);
  CHECK_THROWS_AS(rate_fit({2, 2, 2, 2}, {1, 2, 3, 4}), ParameterError);
}

TEST_CASE("rate fit confidence band is calibrated") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> nd(0.0, 0.2);
  std::vector<double> x = {2, 4, 8, 16, 32, 64, 128, 256};
  int covered = 0;
  const int trials = 400;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> y;
    for (double v : x) y.push_back(std::pow(v, -0.75) * std::exp(nd(rng)));
    RateFit f = rate_fit(x, y);
    covered += std::abs(f.slope + 0.75) <= f.ci95;
  }
  MESSAGE("coverage " << covered << " / " << trials);
  CHECK(covered >= 0.9 * trials);
  CHECK(covered <= 0.99 * trials);
}

TEST_CASE("convergence study flags analytic data") {
  ConvergenceConfig cfg;
  cfg.grid = Grid(1, 2.0 * kPi, 128);
  cfg.data.kind = DataKind::Gaussian;
  cfg.data.width = 0.5;
  cfg.data.amplitude = 0.3;
  cfg.K = {2, 4, 8, 16};
  cfg.solver = solver(1.0 / 256, 0.25, 8);
  ConvergenceResult r = convergence_study(cfg);
  for (std::size_t i = 0; i < r.K.size(); ++i) MESSAGE("K " << r.K[i] << " error " << r.error[i]);
  CHECK(r.K_ref == 32.0);
  CHECK(r.monotone);
  CHECK(r.smooth_regime);
  CHECK(convergence_csv(r).rfind("K,error\n", 0) == 0);

  cfg.K = {8, 16, 32};
  CHECK_THROWS_AS(convergence_study(cfg), ParameterError);  // reference beyond the dealiasing cutoff
  cfg.K = {4, 3};
  CHECK_THROWS_AS(convergence_study(cfg), ParameterError);
}

TEST_CASE("convergence study at finite regularity") {
  ConvergenceConfig cfg;
  cfg.grid = Grid(1, 2.0 * kPi, 256);
  cfg.data = sobolev(1.6, 1, 0.3);
  cfg.K = {4, 8, 16, 32};
  cfg.solver = solver(1.0 / 1024, 0.25, 16);
  ConvergenceResult r = convergence_study(cfg);
  MESSAGE("slope " << r.fit.slope << " predicted " << r.predicted_slope);
  CHECK(r.predicted_slope == doctest::Approx(-0.6));
  CHECK(r.monotone);
  CHECK_FALSE(r.smooth_regime);
  CHECK(r.fit.slope <= r.predicted_slope + 0.3);
}

TEST_CASE("flow continuity probe") {
  Grid g(1, 2.0 * kPi, 128);
  StateBundle data = make_data(g, sobolev(1.6, 1));
  SystemParams p;
  ContinuityResult r = flow_continuity_probe(data, {1e-2, 1e-3, 0.0}, 1.6, p, solver(1.0 / 2048, 0.0625, 16));
  REQUIRE(r.rows.size() == 3);
  CHECK(r.monotone);
  // the unit direction loses its modes above the dealiasing cutoff
  CHECK(r.rows[0].initial_distance <= 1e-2);
  CHECK(r.rows[0].initial_distance >= 0.98e-2);
  CHECK(r.rows[2].sup_distance == 0.0);
  CHECK(r.rows[2].amplification == 0.0);
  CHECK(r.rows[0].amplification == doctest::Approx(r.rows[1].amplification).epsilon(0.05));
  CHECK(continuity_csv(r).rfind("eps,initial_distance,sup_distance,amplification,sqrt_loss_shape\n", 0) == 0);
  CHECK_THROWS_AS(flow_continuity_probe(data, {1e-3, 1e-2}, 1.6, p, solver(0.01, 0.01, 1)), ParameterError);
}

TEST_CASE("smoothing ladder") {
  Grid g(1, 2.0 * kPi, 128);
  StateBundle data = make_data(g, sobolev(1.6, 1));
  SystemParams p;
  // at T = 0 each rung is the H^s mass of one dyadic block of the data
  LadderResult z = smoothing_ladder(data, {4, 8, 16}, 1.6, p, solver(0.01, 0.0, 1));
  for (std::size_t i = 0; i < 2; ++i) {
    const std::int64_t J = static_cast<std::int64_t>(z.J[i]), J2 = 2 * J;
    StateBundle blk(project_low(data.u, J2) - project_low(data.u, J), project_low(data.v, J2) - project_low(data.v, J),
                    project_low(data.w, J2) - project_low(data.w, J));
    CHECK(z.distance[i] == doctest::Approx(sobolev_norm(blk, 1.6)).epsilon(1e-12));
  }
  LadderResult r = smoothing_ladder(data, {4, 8, 16}, 1.6, p, solver(1.0 / 4096, 0.125, 16));
  CHECK(r.distance[1] <= r.distance[0]);
  CHECK(r.partial_sum == doctest::Approx(r.distance[0] + r.distance[1]));
  CHECK(ladder_csv(r).rfind("J,J_next,distance\n", 0) == 0);
  CHECK_THROWS_AS(smoothing_ladder(data, {4, 6}, 1.6, p, solver(0.01, 0.0, 1)), ParameterError);
}
