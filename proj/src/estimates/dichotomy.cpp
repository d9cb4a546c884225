#include <cmath>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "ccnls/estimates.hpp"

namespace ccnls {

namespace {

void require_dichotomy_params(const SystemParams& p) {
  if (p.gamma == 0.0) throw ParameterError("dichotomy: gamma = 0 leaves b undefined");
  if (std::abs(p.alpha - p.gamma) > 1e-14 * std::max(1.0, std::abs(p.gamma)))
    throw ParameterError("dichotomy: needs alpha = gamma");
  if (p.beta + p.gamma == 0.0) throw ParameterError("dichotomy: needs beta + gamma != 0");
}

double b_of(const SystemParams& p) { return p.beta / p.gamma - 1.0; }

}  // namespace

DichotomyResult dichotomy_check(double xi2, double xi3, const SystemParams& p) {
  require_dichotomy_params(p);
  if (xi2 == 0.0 || !std::isfinite(xi2) || !std::isfinite(xi3))
    throw ParameterError("dichotomy: xi2 must be finite and nonzero");
  DichotomyResult r;
  r.b = b_of(p);
  r.deviation = std::abs(xi3 / xi2 - 0.5 * r.b);
  r.threshold = 0.25 * std::abs(r.b + 2.0);
  r.in_A = r.deviation <= r.threshold * (1.0 + kDichotomySlack);
  r.in_B = r.deviation >= r.threshold * (1.0 - kDichotomySlack);

  const long double x2 = xi2, x3 = xi3, x1 = x2 + x3;
  r.A_lhs = static_cast<double>(std::fabs(static_cast<long double>(p.beta) * x2 - static_cast<long double>(p.gamma) * x3));
  r.A_bound = std::abs(p.gamma) * std::abs(r.b + 2.0) * std::abs(xi2) / 4.0;
  r.B_lhs = static_cast<double>(std::fabs(p.alpha * x1 * x1 - p.beta * x2 * x2 - p.gamma * x3 * x3));
  r.B_bound = std::abs(p.gamma) * std::abs(r.b + 2.0) * xi2 * xi2 / 2.0;
  r.A_holds = r.A_lhs >= r.A_bound * (1.0 - kDichotomySlack);
  r.B_holds = r.B_lhs >= r.B_bound * (1.0 - kDichotomySlack);

  if (r.in_A && r.A_holds) {
    r.certified = 'A';
    r.margin = r.A_lhs / r.A_bound - 1.0;
  } else if (r.in_B && r.B_holds) {
    r.certified = 'B';
    r.margin = r.B_lhs / r.B_bound - 1.0;
  }
  return r;
}

ResonanceIdentity resonance_identity(const std::array<double, 3>& tau, const std::array<double, 3>& xi,
                                     const SystemParams& p) {
  require_dichotomy_params(p);
  if (xi[1] == 0.0) throw ParameterError("resonance identity: xi2 must be nonzero");
  auto scale = [](double a, double b, double c) { return std::max({1.0, std::abs(a), std::abs(b), std::abs(c)}); };
  if (std::abs(tau[0] - tau[1] - tau[2]) > 1e-12 * scale(tau[0], tau[1], tau[2]))
    throw ParameterError(fmt::format("resonance identity: tau1 - tau2 - tau3 = {:.3g} != 0", tau[0] - tau[1] - tau[2]));
  if (std::abs(xi[0] - xi[1] - xi[2]) > 1e-12 * scale(xi[0], xi[1], xi[2]))
    throw ParameterError(fmt::format("resonance identity: xi1 - xi2 - xi3 = {:.3g} != 0", xi[0] - xi[1] - xi[2]));
  const long double t1 = tau[0], t2 = tau[1], t3 = tau[2];
  const long double x1 = xi[0], x2 = xi[1], x3 = xi[2];
  long double lhs = std::fabs((t1 + p.alpha * x1 * x1) - (t2 + p.beta * x2 * x2) - (t3 + p.gamma * x3 * x3));
  long double rhs = 2.0L * std::fabs(static_cast<long double>(p.gamma)) * x2 * x2 *
                    std::fabs(x3 / x2 - 0.5L * static_cast<long double>(b_of(p)));
  ResonanceIdentity r;
  r.lhs = static_cast<double>(lhs);
  r.rhs = static_cast<double>(rhs);
  r.residual = static_cast<double>(std::fabs(lhs - rhs));
  return r;
}

DichotomySweep dichotomy_sweep(const SystemParams& p, int kmin, int kmax, long fuzz, std::uint64_t seed) {
  require_dichotomy_params(p);
  if (kmin > kmax) throw ParameterError("dichotomy: needs kmin <= kmax");
  if (fuzz < 0) throw ParameterError("dichotomy: fuzz count must be >= 0");
  std::vector<double> axis;
  for (int k = kmax; k >= kmin; --k) axis.push_back(-std::ldexp(1.0, k));
  for (int k = kmin; k <= kmax; ++k) axis.push_back(std::ldexp(1.0, k));
  DichotomySweep sw;
  sw.min_margin = kInf;
  for (double x2 : axis)
    for (double x3 : axis) {
      DichotomyResult r = dichotomy_check(x2, x3, p);
      sw.points.push_back({x2, x3});
      if (r.in_A) ++sw.region_A;
      if (r.in_B) ++sw.region_B;
      if (r.certified == '-') ++sw.uncovered;
      else sw.min_margin = std::min(sw.min_margin, r.margin);
      sw.results.push_back(r);
    }
  // dyadic rationals with 20 fractional bits: sums are exact in double
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> pick(-(64L << 20), 64L << 20);
  auto draw = [&] { return std::ldexp(static_cast<double>(pick(rng)), -20); };
  sw.fuzz_samples = fuzz;
  for (long n = 0; n < fuzz; ++n) {
    double x2 = 0.0;
    while (x2 == 0.0) x2 = draw();
    const double x3 = draw(), t2 = draw(), t3 = draw();
    ResonanceIdentity r = resonance_identity({t2 + t3, t2, t3}, {x2 + x3, x2, x3}, p);
    sw.max_relative_residual = std::max(sw.max_relative_residual, r.residual / std::max(1.0, r.lhs));
  }
  return sw;
}

std::string dichotomy_csv(const DichotomySweep& s) {
  std::ostringstream os;
  os << "xi2,xi3,deviation,threshold,in_A,in_B,certified,margin\n";
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    const auto& r = s.results[i];
    os << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{},{},{},{:.17g}\n", s.points[i][0], s.points[i][1],
                      r.deviation, r.threshold, r.in_A ? 1 : 0, r.in_B ? 1 : 0, r.certified, r.margin);
  }
  return os.str();
}

}  // namespace ccnls
