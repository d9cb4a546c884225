#include <cmath>
#include <set>

#include "ccnls/experiments.hpp"

namespace ccnls {

namespace {

// Two-sided 95% Student t quantiles, df = 1..30.
double t975(std::size_t df) {
  static const double tab[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
                               2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
                               2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
  if (df == 0) return kInf;
  return df <= 30 ? tab[df - 1] : 1.96;
}

}  // namespace

RateFit rate_fit(const std::vector<double>& x, const std::vector<double>& y, std::size_t min_points) {
  if (x.size() != y.size()) throw ParameterError("rate_fit: x and y differ in length");
  if (x.size() < min_points) throw ParameterError("rate_fit: need at least " + std::to_string(min_points) + " points");
  std::set<double> distinct(x.begin(), x.end());
  if (distinct.size() < 2) throw ParameterError("rate_fit: degenerate abscissae");
  RateFit f;
  f.x = x;
  f.y = y;
  const std::size_t n = x.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ParameterError("rate_fit: log-log fit needs positive data");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = ly[i] - (f.intercept + f.slope * lx[i]);
    ss += r * r;
  }
  f.residual = std::sqrt(ss / n);
  if (n > 2) {
    f.stderr_slope = std::sqrt(ss / (n - 2) / sxx);
    f.ci95 = t975(n - 2) * f.stderr_slope;
  }
  return f;
}

nlohmann::json to_json(const RateFit& f) {
  return {{"x", f.x},         {"y", f.y},           {"slope", f.slope},
          {"intercept", f.intercept}, {"residual", f.residual}, {"stderr", f.stderr_slope},
          {"ci95", f.ci95},   {"n_points", f.x.size()}};
}

}  // namespace ccnls
