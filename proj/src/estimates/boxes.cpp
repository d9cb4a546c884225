#include "ccnls/boxes.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace ccnls {

BoxRegion::BoxRegion(std::vector<Interval> a, bool allow_degenerate) : axes(std::move(a)) {
  if (axes.empty()) throw ParameterError("box: needs at least one axis");
  for (const auto& iv : axes) {
    if (!(iv.lo <= iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi))
      throw ParameterError("box: interval with lo > hi");
    if (!allow_degenerate && iv.lo == iv.hi) throw ParameterError("box: zero-volume box");
  }
}

double BoxRegion::volume() const {
  double v = 1.0;
  for (const auto& iv : axes) v *= iv.length();
  return v;
}

bool BoxRegion::contains(std::span<const double> xi) const {
  if (static_cast<int>(xi.size()) != dim()) return false;
  for (int i = 0; i < dim(); ++i)
    if (xi[i] < axes[i].lo || xi[i] > axes[i].hi) return false;
  return true;
}

BoxRegion BoxRegion::reflected() const {
  BoxRegion r;
  for (const auto& iv : axes) r.axes.push_back({-iv.hi, -iv.lo});
  return r;
}

double BoxRegion::min_abs() const {
  double s = 0.0;
  for (const auto& iv : axes) {
    double m = (iv.lo <= 0.0 && iv.hi >= 0.0) ? 0.0 : std::min(std::abs(iv.lo), std::abs(iv.hi));
    s += m * m;
  }
  return std::sqrt(s);
}

double BoxRegion::max_abs() const {
  double s = 0.0;
  for (const auto& iv : axes) {
    double m = std::max(std::abs(iv.lo), std::abs(iv.hi));
    s += m * m;
  }
  return std::sqrt(s);
}

namespace {

double horner(const std::vector<double>& c, double y) {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * y + *it;
  return v;
}

double antiderivative(const std::vector<double>& c, double y) {
  double v = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) v = v * y + c[k] / static_cast<double>(k + 1);
  return v * y;
}

}  // namespace

double PiecewisePoly1D::operator()(double x) const {
  if (breaks.size() < 2 || x < breaks.front() || x > breaks.back()) return 0.0;
  std::size_t i = static_cast<std::size_t>(std::upper_bound(breaks.begin(), breaks.end(), x) - breaks.begin());
  i = i == 0 ? 0 : i - 1;
  if (i >= coef.size()) i = coef.size() - 1;
  return horner(coef[i], x - breaks[i]);
}

double PiecewisePoly1D::integral(double a, double b) const {
  if (breaks.size() < 2 || b <= a) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < coef.size(); ++i) {
    double lo = std::max(a, breaks[i]), hi = std::min(b, breaks[i + 1]);
    if (hi <= lo) continue;
    acc += antiderivative(coef[i], hi - breaks[i]) - antiderivative(coef[i], lo - breaks[i]);
  }
  return acc;
}

namespace {

// Candidate abscissae where the extremum of the piecewise polynomial over [a, b] can sit.
std::vector<double> extremum_candidates(const PiecewisePoly1D& f, double a, double b) {
  std::vector<double> xs{a, b};
  for (std::size_t i = 0; i < f.coef.size(); ++i) {
    double lo = std::max(a, f.breaks[i]), hi = std::min(b, f.breaks[i + 1]);
    if (hi < lo) continue;
    xs.push_back(lo);
    xs.push_back(hi);
    const auto& c = f.coef[i];
    if (c.size() > 3) throw std::logic_error("piecewise poly: extrema implemented up to degree 2");
    if (c.size() == 3 && c[2] != 0.0) {
      double y = -c[1] / (2.0 * c[2]);
      double x = f.breaks[i] + y;
      if (x > lo && x < hi) xs.push_back(x);
    }
  }
  return xs;
}

}  // namespace

double PiecewisePoly1D::min_on(double a, double b) const {
  double m = kInf;
  for (double x : extremum_candidates(*this, a, b)) m = std::min(m, (*this)(x));
  return m;
}

double PiecewisePoly1D::max_on(double a, double b) const {
  double m = -kInf;
  for (double x : extremum_candidates(*this, a, b)) m = std::max(m, (*this)(x));
  return m;
}

bool PiecewisePoly1D::nonnegative() const {
  for (std::size_t i = 0; i < coef.size(); ++i)
    if (min_on(breaks[i], breaks[i + 1]) < 0.0) return false;
  return true;
}

PiecewisePoly1D interval_convolution(Interval a, Interval b) {
  PiecewisePoly1D f;
  double wa = a.length(), wb = b.length();
  double s0 = a.lo + b.lo, s3 = a.hi + b.hi;
  double w = std::min(wa, wb);
  if (w <= 0.0) {
    f.breaks = {s0, std::max(s3, s0)};
    f.coef = {{0.0}};
    return f;
  }
  double s1 = s0 + w, s2 = s3 - w;
  f.breaks.push_back(s0);
  f.breaks.push_back(s1);
  f.coef.push_back({0.0, 1.0});
  if (s2 > s1) {
    f.breaks.push_back(s2);
    f.coef.push_back({w});
  }
  f.breaks.push_back(s3);
  f.coef.push_back({w, -1.0});
  return f;
}

double BoxConvolution::operator()(std::span<const double> xi) const {
  if (xi.size() != axes.size()) throw ParameterError("box convolution: dimension mismatch");
  double v = 1.0;
  for (std::size_t i = 0; i < axes.size(); ++i) v *= axes[i](xi[i]);
  return v;
}

double BoxConvolution::min_on(const BoxRegion& D) const {
  if (static_cast<std::size_t>(D.dim()) != axes.size()) throw ParameterError("box convolution: dimension mismatch");
  double v = 1.0;
  for (std::size_t i = 0; i < axes.size(); ++i) v *= axes[i].min_on(D.axes[i].lo, D.axes[i].hi);
  return v;
}

double BoxConvolution::max_on(const BoxRegion& D) const {
  if (static_cast<std::size_t>(D.dim()) != axes.size()) throw ParameterError("box convolution: dimension mismatch");
  double v = 1.0;
  for (std::size_t i = 0; i < axes.size(); ++i) v *= axes[i].max_on(D.axes[i].lo, D.axes[i].hi);
  return v;
}

double BoxConvolution::integral_on(const BoxRegion& D) const {
  if (static_cast<std::size_t>(D.dim()) != axes.size()) throw ParameterError("box convolution: dimension mismatch");
  double v = 1.0;
  for (std::size_t i = 0; i < axes.size(); ++i) v *= axes[i].integral(D.axes[i].lo, D.axes[i].hi);
  return v;
}

BoxConvolution box_convolution(const BoxRegion& a, const BoxRegion& b) {
  if (a.dim() != b.dim()) throw ParameterError("box convolution: dimension mismatch");
  BoxConvolution c;
  for (int i = 0; i < a.dim(); ++i) c.axes.push_back(interval_convolution(a.axes[i], b.axes[i]));
  return c;
}

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  if (n < 1) throw ParameterError("gauss_legendre: order must be >= 1");
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

double weighted_square_integral(const BoxConvolution& conv, const BoxRegion& D,
                                const std::function<double(std::span<const double>)>& weight, int order) {
  const int d = D.dim();
  if (static_cast<std::size_t>(d) != conv.axes.size()) throw ParameterError("weighted integral: dimension mismatch");
  if (d > 3) throw ParameterError("weighted integral: d <= 3 only");
  std::vector<double> gx, gw;
  gauss_legendre(order, gx, gw);
  // per-axis cell lists
  std::vector<std::vector<double>> cuts(d);
  for (int i = 0; i < d; ++i) {
    const auto& iv = D.axes[i];
    cuts[i].push_back(iv.lo);
    for (double b : conv.axes[i].breaks)
      if (b > iv.lo && b < iv.hi) cuts[i].push_back(b);
    cuts[i].push_back(iv.hi);
    std::sort(cuts[i].begin(), cuts[i].end());
  }
  // per-axis nodes and weights over all cells
  std::vector<std::vector<double>> nx(d), nw(d);
  for (int i = 0; i < d; ++i)
    for (std::size_t c = 0; c + 1 < cuts[i].size(); ++c) {
      double lo = cuts[i][c], hi = cuts[i][c + 1];
      if (hi <= lo) continue;
      double h = 0.5 * (hi - lo), m = 0.5 * (hi + lo);
      for (int k = 0; k < order; ++k) {
        nx[i].push_back(m + h * gx[k]);
        nw[i].push_back(h * gw[k]);
      }
    }
  double acc = 0.0;
  std::vector<double> xi(d);
  std::vector<std::size_t> idx(d, 0);
  for (;;) {
    double w = 1.0;
    for (int i = 0; i < d; ++i) {
      xi[i] = nx[i][idx[i]];
      w *= nw[i][idx[i]];
    }
    double c = conv(xi);
    acc += w * weight(xi) * c * c;
    int a = 0;
    while (a < d && ++idx[a] == nx[a].size()) idx[a++] = 0;
    if (a == d) break;
  }
  return acc;
}

McEstimate box_convolution_mc(const BoxRegion& a, const BoxRegion& b, std::span<const double> xi, long samples,
                              std::uint64_t seed) {
  if (samples < 2) throw ParameterError("monte carlo: need at least two samples");
  std::mt19937_64 rng(seed);
  std::vector<std::uniform_real_distribution<double>> dist;
  for (const auto& iv : b.axes) dist.emplace_back(iv.lo, iv.hi);
  long hit = 0;
  std::vector<double> z(b.dim());
  for (long n = 0; n < samples; ++n) {
    for (int i = 0; i < b.dim(); ++i) z[i] = xi[i] - dist[i](rng);
    if (a.contains(z)) ++hit;
  }
  double p = static_cast<double>(hit) / samples;
  double v = b.volume();
  return {v * p, v * std::sqrt(std::max(p * (1.0 - p), 0.0) / samples)};
}

Interval interval_mul(Interval a, Interval b) {
  double c[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  return {*std::min_element(c, c + 4), *std::max_element(c, c + 4)};
}

Interval interval_add(Interval a, Interval b) { return {a.lo + b.lo, a.hi + b.hi}; }

Interval interval_scale(Interval a, double c) {
  return c >= 0.0 ? Interval{a.lo * c, a.hi * c} : Interval{a.hi * c, a.lo * c};
}

double interval_abs_max(Interval a) { return std::max(std::abs(a.lo), std::abs(a.hi)); }

}  // namespace ccnls
