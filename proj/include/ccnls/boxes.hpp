#pragma once

#include <span>
#include <cstdint>
#include <functional>
#include <vector>

#include "ccnls/grid.hpp"
#include "ccnls/multipliers.hpp"

namespace ccnls {

struct Interval {
  double lo = 0.0, hi = 0.0;
  double length() const { return hi - lo; }
};

// Axis-aligned box, closed intervals per axis.
struct BoxRegion {
  std::vector<Interval> axes;

  BoxRegion() = default;
  explicit BoxRegion(std::vector<Interval> a, bool allow_degenerate = false);
  int dim() const { return static_cast<int>(axes.size()); }
  double volume() const;
  bool contains(std::span<const double> xi) const;
  BoxRegion reflected() const;  // -D
  double min_abs() const;       // min |xi| over the box
  double max_abs() const;       // max |xi| over the box
};

// Continuous piecewise polynomial on [breaks.front(), breaks.back()], zero outside.
// coef[i] are ascending coefficients in (x - breaks[i]) on [breaks[i], breaks[i+1]].
struct PiecewisePoly1D {
  std::vector<double> breaks;
  std::vector<std::vector<double>> coef;

  double operator()(double x) const;
  // exact integral over [a, b]
  double integral(double a, double b) const;
  // exact min / max over [a, b] (piecewise linear profiles and general degree)
  double min_on(double a, double b) const;
  double max_on(double a, double b) const;
  bool nonnegative() const;
};

// 1_[a] * 1_[b]: trapezoid with breakpoints a.lo+b.lo, ..., a.hi+b.hi.
PiecewisePoly1D interval_convolution(Interval a, Interval b);

// Product over axes of trapezoids.
struct BoxConvolution {
  std::vector<PiecewisePoly1D> axes;
  double operator()(std::span<const double> xi) const;
  // Exact min over a box (product of per-axis minima of nonnegative factors).
  double min_on(const BoxRegion& D) const;
  double max_on(const BoxRegion& D) const;
  // int_D conv(xi) dxi, exact.
  double integral_on(const BoxRegion& D) const;
};

BoxConvolution box_convolution(const BoxRegion& a, const BoxRegion& b);

// Tensor Gauss-Legendre quadrature of h(xi) * conv(xi)^2 over D, splitting at the
// convolution's breakpoints so each cell integrates a polynomial times a smooth weight.
double weighted_square_integral(const BoxConvolution& conv, const BoxRegion& D,
                                const std::function<double(std::span<const double>)>& weight, int order = 12);

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

// Monte Carlo estimate of (1_a * 1_b)(xi) with its standard error (oracle).
struct McEstimate {
  double mean = 0.0, stderr_ = 0.0;
};
McEstimate box_convolution_mc(const BoxRegion& a, const BoxRegion& b, std::span<const double> xi, long samples,
                              std::uint64_t seed);

// Interval arithmetic helpers for certified phase bounds.
Interval interval_mul(Interval a, Interval b);
Interval interval_add(Interval a, Interval b);
Interval interval_scale(Interval a, double c);
double interval_abs_max(Interval a);

}  // namespace ccnls
