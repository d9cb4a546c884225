#include "ccnls/grid.hpp"

#include <cmath>

#include "ccnls/fft.hpp"

namespace ccnls {

bool is_power_of_two(std::int64_t n) { return n > 0 && (n & (n - 1)) == 0; }

Grid::Grid(int d_, double L_, int M_) : d(d_), L(L_), M(M_) {
  if (d != 1 && d != 2) throw ParameterError("grid: d must be 1 or 2");
  if (!(L > 0.0) || !std::isfinite(L)) throw ParameterError("grid: L must be positive");
  if (M < 2 || !is_power_of_two(M)) throw ParameterError("grid: M must be a power of two >= 2");
}

Grid Grid::defaults(int d) {
  if (d == 1) return Grid(1, 64.0 * kPi, 4096);
  if (d == 2) return Grid(2, 16.0 * kPi, 256);
  throw ParameterError("grid: d must be 1 or 2");
}

std::size_t Grid::size() const {
  std::size_t n = 1;
  for (int a = 0; a < d; ++a) n *= static_cast<std::size_t>(M);
  return n;
}

double Grid::cell_volume() const { return std::pow(dx(), d); }

double Grid::xi_axis(std::size_t flat, int axis) const {
  std::size_t idx = d == 1 ? flat : (axis == 0 ? flat / M : flat % M);
  return dxi() * wavenumber(static_cast<int>(idx));
}

double Grid::xi_abs(std::size_t flat) const {
  if (d == 1) return std::abs(xi_axis(flat, 0));
  return std::hypot(xi_axis(flat, 0), xi_axis(flat, 1));
}

double Grid::x_axis(std::size_t flat, int axis) const {
  std::size_t idx = d == 1 ? flat : (axis == 0 ? flat / M : flat % M);
  return -0.5 * L + dx() * static_cast<double>(idx);
}

std::vector<double> Grid::xi_squared() const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    double s = 0.0;
    for (int a = 0; a < d; ++a) {
      double x = xi_axis(i, a);
      s += x * x;
    }
    out[i] = s;
  }
  return out;
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (a != b) throw ParameterError(std::string(what) + ": grid mismatch");
}

Field::Field(const Grid& g, int ncomp, Rep r) : grid(g), rep(r) {
  int n = ncomp < 0 ? g.d : ncomp;
  comp.assign(n, cvec(g.size(), cplx(0.0, 0.0)));
}

Field& Field::to_spectral() {
  if (rep == Rep::Spectral) return *this;
  for (auto& c : comp) fft_forward(grid, c);
  rep = Rep::Spectral;
  return *this;
}

Field& Field::to_physical() {
  if (rep == Rep::Physical) return *this;
  for (auto& c : comp) fft_inverse(grid, c);
  rep = Rep::Physical;
  return *this;
}

Field Field::spectral() const {
  Field f = *this;
  return std::move(f.to_spectral());
}

Field Field::physical() const {
  Field f = *this;
  return std::move(f.to_physical());
}

namespace {
void match(Field& a, const Field& b) {
  require_same_grid(a.grid, b.grid, "field arithmetic");
  if (a.ncomp() != b.ncomp()) throw ParameterError("field arithmetic: component count mismatch");
  if (b.rep == Rep::Spectral)
    a.to_spectral();
  else
    a.to_physical();
}
}  // namespace

Field& Field::operator+=(const Field& o) { return axpy(1.0, o); }
Field& Field::operator-=(const Field& o) { return axpy(-1.0, o); }

Field& Field::operator*=(cplx a) {
  for (auto& c : comp)
    for (auto& z : c) z *= a;
  return *this;
}

Field& Field::axpy(cplx a, const Field& o) {
  match(*this, o);
  for (int c = 0; c < ncomp(); ++c) {
    auto& x = comp[c];
    const auto& y = o.comp[c];
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += a * y[i];
  }
  return *this;
}

Field operator+(Field a, const Field& b) { return std::move(a += b); }
Field operator-(Field a, const Field& b) { return std::move(a -= b); }
Field operator*(cplx a, Field f) { return std::move(f *= a); }

Field conj(const Field& f) {
  Field out = f.physical();
  for (auto& c : out.comp)
    for (auto& z : c) z = std::conj(z);
  return out;
}

double sup_norm(const Field& f) {
  Field p = f.physical();
  double m = 0.0;
  for (const auto& c : p.comp)
    for (const auto& z : c) m = std::max(m, std::abs(z));
  return m;
}

bool all_finite(const Field& f) {
  for (const auto& c : f.comp)
    for (const auto& z : c)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

StateBundle::StateBundle(Field u_, Field v_, Field w_, double t)
    : u(std::move(u_)), v(std::move(v_)), w(std::move(w_)), time(t) {
  check();
}

StateBundle StateBundle::zeros(const Grid& g, Rep r) {
  return StateBundle(Field(g, -1, r), Field(g, -1, r), Field(g, -1, r), 0.0);
}

void StateBundle::check() const {
  require_same_grid(u.grid, v.grid, "state bundle");
  require_same_grid(u.grid, w.grid, "state bundle");
  int d = u.grid.d;
  if (u.ncomp() != d || v.ncomp() != d || w.ncomp() != d)
    throw ParameterError("state bundle: fields must have grid.d components");
}

StateBundle StateBundle::spectral() const {
  StateBundle s = *this;
  return std::move(s.to_spectral());
}

StateBundle StateBundle::physical() const {
  StateBundle s = *this;
  return std::move(s.to_physical());
}

StateBundle& StateBundle::to_spectral() {
  u.to_spectral();
  v.to_spectral();
  w.to_spectral();
  return *this;
}

StateBundle& StateBundle::to_physical() {
  u.to_physical();
  v.to_physical();
  w.to_physical();
  return *this;
}

StateBundle& StateBundle::operator+=(const StateBundle& o) { return axpy(1.0, o); }
StateBundle& StateBundle::operator-=(const StateBundle& o) { return axpy(-1.0, o); }

StateBundle& StateBundle::axpy(cplx a, const StateBundle& o) {
  u.axpy(a, o.u);
  v.axpy(a, o.v);
  w.axpy(a, o.w);
  return *this;
}

StateBundle& StateBundle::operator*=(cplx a) {
  u *= a;
  v *= a;
  w *= a;
  return *this;
}

StateBundle operator-(StateBundle a, const StateBundle& b) { return std::move(a -= b); }

SpaceTimeSample::SpaceTimeSample(const Grid& g, double t0_, double dt_, int Q_, int ncomp)
    : grid(g), t0(t0_), dt(dt_), Q(Q_) {
  if (ncomp < 1) throw ParameterError("space-time sample: need at least one component");
  values.assign(ncomp, cvec(static_cast<std::size_t>(Q) * g.size(), cplx(0.0, 0.0)));
  check();
}

void SpaceTimeSample::check() const {
  if (Q < 2) throw ParameterError("space-time sample: need Q >= 2 time samples");
  if (!(dt > 0.0)) throw ParameterError("space-time sample: time step must be positive");
  for (const auto& v : values)
    if (v.size() != static_cast<std::size_t>(Q) * grid.size())
      throw ParameterError("space-time sample: value array has wrong size");
}

DyadicScale::DyadicScale(std::int64_t n) : N(n) {
  if (!is_power_of_two(n)) throw ParameterError("dyadic scale must be a power of two >= 1");
}

bool DyadicScale::in_shell(double xi_abs) const {
  if (N == 1) return xi_abs <= 2.0;
  return xi_abs >= lo() && xi_abs <= hi();
}

std::vector<std::int64_t> dyadic_scales(const Grid& g) {
  double top = g.xi_max() * (g.d == 2 ? std::sqrt(2.0) : 1.0);
  std::vector<std::int64_t> out;
  for (std::int64_t N = 1; 0.5 * static_cast<double>(N) <= top; N *= 2) out.push_back(N);
  return out;
}

}  // namespace ccnls
