#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ccnls {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

inline constexpr double kPi = 3.14159265358979323846;

// Bad user-facing parameter (CLI exit code 2).
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Periodic grid on [-L/2, L/2)^d, M points per axis.  Spectral arrays use the
// FFT ordering: index i on an axis carries wavenumber i for i < M/2 and i - M
// otherwise, i.e. xi = 2 pi k / L with k in {-M/2, ..., M/2-1}.
struct Grid {
  int d = 1;
  double L = 64.0 * kPi;
  int M = 4096;

  Grid() = default;
  Grid(int d_, double L_, int M_);

  static Grid defaults(int d);

  std::size_t size() const;
  int wavenumber(int idx) const { return idx < M / 2 ? idx : idx - M; }
  double dxi() const { return 2.0 * kPi / L; }
  double dx() const { return L / M; }
  double cell_volume() const;
  double xi_max() const { return M * kPi / L; }
  // Largest |xi| for which quadratic products of truncated fields stay alias-free.
  double dealias_cutoff() const { return 2.0 * M * kPi / (3.0 * L); }
  double xi_axis(std::size_t flat, int axis) const;
  double xi_abs(std::size_t flat) const;
  double x_axis(std::size_t flat, int axis) const;
  // |xi|^2 for every spectral index.
  std::vector<double> xi_squared() const;

  bool operator==(const Grid& o) const { return d == o.d && L == o.L && M == o.M; }
  bool operator!=(const Grid& o) const { return !(*this == o); }
};

void require_same_grid(const Grid& a, const Grid& b, const char* what);

enum class Rep { Physical, Spectral };

// C^n-valued function on the grid.  n == grid.d for the unknowns u, v, w;
// scalar (n == 1) fields are allowed for intermediate quantities such as div w.
struct Field {
  Grid grid;
  Rep rep = Rep::Physical;
  std::vector<cvec> comp;

  Field() = default;
  explicit Field(const Grid& g, int ncomp = -1, Rep r = Rep::Physical);

  int ncomp() const { return static_cast<int>(comp.size()); }
  Field& to_spectral();
  Field& to_physical();
  Field spectral() const;
  Field physical() const;

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(cplx a);
  // this += a * o
  Field& axpy(cplx a, const Field& o);
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(cplx a, Field f);
// Pointwise complex conjugate (returned in physical representation).
Field conj(const Field& f);
// Largest |value| over all components; physical representation.
double sup_norm(const Field& f);
bool all_finite(const Field& f);

struct StateBundle {
  Field u, v, w;
  double time = 0.0;

  StateBundle() = default;
  StateBundle(Field u_, Field v_, Field w_, double t = 0.0);
  static StateBundle zeros(const Grid& g, Rep r = Rep::Spectral);

  const Grid& grid() const { return u.grid; }
  void check() const;
  StateBundle spectral() const;
  StateBundle physical() const;
  StateBundle& to_spectral();
  StateBundle& to_physical();
  StateBundle& operator+=(const StateBundle& o);
  StateBundle& operator-=(const StateBundle& o);
  StateBundle& axpy(cplx a, const StateBundle& o);
  StateBundle& operator*=(cplx a);
};

StateBundle operator-(StateBundle a, const StateBundle& b);

struct WindowDescriptor {
  double center = 0.0;
  double width = 1.0;
};

// Trajectory sampled on a uniform time lattice t0 + q dt, q < Q.  values[c]
// holds component c in row-major (t, x1, ..., xd) order, physical space.
struct SpaceTimeSample {
  Grid grid;
  double t0 = 0.0;
  double dt = 1.0;
  int Q = 0;
  std::vector<cvec> values;
  std::optional<WindowDescriptor> window;

  SpaceTimeSample() = default;
  SpaceTimeSample(const Grid& g, double t0_, double dt_, int Q_, int ncomp = 1);

  int ncomp() const { return static_cast<int>(values.size()); }
  std::size_t spatial_size() const { return grid.size(); }
  double time(int q) const { return t0 + q * dt; }
  cplx& at(int c, int q, std::size_t x) { return values[c][q * spatial_size() + x]; }
  const cplx& at(int c, int q, std::size_t x) const { return values[c][q * spatial_size() + x]; }
  void check() const;
};

// Dyadic frequency scale N = 2^k, k >= 0.
struct DyadicScale {
  std::int64_t N = 1;
  DyadicScale() = default;
  DyadicScale(std::int64_t n);  // NOLINT: implicit from integer is convenient
  // Shell I_N: |xi| <= 2 for N = 1, N/2 <= |xi| <= 2N otherwise.
  bool in_shell(double xi_abs) const;
  double lo() const { return N == 1 ? 0.0 : 0.5 * static_cast<double>(N); }
  double hi() const { return 2.0 * static_cast<double>(N); }
  operator std::int64_t() const { return N; }  // NOLINT
};

bool is_power_of_two(std::int64_t n);

// Dyadic scales whose shells meet the lattice: N = 1, 2, 4, ... while N/2 <= max |xi|.
std::vector<std::int64_t> dyadic_scales(const Grid& g);

}  // namespace ccnls
