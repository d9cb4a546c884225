#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "ccnls/multipliers.hpp"

namespace ccnls {

// Dispersion coefficients of
//   (i d_t + alpha Lap) u = -(div w) v
//   (i d_t + beta  Lap) v = -(div conj w) u
//   (i d_t + gamma Lap) w = grad(u . conj v)
// and the Galerkin cutoff K (kInf for the untruncated system).
struct SystemParams {
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 1.0;
  double K = kInf;
  int d = 1;

  void validate() const;
  // min(K, dealias cutoff) when dealiasing, K otherwise.
  double effective_K(const Grid& g, bool dealias = true) const;
};

enum class Regime { Iteration, ShortTime, IllPosedLine, Degenerate };
const char* regime_name(Regime r);

struct ResonanceReport {
  double kappa_tilde = 0.0;
  double kappa = 0.0;
  double mu = 0.0;
  std::optional<double> b;  // beta = gamma (b + 1)
  Regime regime = Regime::Degenerate;
  // alpha == gamma and beta + gamma == 0 together; IllPosedLine wins.
  bool flagged = false;
};

ResonanceReport resonance_quantities(const SystemParams& p);

nlohmann::json to_json(const SystemParams& p);
SystemParams params_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ResonanceReport& r);

// Spectral helpers shared by the energy machinery.
Field divergence(const Field& f);                 // scalar, spectral
Field gradient(const Field& scalar);              // d components, spectral
Field partial(const Field& f, int axis);          // d/dx_axis, spectral
Field laplacian(const Field& f);                  // spectral
Field inverse_laplacian(const Field& f);          // -1/|xi|^2, zero mode removed
// Pointwise products.  A scalar factor broadcasts over the other's components;
// equal component counts multiply componentwise.
Field multiply(const Field& f, const Field& g);
// Contraction F . G = sum_j F_j G_j (no conjugation), scalar result.
Field dot(const Field& f, const Field& g);

struct Nonlinearity {
  Field Nu, Nv, Nw;
};

// Truncated nonlinearity N_K = ( J((div Jw)(Jv)), J(conj(div Jw)(Ju)), grad J(Ju . conj Jv) ),
// all outputs spectral and supported in |xi| <= effective K.
Nonlinearity nonlinearity(const StateBundle& s, const SystemParams& p, bool dealias = true);

// [P_N, f] g = P_N(f g) - f P_N g
Field commutator_pn(const Field& f, const Field& g, DyadicScale N);
// com(P_N, f, g) = P_N(f . g) - P_N f . g - f . P_N g (contracted)
Field double_commutator(const Field& f, const Field& g, DyadicScale N);

// u^lambda(t, x) = lambda^{-1} u(lambda^{-2} t, lambda^{-1} x).  The result lives
// on the dilated grid of period lambda L; lambda must be a power of two.
StateBundle scaling_transform(const StateBundle& s, double lambda);

}  // namespace ccnls
