#pragma once

#include <stdexcept>
#include <vector>

#include "ccnls/container.hpp"
#include "ccnls/system.hpp"

namespace ccnls {

enum class Integrator { InteractionRK4, StrangSplit };
Integrator integrator_from_string(const std::string& s);
const char* integrator_name(Integrator i);

struct SolverConfig {
  double dt = 1.0 / 2048.0;
  double T = 1.0;           // T = 0 records the (truncated) data only
  Integrator integrator = Integrator::InteractionRK4;
  bool dealias = true;
  int cadence = 1;         // steps between recorded snapshots
  bool nonlinear = true;   // test hook: false gives the pure linear flow
  bool keep_snapshots = true;
  double diag_s = 1.0;     // Sobolev index of the recorded H^s norms

  void validate() const;
  long steps() const;
};

struct Diagnostics {
  double t = 0.0;
  double Q1 = 0.0, Q2 = 0.0;
  double Hs_u = 0.0, Hs_v = 0.0, Hs_w = 0.0;
  // |Q1(t) - Q1(0)| / Q1(0) and |Q2(t) - Q2(0)| / (||v0||^2 + ||w0||^2); Q2(0)
  // itself vanishes for equal-amplitude data, so it cannot be the denominator.
  double drift1 = 0.0, drift2 = 0.0;
  std::vector<double> shell_mass;     // ||P_N U||^2 for N = 1, 2, 4, ...
};

struct Trajectory {
  std::vector<StateBundle> snapshots;  // empty unless cfg.keep_snapshots
  StateBundle final_state;
  std::vector<Diagnostics> diagnostics;
  double snapshot_dt = 0.0;
};

struct InstabilityError : std::runtime_error {
  Trajectory partial;
  long step = 0;
  InstabilityError(const std::string& what, Trajectory p, long s)
      : std::runtime_error(what), partial(std::move(p)), step(s) {}
};

struct Conserved {
  double Q1 = 0.0;  // ||u||^2 + ||v||^2
  double Q2 = 0.0;  // ||v||^2 - ||w||^2
};

// e^{-i sigma |xi|^2 t}: the solution operator of (i d_t + sigma Lap) f = 0.
Field linear_flow(const Field& f, double sigma, double t);
StateBundle linear_flow(const StateBundle& s, const SystemParams& p, double t);

// Right-hand side of the truncated system without the dispersive part.
StateBundle nonlinear_rhs(const StateBundle& s, const SystemParams& p, bool dealias = true);

StateBundle step(const StateBundle& state, const SystemParams& p, const SolverConfig& cfg);

Conserved conserved_quantities(const StateBundle& s);

Trajectory simulate(const StateBundle& data, const SystemParams& p, const SolverConfig& cfg);

struct PicardResult {
  std::vector<Trajectory> iterates;  // iterate 0 is the free evolution
  std::vector<double> deltas;        // max_t ||U_{n+1} - U_n||_{H^s}
  bool diverged = false;
};

// Duhamel fixed-point iteration on n_t + 1 equispaced times in [0, T],
// composite trapezoid quadrature in time.
PicardResult picard_iterate(const StateBundle& data, const SystemParams& p, double T, int n_iter, int n_t,
                            double s = 1.0, bool dealias = true);

// Binary container of the snapshots plus the CSV diagnostics table.
void export_trajectory(const Trajectory& traj, const std::filesystem::path& stem);
std::string diagnostics_csv(const Trajectory& traj);

}  // namespace ccnls
