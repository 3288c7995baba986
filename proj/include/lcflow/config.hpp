#pragma once

#include <cstdint>
#include <vector>

#include "lcflow/fields.hpp"
#include "lcflow/grid.hpp"
#include "lcflow/operators.hpp"
#include "lcflow/pressure.hpp"

namespace lcflow {

struct SweepSettings {
  std::vector<double> ladder{0.0625, 0.03125, 0.015625, 0.0078125, 0.00390625, 0.001953125, 0.0009765625};
  bool force = false;
  int jobs = 1;

  friend bool operator==(const SweepSettings&, const SweepSettings&) = default;
};

/// Every physical and numerical parameter of one run.
struct SimConfig {
  GridSpec grid;
  double eps = 0.0;
  SlipMatrixB slip;
  double dt = 0.0;
  double t_final = 0.0;
  InitialConditionSpec ic;

  int diag_every = 10;
  int diag_m = 2;             // conormal order of nm_value
  bool time_derivs = false;   // add u_t, d_t contributions to nm_value

  double div_tol = 1e-10;
  double unit_tol = 1e-12;
  double solver_tol = 1e-10;
  double cfl_safety = 0.4;
  /// Halve dt when |energy_residual| exceeds this; 0 disables the trigger.
  double energy_tol = 0.0;
  PoissonMethod poisson = PoissonMethod::Spectral;
  int max_iterations = 5000;
  /// Add the manufactured-solution forcing (test mode).
  bool mms_forcing = false;

  SweepSettings sweep;
};

inline bool operator==(const SimConfig& a, const SimConfig& b) {
  return a.grid.nx == b.grid.nx && a.grid.ny == b.grid.ny && a.grid.nz == b.grid.nz && a.grid.lx == b.grid.lx &&
         a.grid.ly == b.grid.ly && a.grid.lz == b.grid.lz && a.eps == b.eps && a.slip == b.slip && a.dt == b.dt &&
         a.t_final == b.t_final && a.ic == b.ic && a.diag_every == b.diag_every && a.diag_m == b.diag_m &&
         a.time_derivs == b.time_derivs && a.div_tol == b.div_tol && a.unit_tol == b.unit_tol &&
         a.solver_tol == b.solver_tol && a.cfl_safety == b.cfl_safety && a.energy_tol == b.energy_tol &&
         a.poisson == b.poisson && a.max_iterations == b.max_iterations && a.mms_forcing == b.mms_forcing &&
         a.sweep == b.sweep;
}

/// Range and consistency checks shared by the parser and programmatic callers.
/// Throws std::invalid_argument with a readable message.
void validate(const SimConfig& cfg);

/// Number of nominal steps, round(t_final / dt).
std::int64_t nominal_steps(const SimConfig& cfg);

}  // namespace lcflow
