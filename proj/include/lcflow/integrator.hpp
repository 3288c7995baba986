#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "lcflow/config.hpp"
#include "lcflow/diagnostics.hpp"
#include "lcflow/manufactured.hpp"
#include "lcflow/pressure.hpp"

namespace lcflow {

/// dt had to be reduced below the floor dt / 64.
class CflError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A run stopped early; carries the records emitted before the failure.
class RunError : public std::runtime_error {
 public:
  RunError(const std::string& what, std::vector<DiagnosticsRecord> partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const std::vector<DiagnosticsRecord>& partial() const noexcept { return partial_; }

 private:
  std::vector<DiagnosticsRecord> partial_;
};

struct StepInfo {
  int substeps = 1;
  double dt_sub = 0.0;
  State before_last;  // state preceding the final substep
};

/// Fractional-step integrator for one configuration.
///
/// One substep of size dt:
///   1. (I - dt L_N) d* = d + dt (-advect(u, d) + G d + f_d),  d' = d*/|d*|
///   2. u* = u + dt (-advect(u, u) + eps L_h u - faces(grad d' . Lap d') + f_u),  u*.n = 0 on walls
///   3. (u', p') = project(u*, dt)
/// eps = 0 drops the viscous term. A nominal step of cfg.dt is split into 2^m equal
/// substeps when dt exceeds cfl_safety min(h) / max(1, |u|_inf) or, if enabled,
/// when |energy_residual| exceeds cfg.energy_tol.
class Integrator {
 public:
  Integrator(const SimConfig& cfg, const ChannelGrid& g);

  const SimConfig& config() const noexcept { return cfg_; }
  const ChannelGrid& grid() const noexcept { return grid_; }
  const PoissonSolver& solver() const noexcept { return *solver_; }

  State substep(const State& s, double dt) const;
  State step(const State& s, StepInfo* info = nullptr) const;

  /// Largest dt admitted by the CFL rule for state s.
  double cfl_limit(const State& s) const;

 private:
  SimConfig cfg_;
  ChannelGrid grid_;
  std::unique_ptr<PoissonSolver> solver_;
  std::unique_ptr<mms::Forcing> forcing_;
};

/// Convenience single step (builds an Integrator).
State step(const State& s, const SimConfig& cfg, const ChannelGrid& g);

struct RunResult {
  State final;
  std::vector<DiagnosticsRecord> trace;
};

/// Called at every recorded step with the state and its record.
using RunObserver = std::function<void(const State&, const DiagnosticsRecord&)>;

/// Steps from the configured initial condition to t_final, recording at step 0,
/// every diag_every steps and at the last step. Throws RunError on failure.
RunResult run(const SimConfig& cfg, const RunObserver& observer = {});
RunResult run_from(const State& initial, const Integrator& integrator, const RunObserver& observer = {});

}  // namespace lcflow
