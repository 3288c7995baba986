#include "lcflow/config.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lcflow {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

}  // namespace

std::int64_t nominal_steps(const SimConfig& cfg) {
  return static_cast<std::int64_t>(std::llround(cfg.t_final / cfg.dt));
}

void validate(const SimConfig& cfg) {
  const GridSpec& gs = cfg.grid;
  if (gs.nx < 1) fail("nx must be >= 1");
  if (gs.ny < 1) fail("ny must be >= 1");
  if (gs.nz < 4) fail("nz must be >= 4");
  if (!(gs.lx > 0.0) || !std::isfinite(gs.lx)) fail("lx must be positive");
  if (!(gs.ly > 0.0) || !std::isfinite(gs.ly)) fail("ly must be positive");
  if (!(gs.lz > 0.0) || !std::isfinite(gs.lz)) fail("lz must be positive");
  if (!(cfg.eps >= 0.0 && cfg.eps <= 1.0)) fail("eps must be in [0,1]");
  for (double b : {cfg.slip.b11, cfg.slip.b12, cfg.slip.b22})
    if (!std::isfinite(b)) fail("b11, b12, b22 must be finite");
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) fail("dt must be positive");
  if (!(cfg.t_final >= 0.0) || !std::isfinite(cfg.t_final)) fail("t_final must be >= 0");
  const double ratio = cfg.t_final / cfg.dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio)) {
    std::ostringstream msg;
    msg << "t_final must be an integer multiple of dt (t_final / dt = " << ratio << ")";
    fail(msg.str());
  }
  if (!is_known_initial_condition(cfg.ic.name))
    fail("name must be one of rest, shear+twist, random-solenoidal, mms (got '" + cfg.ic.name + "')");
  if (!std::isfinite(cfg.ic.a)) fail("a must be finite");
  if (!std::isfinite(cfg.ic.b)) fail("b must be finite");
  if (cfg.ic.kmax < 1) fail("kmax must be >= 1");
  if (cfg.diag_every < 1) fail("diag_every must be >= 1");
  if (cfg.diag_m < 1 || cfg.diag_m > 4) fail("diag_m must be in [1,4]");
  if (!(cfg.div_tol > 0.0)) fail("div_tol must be positive");
  if (!(cfg.unit_tol > 0.0)) fail("unit_tol must be positive");
  if (!(cfg.solver_tol > 0.0)) fail("solver_tol must be positive");
  if (!(cfg.cfl_safety > 0.0)) fail("cfl_safety must be positive");
  if (!(cfg.energy_tol >= 0.0)) fail("energy_tol must be >= 0");
  if (cfg.max_iterations < 1) fail("max_iterations must be >= 1");
  if (cfg.mms_forcing && cfg.ic.name != "mms") fail("mms_forcing requires ic name = mms");
  if (cfg.sweep.jobs < 1) fail("jobs must be >= 1");
  if (cfg.sweep.ladder.empty()) fail("ladder must not be empty");
}

}  // namespace lcflow
