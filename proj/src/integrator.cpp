#include "lcflow/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lcflow/parallel.hpp"

namespace lcflow {

namespace {

void axpy(FaceField& y, double a, const FaceField& x) {
  for (int c = 0; c < 3; ++c) {
    auto o = y[c].storage();
    auto v = x[c].storage();
    for (std::size_t n = 0; n < o.size(); ++n) o[n] += a * v[n];
  }
}

void zero_wall_normals(FaceField& u, const ChannelGrid& g) {
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      u[2](i, j, 0) = 0.0;
      u[2](i, j, g.nz) = 0.0;
    }
}

}  // namespace

Integrator::Integrator(const SimConfig& cfg, const ChannelGrid& g)
    : cfg_(cfg), grid_(g), solver_(std::make_unique<PoissonSolver>(g, cfg.poisson, cfg.max_iterations)) {
  validate(cfg_);
  if (cfg_.mms_forcing) {
    if (!(cfg_.slip == mms::required_slip(g)))
      throw std::invalid_argument("mms forcing requires b11 = b12 = 0 and b22 = tan(1/2)/lz");
    forcing_ = std::make_unique<mms::Forcing>(g, cfg_.eps);
  }
}

double Integrator::cfl_limit(const State& s) const {
  return cfg_.cfl_safety * grid_.min_spacing() / std::max(1.0, max_abs(s.u));
}

State Integrator::substep(const State& s, double dt) const {
  const ChannelGrid& g = grid_;
  const double tol = cfg_.solver_tol;
  State out;
  out.t = s.t + dt;
  out.step = s.step;

  // Director: implicit Neumann diffusion, explicit transport and |grad d|^2 d.
  const VectorField adv_d = advect(s.u, s.d, g);
  const VectorField src = director_source(s.d, g);
  VectorField fd;
  if (forcing_) fd = forcing_->director(s.t);
  VectorField dstar = make_vector(g);
  const double idt = 1.0 / dt;
  for (int c = 0; c < 3; ++c) {
    ScalarField rhs = make_scalar(g);
    par::for_each_cell(g.nx, g.ny, g.nz, [&](int i, int j, int k) {
      double v = -adv_d[c](i, j, k) + src[c](i, j, k);
      if (forcing_) v += fd[c](i, j, k);
      rhs(i, j, k) = s.d[c](i, j, k) * idt + v;
    });
    dstar[c] = solver_->solve(rhs, idt, tol);
  }
  out.d = renormalize_director(dstar);

  // Velocity predictor with the updated director in the elastic stress.
  FaceField ustar = s.u;
  axpy(ustar, -dt, advect(s.u, s.u, g));
  if (cfg_.eps != 0.0) axpy(ustar, dt * cfg_.eps, laplacian(s.u, g, cfg_.slip));
  axpy(ustar, -dt, centers_to_faces(elastic_stress(out.d, g), g));
  if (forcing_) axpy(ustar, dt, forcing_->velocity(s.t));
  zero_wall_normals(ustar, g);

  Projection pr = project(ustar, dt, *solver_, tol);
  out.u = std::move(pr.u);
  out.p = std::move(pr.p_update);
  return out;
}

State Integrator::step(const State& s, StepInfo* info) const {
  const double dt = cfg_.dt;
  const double floor = dt / 64.0;
  double dt_sub = dt;
  int n = 1;
  const double limit = cfl_limit(s);
  while (dt_sub > limit) {
    dt_sub *= 0.5;
    n *= 2;
    if (dt_sub < floor) {
      std::ostringstream msg;
      msg << "CFL: required dt below floor " << floor << " (limit " << limit << ") at t = " << s.t;
      throw CflError(msg.str());
    }
  }
  for (;;) {
    State cur = s, before = s;
    bool retry = false;
    for (int m = 0; m < n; ++m) {
      before = cur;
      cur = substep(cur, dt_sub);
      if (cfg_.energy_tol > 0.0 &&
          std::abs(energy_balance_residual(before, cur, cfg_, grid_)) > cfg_.energy_tol) {
        if (dt_sub * 0.5 < floor) {
          std::ostringstream msg;
          msg << "energy residual above " << cfg_.energy_tol << " with dt at floor " << floor << " at t = " << s.t;
          throw CflError(msg.str());
        }
        retry = true;
        break;
      }
    }
    if (retry) {
      dt_sub *= 0.5;
      n *= 2;
      continue;
    }
    cur.t = s.t + dt;
    cur.step = s.step + 1;
    if (info) {
      info->substeps = n;
      info->dt_sub = dt_sub;
      info->before_last = std::move(before);
    }
    return cur;
  }
}

State step(const State& s, const SimConfig& cfg, const ChannelGrid& g) { return Integrator(cfg, g).step(s); }

RunResult run(const SimConfig& cfg, const RunObserver& observer) {
  validate(cfg);
  const ChannelGrid g = make_grid(cfg.grid);
  const Integrator integ(cfg, g);
  return run_from(init_state(g, cfg.ic), integ, observer);
}

RunResult run_from(const State& initial, const Integrator& integ, const RunObserver& observer) {
  const SimConfig& cfg = integ.config();
  const ChannelGrid& g = integ.grid();
  const std::int64_t steps = nominal_steps(cfg);
  RunResult res{initial, {}};
  auto emit = [&](const State& s, const State* prev, double dt) {
    res.trace.push_back(make_record(s, prev, dt, cfg, g, integ.solver()));
    if (observer) observer(s, res.trace.back());
  };
  try {
    emit(res.final, nullptr, 0.0);
    for (std::int64_t n = 1; n <= steps; ++n) {
      StepInfo info;
      State next = integ.step(res.final, &info);
      res.final = std::move(next);
      if (n % cfg.diag_every == 0 || n == steps) {
        const DiagnosticsRecord& last = (emit(res.final, &info.before_last, info.dt_sub), res.trace.back());
        if (!std::isfinite(last.kinetic) || !std::isfinite(last.elastic))
          throw std::runtime_error("non-finite energy");
      } else if (!res.final.d[0].all_finite() || !res.final.u[0].all_finite()) {
        throw std::runtime_error("non-finite state");
      }
    }
  } catch (const std::exception& e) {
    std::ostringstream msg;
    msg << "run failed at t = " << res.final.t << " (step " << res.final.step << "): " << e.what();
    throw RunError(msg.str(), std::move(res.trace));
  }
  return res;
}

}  // namespace lcflow
