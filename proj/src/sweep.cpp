#include "lcflow/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <omp.h>

#include "lcflow/integrator.hpp"
#include "lcflow/io.hpp"
#include "lcflow/parallel.hpp"

namespace lcflow {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

VectorField diff(const VectorField& a, const VectorField& b) {
  VectorField out = a;
  for (int c = 0; c < 3; ++c) {
    auto o = out[c].storage();
    auto y = b[c].storage();
    for (std::size_t n = 0; n < o.size(); ++n) o[n] -= y[n];
  }
  return out;
}

FaceField diff(const FaceField& a, const FaceField& b) {
  FaceField out = a;
  for (int c = 0; c < 3; ++c) {
    auto o = out[c].storage();
    auto y = b[c].storage();
    for (std::size_t n = 0; n < o.size(); ++n) o[n] -= y[n];
  }
  return out;
}

double l2sq(const VectorField& f, const ChannelGrid& g) {
  return g.cell_volume() * par::slab_sum(g.nx, g.ny, g.nz, [&](int i, int j, int k) {
           double s = 0.0;
           for (int c = 0; c < 3; ++c) s += f[c](i, j, k) * f[c](i, j, k);
           return s;
         });
}

std::array<ScalarField, 9> neumann_gradient(const VectorField& d, const ChannelGrid& g) {
  return cell_gradient(fill_ghosts_neumann(d, g), g);
}

// a . grad of a vector field: out_i = sum_j a_j d_j f_i, grad[3*j + i] = d_j f_i.
VectorField directional(const VectorField& a, const std::array<ScalarField, 9>& grad, const ChannelGrid& g) {
  VectorField out = make_vector(g);
  par::for_each_cell(g.nx, g.ny, g.nz, [&](int i, int j, int k) {
    for (int c = 0; c < 3; ++c) {
      double s = 0.0;
      for (int q = 0; q < 3; ++q) s += a[q](i, j, k) * grad[3 * q + c](i, j, k);
      out[c](i, j, k) = s;
    }
  });
  return out;
}

// (grad f . L)_i = sum_j d_i f_j L_j
VectorField stress_like(const std::array<ScalarField, 9>& grad, const VectorField& lap, const ChannelGrid& g) {
  VectorField out = make_vector(g);
  par::for_each_cell(g.nx, g.ny, g.nz, [&](int i, int j, int k) {
    for (int a = 0; a < 3; ++a) {
      double s = 0.0;
      for (int c = 0; c < 3; ++c) s += grad[3 * a + c](i, j, k) * lap[c](i, j, k);
      out[a](i, j, k) = s;
    }
  });
  return out;
}

bool is_finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

ErrorNorms error_norms(const State& s, const State& ref, const ChannelGrid& g) {
  ErrorNorms e;
  const FaceField du = diff(s.u, ref.u);
  const double dv = g.cell_volume();
  for (int c = 0; c < 3; ++c) {
    const Array3& a = du[c];
    e.u_l2sq += dv * par::slab_sum(g.nx, g.ny, c == 2 ? g.nz + 1 : g.nz,
                                   [&](int i, int j, int k) { return a(i, j, k) * a(i, j, k); });
  }
  const VectorField duc = faces_to_centers(du, g);
  e.u_linf = std::sqrt(par::slab_max(g.nx, g.ny, g.nz, [&](int i, int j, int k) {
    double s = 0.0;
    for (int c = 0; c < 3; ++c) s += duc[c](i, j, k) * duc[c](i, j, k);
    return s;
  }));

  const VectorField phi = diff(s.d, ref.d);
  const auto gp = neumann_gradient(phi, g);
  double grad_sq = 0.0;
  for (const auto& c : gp)
    grad_sq += dv * par::slab_sum(g.nx, g.ny, g.nz, [&](int i, int j, int k) { return c(i, j, k) * c(i, j, k); });
  e.d_h1sq = l2sq(phi, g) + grad_sq;
  const double phi_max = std::sqrt(par::slab_max(g.nx, g.ny, g.nz, [&](int i, int j, int k) {
    double s = 0.0;
    for (int c = 0; c < 3; ++c) s += phi[c](i, j, k) * phi[c](i, j, k);
    return s;
  }));
  const double grad_max = std::sqrt(par::slab_max(g.nx, g.ny, g.nz, [&](int i, int j, int k) {
    double s = 0.0;
    for (const auto& c : gp) s += c(i, j, k) * c(i, j, k);
    return s;
  }));
  e.d_w1inf = phi_max + grad_max;
  return e;
}

ErrorNorms state_norms(const State& s, const ChannelGrid& g) {
  State zero = s;
  for (int c = 0; c < 3; ++c) {
    zero.u[c].fill(0.0);
    zero.d[c].fill(0.0);
  }
  return error_norms(s, zero, g);
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) throw std::invalid_argument("fit_rate: insufficient-points (need at least 2)");
  for (const auto& [eps, err] : points)
    if (!is_finite_positive(eps) || !is_finite_positive(err))
      throw std::invalid_argument("fit_rate: eps and err must be positive and finite");
  const double n = static_cast<double>(points.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& [eps, err] : points) {
    sx += std::log(eps);
    sy += std::log(err);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [eps, err] : points) {
    const double dx = std::log(eps) - mx, dy = std::log(err) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_rate: all eps values are equal");
  RateFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

RemainderNorms remainder_norms(const State& se, const State& s0, double eps, const SlipMatrixB& B,
                               const ChannelGrid& g) {
  const VectorField ue = centered_velocity_with_ghosts(fill_ghosts_navier_slip(se.u, B, g), g);
  const VectorField u0 = centered_velocity_with_ghosts(fill_ghosts_navier_slip(s0.u, B, g), g);
  const VectorField v = diff(ue, u0);
  const VectorField phi = diff(se.d, s0.d);

  const auto grad_ue = cell_gradient(ue, g);
  const auto grad_de = neumann_gradient(se.d, g);
  const auto grad_d0 = neumann_gradient(s0.d, g);
  const auto grad_phi = neumann_gradient(phi, g);
  const VectorField lap_phi = laplacian(phi, g);
  const VectorField lap_d0 = laplacian(s0.d, g);
  const VectorField lap_u0 = faces_to_centers(laplacian(s0.u, g, B), g);

  const VectorField v_grad_ue = directional(v, grad_ue, g);
  const VectorField t3 = stress_like(grad_de, lap_phi, g);
  const VectorField t4 = stress_like(grad_phi, lap_d0, g);
  const VectorField v_grad_de = directional(v, grad_de, g);

  VectorField r1 = make_vector(g), r2 = make_vector(g);
  par::for_each_cell(g.nx, g.ny, g.nz, [&](int i, int j, int k) {
    double contract = 0.0, gd0 = 0.0;
    for (int q = 0; q < 9; ++q) {
      contract += grad_phi[q](i, j, k) * (grad_de[q](i, j, k) + grad_d0[q](i, j, k));
      gd0 += grad_d0[q](i, j, k) * grad_d0[q](i, j, k);
    }
    for (int c = 0; c < 3; ++c) {
      r1[c](i, j, k) = eps * lap_u0[c](i, j, k) - v_grad_ue[c](i, j, k) - t3[c](i, j, k) - t4[c](i, j, k);
      r2[c](i, j, k) = -v_grad_de[c](i, j, k) + contract * se.d[c](i, j, k) + gd0 * phi[c](i, j, k);
    }
  });
  return {std::sqrt(l2sq(r1, g)), std::sqrt(l2sq(r2, g))};
}

Trajectory simulate_trajectory(const SimConfig& cfg, const Trajectory*) {
  Trajectory t;
  run(cfg, [&](const State& s, const DiagnosticsRecord& r) {
    t.snapshots.push_back(s);
    t.trace.push_back(r);
  });
  return t;
}

double resolved_eps_threshold(const ChannelGrid& g) { return (4.0 * g.hz) * (4.0 * g.hz); }

void validate_ladder(const std::vector<double>& ladder, const ChannelGrid& g, bool force) {
  if (ladder.empty()) throw std::invalid_argument("eps ladder is empty");
  for (std::size_t n = 0; n < ladder.size(); ++n) {
    const double e = ladder[n];
    if (!(e > 0.0 && e <= 1.0)) {
      std::ostringstream msg;
      msg << "eps ladder entry " << e << " outside (0, 1]";
      throw std::invalid_argument(msg.str());
    }
    if (n > 0 && !(e < ladder[n - 1])) throw std::invalid_argument("eps ladder must be strictly decreasing");
  }
  const double thr = resolved_eps_threshold(g);
  if (!force && ladder.back() < thr) {
    std::ostringstream msg;
    msg << "resolution guard: eps = " << ladder.back() << " is below (4 hz)^2 = " << thr
        << "; refine nz or pass --force";
    throw std::invalid_argument(msg.str());
  }
}

void analyse(SweepResult& r) {
  r.flags.clear();
  std::vector<std::pair<double, double>> l2, linf;
  for (const MemberResult& m : r.members) {
    l2.emplace_back(m.eps, m.final.u_l2sq + m.final.d_h1sq);
    linf.emplace_back(m.eps, m.final.u_linf + m.final.d_w1inf);
  }
  auto fit = [](const std::vector<std::pair<double, double>>& pts, RateFit& out, std::string& status) {
    try {
      out = fit_rate(pts);
      status = "ok";
    } catch (const std::invalid_argument& e) {
      out = {kNaN, kNaN, kNaN};
      status = pts.size() < 2 ? "insufficient-points" : "invalid-data";
    }
  };
  fit(l2, r.fit_l2, r.status_l2);
  fit(linf, r.fit_linf, r.status_linf);

  // Members are ordered by decreasing eps; errors must not grow along the ladder.
  for (std::size_t n = 1; n < r.members.size(); ++n) {
    const MemberResult &a = r.members[n - 1], &b = r.members[n];
    const std::size_t nt = std::min(a.errors.size(), b.errors.size());
    for (std::size_t t = 0; t < nt; ++t) {
      auto check = [&](double ea, double eb, double scale, const char* name) {
        const double floor = kMonotonicityFloor * kMonotonicityFloor * scale;
        if (eb > ea + floor) {
          std::ostringstream msg;
          msg << "monotonicity violated: " << name << " at t = " << b.times[t] << " grows from " << ea
              << " (eps " << a.eps << ") to " << eb << " (eps " << b.eps << ")";
          r.flags.push_back(msg.str());
        }
      };
      check(a.errors[t].u_l2sq, b.errors[t].u_l2sq, r.reference_scale.u_l2sq, "err_u_l2sq");
      check(a.errors[t].d_h1sq, b.errors[t].d_h1sq, r.reference_scale.d_h1sq, "err_d_h1sq");
    }
  }
  if (r.status_l2 == "ok" && (r.fit_l2.slope < 1.2 || r.fit_l2.slope > 1.8 || r.fit_l2.r_squared < 0.98)) {
    std::ostringstream msg;
    msg << "under-resolution suspected: fitted_slope_l2 = " << r.fit_l2.slope << " (r^2 = " << r.fit_l2.r_squared
        << ") outside [1.2, 1.8] / r^2 >= 0.98";
    r.flags.push_back(msg.str());
  }
}

SweepResult run_sweep(const SimConfig& cfg, const std::vector<double>& ladder, const SweepOptions& opts) {
  validate(cfg);
  const ChannelGrid g = make_grid(cfg.grid);
  validate_ladder(ladder, g, opts.force);
  if (opts.jobs < 1) throw std::invalid_argument("jobs must be >= 1");

  SweepResult result;
  result.eps_ladder = ladder;
  result.config_hash = config_hash(cfg);
  if (opts.force && ladder.back() < resolved_eps_threshold(g)) {
    std::ostringstream msg;
    msg << "resolution guard overridden: smallest eps " << ladder.back() << " < (4 hz)^2 = "
        << resolved_eps_threshold(g);
    result.flags.push_back(msg.str());
  }
  const std::vector<std::string> guard_flags = result.flags;

  const MemberRunner member = opts.member_runner ? opts.member_runner : MemberRunner(simulate_trajectory);
  const MemberRunner refrun = opts.reference_runner ? opts.reference_runner : MemberRunner(simulate_trajectory);

  using clock = std::chrono::steady_clock;
  SimConfig rcfg = cfg;
  rcfg.eps = 0.0;
  const auto t0 = clock::now();
  const Trajectory ref = refrun(rcfg, nullptr);
  result.reference_wall_time_s = std::chrono::duration<double>(clock::now() - t0).count();
  if (ref.snapshots.empty()) throw std::runtime_error("reference run produced no snapshots");
  for (const State& s : ref.snapshots) {
    const ErrorNorms n = state_norms(s, g);
    ErrorNorms& m = result.reference_scale;
    m = {std::max(m.u_l2sq, n.u_l2sq), std::max(m.d_h1sq, n.d_h1sq), std::max(m.u_linf, n.u_linf),
         std::max(m.d_w1inf, n.d_w1inf)};
  }

  const std::size_t nm = ladder.size();
  std::vector<MemberResult> members(nm);
  std::vector<std::string> errors(nm);
  std::atomic<std::size_t> next{0};
  const int inner = std::max(1, omp_get_max_threads() / opts.jobs);

  auto worker = [&]() {
    omp_set_num_threads(inner);
    for (std::size_t idx = next++; idx < nm; idx = next++) {
      try {
        SimConfig mcfg = cfg;
        mcfg.eps = ladder[idx];
        const auto start = clock::now();
        const Trajectory tr = member(mcfg, &ref);
        MemberResult m;
        m.eps = ladder[idx];
        if (tr.snapshots.size() != ref.snapshots.size())
          throw std::runtime_error("member trajectory length differs from the reference");
        for (std::size_t t = 0; t < tr.snapshots.size(); ++t) {
          m.times.push_back(tr.snapshots[t].t);
          const ErrorNorms e = error_norms(tr.snapshots[t], ref.snapshots[t], g);
          m.errors.push_back(e);
          m.sup.u_l2sq = std::max(m.sup.u_l2sq, e.u_l2sq);
          m.sup.d_h1sq = std::max(m.sup.d_h1sq, e.d_h1sq);
          m.sup.u_linf = std::max(m.sup.u_linf, e.u_linf);
          m.sup.d_w1inf = std::max(m.sup.d_w1inf, e.d_w1inf);
        }
        m.final = m.errors.back();
        m.nm_max = tr.trace.empty() ? kNaN : 0.0;
        m.linf_grad_u_max = tr.trace.empty() ? kNaN : 0.0;
        for (const DiagnosticsRecord& r : tr.trace) {
          m.nm_max = std::max(m.nm_max, r.nm_value);
          m.linf_grad_u_max = std::max(m.linf_grad_u_max, r.linf_grad_u);
        }
        m.wall_time_s = std::chrono::duration<double>(clock::now() - start).count();
        members[idx] = std::move(m);
      } catch (const std::exception& e) {
        std::ostringstream msg;
        msg << "member eps = " << ladder[idx] << ": " << e.what();
        errors[idx] = msg.str();
      }
    }
  };
  const int nthreads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(opts.jobs), nm));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int n = 0; n < nthreads; ++n) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::string failure;
  for (std::size_t n = 0; n < nm; ++n) {
    if (errors[n].empty())
      result.members.push_back(std::move(members[n]));
    else if (failure.empty())
      failure = errors[n];
  }
  analyse(result);
  result.flags.insert(result.flags.begin(), guard_flags.begin(), guard_flags.end());
  if (!failure.empty()) {
    result.partial = true;
    throw SweepError("sweep aborted: " + failure, std::move(result));
  }
  return result;
}

}  // namespace lcflow
