#include "lcflow/diagnostics.hpp"

#include <cmath>
#include <algorithm>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>

#include "lcflow/parallel.hpp"

namespace lcflow {

namespace {

inline int wrap(int i, int n) noexcept { return i < 0 ? i + n : (i >= n ? i - n : i); }

double sum_sq(const Array3& a, int nzc) {
  return par::slab_sum(a.nx(), a.ny(), nzc, [&](int i, int j, int k) { return a(i, j, k) * a(i, j, k); });
}

FaceField midpoint(const FaceField& a, const FaceField& b) {
  FaceField out = a;
  for (int c = 0; c < 3; ++c) {
    auto o = out[c].storage();
    auto y = b[c].storage();
    for (std::size_t n = 0; n < o.size(); ++n) o[n] = 0.5 * (o[n] + y[n]);
  }
  return out;
}

VectorField midpoint(const VectorField& a, const VectorField& b) {
  VectorField out = a;
  for (int c = 0; c < 3; ++c) {
    auto o = out[c].storage();
    auto y = b[c].storage();
    for (std::size_t n = 0; n < o.size(); ++n) o[n] = 0.5 * (o[n] + y[n]);
  }
  return out;
}

// Depth-first walk over all Z-compositions of length <= m; visit(field) per node.
void walk_Z(const ScalarField& f, int depth, int m, const ChannelGrid& g,
            const std::function<void(const ScalarField&, int)>& visit) {
  visit(f, depth);
  if (depth == m) return;
  for (int dir = 1; dir <= 3; ++dir) walk_Z(apply_Z(f, dir, g), depth + 1, m, g, visit);
}

double max_euclid(const VectorField& f) {
  return std::sqrt(par::slab_max(f[0].nx(), f[0].ny(), f[0].nz(), [&](int i, int j, int k) {
    double s = 0.0;
    for (int c = 0; c < 3; ++c) s += f[c](i, j, k) * f[c](i, j, k);
    return s;
  }));
}

double vec_sq_norm(const VectorField& f, const ChannelGrid& g) {
  return (sum_sq(f[0], g.nz) + sum_sq(f[1], g.nz) + sum_sq(f[2], g.nz)) * g.cell_volume();
}

double tensor_conormal_sq(const std::array<ScalarField, 9>& t, int m, const ChannelGrid& g) {
  double s = 0.0;
  for (const auto& c : t) {
    const double n = conormal_norm(c, m, g);
    s += n * n;
  }
  return s;
}

std::array<ScalarField, 9> director_gradient(const VectorField& d, const ChannelGrid& g) {
  return cell_gradient(fill_ghosts_neumann(d, g), g);
}

}  // namespace

double l2_norm(const ScalarField& f, const ChannelGrid& g) {
  return std::sqrt(sum_sq(f, f.nz()) * g.cell_volume());
}

// --- energy budget ----------------------------------------------------------

EnergyTerms energy_terms(const FaceField& u, const VectorField& d, double eps, const SlipMatrixB& B,
                         const ChannelGrid& g) {
  const int nx = g.nx, ny = g.ny, nz = g.nz;
  const double dv = g.cell_volume();
  EnergyTerms e;
  e.kinetic = 0.5 * dv * (sum_sq(u[0], nz) + sum_sq(u[1], nz) + sum_sq(u[2], nz + 1));

  const VectorField df = fill_ghosts_neumann(d, g);
  const double ihx = 1.0 / g.hx, ihy = 1.0 / g.hy, ihz = 1.0 / g.hz;
  e.elastic = 0.5 * dv * par::slab_sum(nx, ny, nz, [&](int i, int j, int k) {
    double s = 0.0;
    for (int c = 0; c < 3; ++c) {
      const Array3& a = df[c];
      const double gx = (a(i + 1, j, k) - a(i, j, k)) * ihx;
      const double gy = (a(i, j + 1, k) - a(i, j, k)) * ihy;
      const double gz = k + 1 < nz ? (a(i, j, k + 1) - a(i, j, k)) * ihz : 0.0;
      s += gx * gx + gy * gy + gz * gz;
    }
    return s;
  });

  VectorField lap = make_vector(g);
  for (int c = 0; c < 3; ++c) laplacian_prefilled(df[c], lap[c], g);
  e.dir_diss = vec_sq_norm(lap, g);
  e.quartic = dv * par::slab_sum(nx, ny, nz, [&](int i, int j, int k) {
    double G = 0.0;
    for (int c = 0; c < 3; ++c) G -= d[c](i, j, k) * lap[c](i, j, k);
    return G * G;
  });

  if (eps == 0.0) return e;
  const FaceField uf = fill_ghosts_navier_slip(u, B, g);
  const EdgeVorticity w = edge_vorticity(uf, g);
  const double wx = par::slab_sum(nx, ny, nz + 1, [&](int i, int j, int k) {
    const double wt = (k == 0 || k == nz) ? 0.5 : 1.0;
    return wt * (w.x(i, j, k) * w.x(i, j, k) + w.y(i, j, k) * w.y(i, j, k));
  });
  e.visc_diss = eps * dv * (wx + sum_sq(w.z, nz));

  double bw = 0.0;
  for (int wall = 0; wall < 2; ++wall) {
    const int kin = wall == 0 ? 0 : nz - 1, kg = wall == 0 ? -1 : nz;
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const double a = 0.5 * (uf[0](i, j, kin) + uf[0](i, j, kg));
        const double b = 0.5 * (uf[1](i, j, kin) + uf[1](i, j, kg));
        double s = B.b11 * a * a + B.b22 * b * b;
        if (B.b12 != 0.0) {
          const int im = wrap(i - 1, nx), jp = wrap(j + 1, ny);
          auto vb = [&](int ii, int jj) { return 0.5 * (uf[1](ii, jj, kin) + uf[1](ii, jj, kg)); };
          s += 2.0 * B.b12 * a * 0.25 * (vb(im, j) + vb(i, j) + vb(im, jp) + vb(i, jp));
        }
        bw += s;
      }
  }
  e.boundary_work = eps * bw * g.wall_face_area();
  return e;
}

double energy_balance_residual(const State& prev, const State& next, const SimConfig& cfg, const ChannelGrid& g) {
  const double dt = next.t - prev.t;
  if (!(dt > 0.0)) throw std::invalid_argument("energy_balance_residual: states must be strictly ordered in time");
  const EnergyTerms a = energy_terms(prev.u, prev.d, 0.0, cfg.slip, g);
  const EnergyTerms b = energy_terms(next.u, next.d, 0.0, cfg.slip, g);
  const EnergyTerms m = energy_terms(midpoint(prev.u, next.u), midpoint(prev.d, next.d), cfg.eps, cfg.slip, g);
  const double dE = (b.kinetic + b.elastic) - (a.kinetic + a.elastic);
  return dE / dt + m.visc_diss + m.dir_diss - m.quartic + m.boundary_work;
}

// --- conormal norms -----------------------------------------------------------

double conormal_norm(const ScalarField& f, int m, const ChannelGrid& g) {
  if (m < 0 || m > kConormalMaxOrder)
    throw std::invalid_argument("conormal_norm: order " + std::to_string(m) + " outside [0, 4]");
  double s = 0.0;
  walk_Z(f, 0, m, g, [&](const ScalarField& z, int) { s += sum_sq(z, g.nz); });
  return std::sqrt(s * g.cell_volume());
}

double conormal_norm(const VectorField& f, int m, const ChannelGrid& g) {
  double s = 0.0;
  for (int c = 0; c < 3; ++c) {
    const double n = conormal_norm(f[c], m, g);
    s += n * n;
  }
  return std::sqrt(s);
}

double conormal_norm(const FaceField& u, int m, const ChannelGrid& g) {
  return conormal_norm(faces_to_centers(u, g), m, g);
}

double linf_conormal(const ScalarField& f, int k, const ChannelGrid& g) {
  if (k < 0 || k > kLinfMaxOrder)
    throw std::invalid_argument("linf_conormal: order " + std::to_string(k) + " outside [0, 2]");
  double s = 0.0;
  walk_Z(f, 0, k, g, [&](const ScalarField& z, int) {
    const double v = max_abs(z);
    s += v * v;
  });
  return std::sqrt(s);
}

double linf_conormal(const VectorField& f, int k, const ChannelGrid& g) {
  if (k < 0 || k > kLinfMaxOrder)
    throw std::invalid_argument("linf_conormal: order " + std::to_string(k) + " outside [0, 2]");
  // Walk the three components in lockstep so each Z^I sees the whole vector.
  double s = 0.0;
  std::function<void(const VectorField&, int)> rec = [&](const VectorField& v, int depth) {
    const double n = max_euclid(v);
    s += n * n;
    if (depth == k) return;
    for (int dir = 1; dir <= 3; ++dir)
      rec(VectorField{{apply_Z(v[0], dir, g), apply_Z(v[1], dir, g), apply_Z(v[2], dir, g)}}, depth + 1);
  };
  rec(f, 0);
  return std::sqrt(s);
}

std::array<ScalarField, 9> velocity_gradient(const FaceField& u, const SlipMatrixB& B, const ChannelGrid& g) {
  const VectorField uc = centered_velocity_with_ghosts(fill_ghosts_navier_slip(u, B, g), g);
  return cell_gradient(uc, g);
}

double grad_u_linf_surrogate(const State& s, const SlipMatrixB& B, const ChannelGrid& g) {
  const auto grad = velocity_gradient(s.u, B, g);
  double sum = 0.0;
  for (const auto& c : grad) {
    const double n = linf_conormal(c, 1, g);
    sum += n * n;
  }
  return std::sqrt(sum);
}

double nm_surrogate(const State& s, const SimConfig& cfg, const ChannelGrid& g, int m, const PoissonSolver* solver) {
  if (m < 1 || m > kConormalMaxOrder)
    throw std::invalid_argument("nm_surrogate: order " + std::to_string(m) + " outside [1, 4]");
  const VectorField uc = faces_to_centers(s.u, g);
  const auto grad_u = velocity_gradient(s.u, cfg.slip, g);
  const auto grad_d = director_gradient(s.d, g);
  const VectorField lap_d = laplacian(s.d, g);

  auto sq = [](double x) { return x * x; };
  double total = sq(conormal_norm(uc, m, g));
  total += vec_sq_norm(s.d, g);
  total += tensor_conormal_sq(grad_d, m, g);
  total += tensor_conormal_sq(grad_u, m - 1, g);
  total += sq(conormal_norm(lap_d, m - 1, g));
  total += sq(grad_u_linf_surrogate(s, cfg.slip, g));
  if (!cfg.time_derivs) return total;

  // First time derivatives from the equations, pressure by projection.
  std::unique_ptr<PoissonSolver> own;
  if (!solver) {
    own = std::make_unique<PoissonSolver>(g, cfg.poisson, cfg.max_iterations);
    solver = own.get();
  }
  const FaceField uf = fill_ghosts_navier_slip(s.u, cfg.slip, g);
  FaceField a = advect(s.u, s.u, g);
  const FaceField lap_u = laplacian_prefilled(uf, g);
  const FaceField st = centers_to_faces(elastic_stress(s.d, g), g);
  for (int c = 0; c < 3; ++c) {
    auto o = a[c].storage();
    auto l = lap_u[c].storage();
    auto f = st[c].storage();
    for (std::size_t n = 0; n < o.size(); ++n) o[n] = -o[n] + cfg.eps * l[n] - f[n];
  }
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      a[2](i, j, 0) = 0.0;
      a[2](i, j, g.nz) = 0.0;
    }
  State ts = s;
  ts.u = project(a, 1.0, *solver, cfg.solver_tol).u;
  const VectorField adv_d = advect(s.u, s.d, g);
  const ScalarField G = gradient_density(s.d, g);
  for (int c = 0; c < 3; ++c)
    par::for_each_cell(g.nx, g.ny, g.nz, [&](int i, int j, int k) {
      ts.d[c](i, j, k) = -adv_d[c](i, j, k) + lap_d[c](i, j, k) + G(i, j, k) * s.d[c](i, j, k);
    });

  const VectorField utc = faces_to_centers(ts.u, g);
  total += sq(conormal_norm(utc, m - 1, g));
  total += vec_sq_norm(ts.d, g);
  total += tensor_conormal_sq(director_gradient(ts.d, g), m - 1, g);
  if (m >= 2) {
    total += tensor_conormal_sq(velocity_gradient(ts.u, cfg.slip, g), m - 2, g);
    total += sq(conormal_norm(laplacian(ts.d, g), m - 2, g));
  }
  double linf = 0.0;
  for (const auto& c : velocity_gradient(ts.u, cfg.slip, g)) linf += sq(max_abs(c));
  return total + linf;
}

// --- eta ------------------------------------------------------------------------

double cutoff_chi(double z, const ChannelGrid& g) {
  if (!(z >= 0.0 && z <= g.lz)) throw std::invalid_argument("cutoff_chi: z outside [0, lz]");
  const double zeta = std::min(z, g.lz - z);
  const double a = g.lz / 8.0;
  if (zeta <= a) return 1.0;
  if (zeta >= 2.0 * a) return 0.0;
  const double s = (zeta - a) / a;
  return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

namespace {

// Tangential components of omega x n + Pi(B u) at cell (i,j,k) for the given wall normal.
std::array<double, 2> eta_raw(const VectorField& w, const VectorField& uc, const SlipMatrixB& B, int i, int j,
                              int k, double n3) {
  const auto bu = B.apply(uc[0](i, j, k), uc[1](i, j, k));
  // omega x (0,0,n3) = (omega_2 n3, -omega_1 n3, 0)
  return {w[1](i, j, k) * n3 + bu[0], -w[0](i, j, k) * n3 + bu[1]};
}

}  // namespace

VectorField eta_field(const State& s, const SlipMatrixB& B, const ChannelGrid& g) {
  const FaceField uf = fill_ghosts_navier_slip(s.u, B, g);
  const VectorField w = curl(uf, g);
  const VectorField uc = faces_to_centers(uf, g);
  VectorField out = make_vector(g);
  par::for_each_cell(g.nx, g.ny, g.nz, [&](int i, int j, int k) {
    const double z = g.zc(k);
    const double chi = cutoff_chi(z, g);
    if (chi == 0.0) return;
    const double n3 = z < 0.5 * g.lz ? -1.0 : 1.0;
    const auto e = eta_raw(w, uc, B, i, j, k, n3);
    out[0](i, j, k) = chi * e[0];
    out[1](i, j, k) = chi * e[1];
  });
  return out;
}

double eta_trace(const State& s, const SlipMatrixB& B, const ChannelGrid& g) {
  const FaceField uf = fill_ghosts_navier_slip(s.u, B, g);
  const VectorField w = curl(uf, g);
  const VectorField uc = faces_to_centers(uf, g);
  double sum = 0.0;
  for (int wall = 0; wall < 2; ++wall) {
    const int k0 = wall == 0 ? 0 : g.nz - 1, k1 = wall == 0 ? 1 : g.nz - 2;
    const double n3 = wall == 0 ? -1.0 : 1.0;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const auto q0 = eta_raw(w, uc, B, i, j, k0, n3);
        const auto q1 = eta_raw(w, uc, B, i, j, k1, n3);
        for (int c = 0; c < 2; ++c) {
          const double e = 0.5 * (3.0 * q0[c] - q1[c]);
          sum += e * e;
        }
      }
  }
  return std::sqrt(sum * g.wall_face_area());
}

// --- records ------------------------------------------------------------------

DiagnosticsRecord make_record(const State& s, const State* prev, double dt, const SimConfig& cfg,
                              const ChannelGrid& g, const PoissonSolver& solver) {
  DiagnosticsRecord r;
  r.t = s.t;
  const EnergyTerms e = energy_terms(s.u, s.d, cfg.eps, cfg.slip, g);
  r.kinetic = e.kinetic;
  r.elastic = e.elastic;
  r.visc_diss = e.visc_diss;
  r.dir_diss = e.dir_diss;
  r.quartic = e.quartic;
  r.boundary_work = e.boundary_work;
  if (prev) {
    State a = *prev;
    a.t = s.t - dt;
    r.energy_residual = energy_balance_residual(a, s, cfg, g);
  }
  r.unit_dev = unit_deviation(s.d);
  r.div_res = max_abs(discrete_divergence(s.u, g));
  r.nm_value = nm_surrogate(s, cfg, g, cfg.diag_m, &solver);
  r.eta_trace = eta_trace(s, cfg.slip, g);
  r.linf_grad_u = grad_u_linf_surrogate(s, cfg.slip, g);
  const PressureSplit ps = pressure_split(s, cfg.eps, cfg.slip, solver, cfg.solver_tol);
  r.p1_norm = l2_norm(ps.p1, g);
  r.p2_norm = l2_norm(ps.p2, g);
  const VectorField uc = faces_to_centers(s.u, g);
  const auto gd = director_gradient(s.d, g);
  for (int m = 0; m <= cfg.diag_m; ++m) {
    r.conormal[{"u", m}] = conormal_norm(uc, m, g);
    r.conormal[{"grad_d", m}] = std::sqrt(tensor_conormal_sq(gd, m, g));
  }
  return r;
}

}  // namespace lcflow
